"""Division towers of the Lubin-Tate module pi*X + X^q and their path series.

The tower of depth M is xi_0 = pi, xi_0 = -xi_1^(q-1), xi_{i-1} =
pi*xi_i + xi_i^q, stopping at the basepoint xi_M.  Everything downstream
works with the series X_i expressing xi_i in powers of T = xi_M; these
have plain F_q coefficients, so tower arithmetic is Laurent-series
arithmetic over F_q and FieldElement is reused with pi read as T.
"""

from .errors import (DivisionByZero, LocalsymError, NoConvergence,
                     PrecisionExhausted)
from .localfield import FieldElement


def series_derivative(x):
    """Formal d/dT of a Laurent series (coefficients reduced mod p)."""
    ctx = x.ctx
    cc = {}
    for e, c in x.coeffs.items():
        r = ctx.mul(c, ctx.from_int(e % ctx.p))
        if r:
            cc[e - 1] = r
    prec = None if x.prec is None else x.prec - 1
    return FieldElement(ctx, cc, prec)


class TowerContext:
    """Solved tower: path series X_0..X_M in T = xi_M, all mod T^prec.

    e is the ramification index of k(xi_M)/k, also ord_T(X_0); deriv is
    the formal derivative of X_0, the series of U'_{pi, xi_M}.
    """

    __slots__ = ("ctx", "M", "prec", "Xseries", "deriv", "e",
                 "_torsion", "_x0_powers")

    def __init__(self, ctx, M, prec, Xseries, deriv, e):
        self.ctx = ctx
        self.M = M
        self.prec = prec
        self.Xseries = Xseries
        self.deriv = deriv
        self.e = e
        self._torsion = [Xseries[M]]
        self._x0_powers = {0: FieldElement.one(ctx), 1: Xseries[0]}

    def identity_series(self):
        return self.Xseries[self.M]

    def pi_torsion(self, n):
        """The multiplication-by-pi^n series, with pi replaced by X_0.

        Vanishes identically for n >= M because xi_M is pi^M-torsion.
        """
        tor = self._torsion
        x0 = self.Xseries[0]
        d = self.ctx.d
        while len(tor) <= n:
            prev = tor[-1]
            tor.append((x0 * prev + prev.pth_power(d)).truncate(self.prec))
        return tor[n]

    def x0_power(self, j):
        """X_0^j for any integer j, inverted to the working precision."""
        pw = self._x0_powers
        if j not in pw:
            if j > 0:
                pw[j] = (pw[1] ** j).truncate(self.prec)
            else:
                if -1 not in pw:
                    pw[-1] = pw[1].inv()
                pw[j] = pw[-1] ** (-j)
        return pw[j]

    def __repr__(self):
        return "TowerContext(q=%d, M=%d, prec=%d)" % (self.ctx.q, self.M, self.prec)


def build_tower(ctx, M, prec):
    """Solve the tower relations mod T^prec by fixed-point iteration."""
    if M < 0:
        raise LocalsymError("tower depth must be >= 0, got %r" % (M,))
    if prec < 2:
        raise LocalsymError("tower precision must be >= 2, got %r" % (prec,))
    q = ctx.q
    T = FieldElement.pi_power(ctx, 1).truncate(prec)
    if M == 0:
        return TowerContext(ctx, 0, prec, [T], series_derivative(T), 1)
    e = (q - 1) * q ** (M - 1)
    xs = [FieldElement(ctx, {}, prec) for _ in range(M)] + [T]
    last_gap = 0
    for _ in range(prec + 2):
        for i in range(M, 1, -1):
            xs[i - 1] = (xs[0] * xs[i] + xs[i].pth_power(ctx.d)).truncate(prec)
        new0 = (-(xs[1] ** (q - 1))).truncate(prec)
        diff = new0 - xs[0]
        xs[0] = new0
        if diff.is_zero():
            break
        gap = diff.ord()
        if gap <= last_gap:
            raise NoConvergence("tower iteration stalled at T^%d" % gap)
        last_gap = gap
    else:
        raise NoConvergence("tower did not stabilize mod T^%d" % prec)

    if xs[0].ord() != e:
        raise NoConvergence("ord X_0 = %d, expected %d" % (xs[0].ord(), e))
    for i in range(1, M + 1):
        if xs[i].ord() != q ** (M - i):
            raise NoConvergence("ord X_%d = %d, expected %d"
                                % (i, xs[i].ord(), q ** (M - i)))
    for i in range(2, M + 1):
        res = xs[i - 1] - (xs[0] * xs[i] + xs[i].pth_power(ctx.d))
        if not res.is_zero():
            raise NoConvergence("tower relation %d has residual" % i)
    if not (xs[0] + xs[1] ** (q - 1)).is_zero():
        raise NoConvergence("tower base relation has residual")
    return TowerContext(ctx, M, prec, xs, series_derivative(xs[0]), e)


def lubin_tate_action(tw, a):
    """Path series of the reciprocity action of a on the tower basepoint.

    Only the unit part u of a acts (uniformizer powers fix the tower);
    the series is sum_j u_j * pi_torsion(j) over the digits of u, which
    the torsion recursion truncates to digits below pi^M.
    """
    if a.is_zero():
        raise DivisionByZero("only nonzero elements act on the tower")
    if not a.is_exact():
        raise LocalsymError("tower action needs an exact element")
    if tw.M == 0:
        # xi_0 = pi lies in k, so every unit acts trivially on it.
        return tw.identity_series()
    u = a.shift(-a.ord())
    out = FieldElement(tw.ctx, {}, tw.prec)
    for j in sorted(u.coeffs):
        tor = tw.pi_torsion(j)
        if tor.is_zero():
            break
        out = out + tor.scale(u.coeffs[j])
    return out


def path_series(tw, level, a):
    """Series in T of the action of a on the intermediate point xi_level.

    Digits of the unit part of a at pi^j move xi_level to xi_{level-j},
    so the series is sum_{j<level} u_j * X_{level-j}; at level 0 the
    point is pi itself and every unit fixes it.  Agrees with
    lubin_tate_action at level == M.
    """
    if not 0 <= level <= tw.M:
        raise LocalsymError("level %r outside tower of depth %d" % (level, tw.M))
    if a.is_zero():
        raise DivisionByZero("only nonzero elements act on the tower")
    if not a.is_exact():
        raise LocalsymError("tower action needs an exact element")
    if level == 0:
        return tw.Xseries[0]
    u = a.shift(-a.ord())
    out = FieldElement(tw.ctx, {}, tw.prec)
    for j in sorted(u.coeffs):
        if j >= level:
            break
        out = out + tw.Xseries[level - j].scale(u.coeffs[j])
    return out


class KElement:
    """Laurent series in the tower uniformizer T, tagged with its tower."""

    __slots__ = ("tower", "series")

    def __init__(self, tower, series):
        self.tower = tower
        self.series = series

    @staticmethod
    def from_field(tower, x):
        """Embed an element of k by substituting the series X_0 for pi."""
        if not x.is_exact():
            raise LocalsymError("embedding needs an exact element")
        out = FieldElement(tower.ctx, {}, tower.prec)
        for n, c in x.coeffs.items():
            out = out + tower.x0_power(n).scale(c)
        return KElement(tower, out.truncate(tower.prec))

    @staticmethod
    def one(tower):
        return KElement(tower, FieldElement.one(tower.ctx).truncate(tower.prec))

    def is_zero(self):
        return self.series.is_zero()

    def ord(self):
        """Order in T; divide by tower.e for the order in k-normalization."""
        return self.series.ord()

    def add(self, other):
        return KElement(self.tower, self.series + other.series)

    def sub(self, other):
        return KElement(self.tower, self.series - other.series)

    def neg(self):
        return KElement(self.tower, -self.series)

    def mul(self, other):
        return KElement(self.tower, self.series * other.series)

    def int_pow(self, n):
        if n >= 0:
            return KElement(self.tower, self.series ** n)
        return self.inv().int_pow(-n)

    def inv(self):
        return KElement(self.tower, self.series.inv())

    def agrees(self, other):
        return self.series.agrees(other.series)

    def in_base_field(self):
        """The k-element this series descends to, or None."""
        return k_membership(self)

    def __repr__(self):
        return "KElement(%r)" % (self.series,)


def k_membership(x):
    """Greedy expansion of a tower series in powers of P(T) = X_0.

    Returns the witnessing element of k when every leading term matches a
    c*P^j, None at the first exponent not divisible by the ramification
    index.  The result carries precision floor'd down from the series.
    """
    tw = x.tower
    ctx = tw.ctx
    rem = x.series
    digits = {}
    while not rem.is_zero():
        n = rem.ord()
        if n % tw.e:
            return None
        j = n // tw.e
        pj = tw.x0_power(j)
        c = ctx.div(rem.leading(), pj.leading())
        digits[j] = c
        rem = rem - pj.scale(c)
    if rem.prec is None:
        return FieldElement(ctx, digits)
    kprec = -(-rem.prec // tw.e)
    if digits and kprec <= min(digits):
        raise PrecisionExhausted("no full k-digit below the horizon")
    return FieldElement(ctx, digits, kprec)


def tower_derivative(tw):
    """U'_{pi, xi_M} as an element of k(xi_M); never zero to precision."""
    if tw.deriv.is_zero():
        raise PrecisionExhausted("tower derivative vanishes to horizon")
    return KElement(tw, tw.deriv)
