"""Bivariate power series over F_q with monomial prefactors.

An element is X^muX * Y^muY * body, the body a polynomial whose cells
(i, j) are known on the cone i + j < D.  Bodies are kept coprime to X
and to Y (the monomial part is pulled into the prefactors), so X- and
Y-valuations are read off the prefactors and a cofactor is invertible
exactly when its body has a unit constant term.  All horizon updates
are conservative: an operation reports the largest cone on which its
output is forced by the known cells of its inputs.
"""

from .errors import (DivisionByZero, LocalsymError, NotAUnit,
                     PrecisionExhausted, ZeroToPrecision)
from .localfield import FieldElement
from .tower import path_series


class BivariateSeries:
    __slots__ = ("ctx", "muX", "muY", "body", "D")

    def __init__(self, ctx, muX, muY, body, D):
        self.ctx = ctx
        self.muX = muX
        self.muY = muY
        self.body = body
        self.D = D

    @staticmethod
    def make(ctx, muX, muY, body, D):
        """Normalized constructor: drops dead cells, pulls out X/Y factors.

        Cells at or beyond the cone are discarded rather than trusted; a
        body emptied by that is the canonical zero (prefactors reset).
        """
        bb = {}
        for (i, j), c in body.items():
            if c and i + j < D:
                bb[(i, j)] = c
        if not bb:
            return BivariateSeries(ctx, 0, 0, {}, D)
        s = min(i for i, _ in bb)
        r = min(j for _, j in bb)
        if s or r:
            bb = {(i - s, j - r): c for (i, j), c in bb.items()}
        return BivariateSeries(ctx, muX + s, muY + r, bb, D - s - r)

    @staticmethod
    def zero(ctx, D):
        return BivariateSeries(ctx, 0, 0, {}, D)

    @staticmethod
    def one(ctx, D):
        return BivariateSeries(ctx, 0, 0, {(0, 0): 1}, D)

    @staticmethod
    def variable_x(ctx, D):
        return BivariateSeries(ctx, 1, 0, {(0, 0): 1}, D)

    @staticmethod
    def variable_y(ctx, D):
        return BivariateSeries(ctx, 0, 1, {(0, 0): 1}, D)

    @staticmethod
    def from_univariate(ctx, x, in_y=False):
        """Lift a Laurent series to a bivariate element of X (or Y) alone."""
        if x.is_zero():
            if x.prec is None:
                raise LocalsymError("exact zero has no bivariate horizon")
            return BivariateSeries.zero(ctx, x.prec)
        D = (max(x.coeffs) + 1) if x.prec is None else x.prec
        if in_y:
            body = {(0, e): c for e, c in x.coeffs.items()}
        else:
            body = {(e, 0): c for e, c in x.coeffs.items()}
        return BivariateSeries.make(ctx, 0, 0, body, D)

    # absolute total-degree horizon: errors live at degree >= this
    def abs_horizon(self):
        return self.D + self.muX + self.muY

    def is_zero(self):
        return not self.body

    def total_ord(self):
        """Least total degree carrying a known nonzero cell."""
        if not self.body:
            raise ZeroToPrecision("zero to horizon has no order")
        return min(i + j for i, j in self.body) + self.muX + self.muY

    def constant_term(self):
        return self.body.get((0, 0), 0)

    def _abs_cells(self, cap):
        out = {}
        for (i, j), c in self.body.items():
            u, v = i + self.muX, j + self.muY
            if u + v < cap:
                out[(u, v)] = c
        return out

    def agrees(self, other):
        """Equality on the largest cone both sides know."""
        cap = min(self.abs_horizon(), other.abs_horizon())
        return self._abs_cells(cap) == other._abs_cells(cap)

    def add(self, other):
        cap = min(self.abs_horizon(), other.abs_horizon())
        cells = self._abs_cells(cap)
        for key, c in other._abs_cells(cap).items():
            s = self.ctx.add(cells.get(key, 0), c)
            if s:
                cells[key] = s
            else:
                cells.pop(key, None)
        return BivariateSeries.make(self.ctx, 0, 0, cells, cap)

    def neg(self):
        body = {k: self.ctx.neg(c) for k, c in self.body.items()}
        return BivariateSeries(self.ctx, self.muX, self.muY, body, self.D)

    def sub(self, other):
        return self.add(other.neg())

    def scale(self, code):
        if code == 0:
            return BivariateSeries.zero(self.ctx, self.abs_horizon())
        body = {k: self.ctx.mul(c, code) for k, c in self.body.items()}
        return BivariateSeries(self.ctx, self.muX, self.muY, body, self.D)

    def mul(self, other):
        ctx = self.ctx
        tau1 = min((i + j for i, j in self.body), default=self.D)
        tau2 = min((i + j for i, j in other.body), default=other.D)
        cap = min(self.abs_horizon() + other.muX + other.muY + tau2,
                  other.abs_horizon() + self.muX + self.muY + tau1)
        muX = self.muX + other.muX
        muY = self.muY + other.muY
        D = cap - muX - muY
        cells = {}
        for (i1, j1), c1 in self.body.items():
            for (i2, j2), c2 in other.body.items():
                i, j = i1 + i2, j1 + j2
                if i + j >= D:
                    continue
                s = ctx.add(cells.get((i, j), 0), ctx.mul(c1, c2))
                if s:
                    cells[(i, j)] = s
                else:
                    del cells[(i, j)]
        return BivariateSeries.make(ctx, muX, muY, cells, D)

    def int_pow(self, n):
        if n < 0:
            return self.invert_unit().int_pow(-n)
        out = BivariateSeries.one(self.ctx, self.abs_horizon())
        for _ in range(n):
            out = out.mul(self)
        return out

    def invert_unit(self):
        """Inverse of a series whose body is a unit at the origin.

        Prefactors are allowed and come out negated; the body inverse is
        solved cell by cell along total degree.
        """
        ctx = self.ctx
        c00 = self.body.get((0, 0), 0)
        if not c00:
            raise NotAUnit("body vanishes at the origin")
        c00i = ctx.inv(c00)
        inv = {(0, 0): c00i}
        for n in range(1, self.D):
            for i in range(n + 1):
                j = n - i
                acc = 0
                for (u, v), b in self.body.items():
                    if (u, v) != (0, 0) and u <= i and v <= j:
                        w = inv.get((i - u, j - v))
                        if w:
                            acc = ctx.add(acc, ctx.mul(b, w))
                if acc:
                    inv[(i, j)] = ctx.neg(ctx.mul(c00i, acc))
        return BivariateSeries(ctx, -self.muX, -self.muY, inv, self.D)

    def dagger(self):
        """Swap the two variables (prefactors included)."""
        body = {(j, i): c for (i, j), c in self.body.items()}
        return BivariateSeries(self.ctx, self.muY, self.muX, body, self.D)

    def derivative_x(self):
        """Formal d/dX; the horizon cone slides down by one with muX."""
        ctx = self.ctx
        body = {}
        for (i, j), c in self.body.items():
            r = ctx.mul(c, ctx.from_int((i + self.muX) % ctx.p))
            if r:
                body[(i, j)] = r
        return BivariateSeries.make(self.ctx, self.muX - 1, self.muY,
                                    body, self.D)

    def __repr__(self):
        return ("BivariateSeries(muX=%d, muY=%d, cells=%d, D=%d)"
                % (self.muX, self.muY, len(self.body), self.D))


def _scaled(u, ctx, qpow):
    """u with exponents (and knowledge horizon) scaled by q^qpow."""
    if qpow == 0:
        return u
    return u.pth_power(ctx.d * qpow)


def _laurent_pow(x, n, fallback=None):
    """x^n for possibly negative n.

    Inversion runs at natural precision; an exact non-monomial base has
    none, so negative powers of one fall back to the supplied target
    (derived from the horizon cone of the caller).
    """
    if n >= 0:
        return x ** n
    if x.prec is None and not x.is_monomial():
        return x.inv(target_prec=fallback) ** (-n)
    return x.inv() ** (-n)


def substitute(F, uX, qpowX, uY, qpowY):
    """F(uX(X^{q^qpowX}), uY(Y^{q^qpowY})) with conservative horizons.

    uX and uY are univariate series of positive order; their powers are
    computed in the base variable first and only then have exponents
    scaled, so large Frobenius twists stay sparse.
    """
    ctx = F.ctx
    if qpowX < 0 or qpowY < 0:
        raise LocalsymError("Frobenius twists must be >= 0")
    for u in (uX, uY):
        if u.is_zero() or u.ord() < 1:
            raise LocalsymError("substitution series must have positive order")
    SX = _scaled(uX, ctx, qpowX)
    SY = _scaled(uY, ctx, qpowY)
    deep = F.D * min(SX.ord(), SY.ord()) \
        + abs(F.muX) * SX.ord() + abs(F.muY) * SY.ord()
    FX = _laurent_pow(SX, F.muX, deep)
    FY = _laurent_pow(SY, F.muY, deep)
    TX = {0: FX}
    TY = {0: FY}
    for (i, j) in F.body:
        if i not in TX:
            TX[i] = FX * _laurent_pow(SX, i)
        if j not in TY:
            TY[j] = FY * _laurent_pow(SY, j)

    cap = F.D * min(SX.ord(), SY.ord()) + FX.ord_lower_bound() \
        + FY.ord_lower_bound()
    ordx = min(t.ord_lower_bound() for t in TX.values())
    ordy = min(t.ord_lower_bound() for t in TY.values())
    for t in TX.values():
        if t.prec is not None:
            cap = min(cap, t.prec + ordy)
    for t in TY.values():
        if t.prec is not None:
            cap = min(cap, t.prec + ordx)
    # a normalized body always lands its leading cell under the cap, so
    # these raises only guard adversarial precision combinations
    if cap <= ordx + ordy and F.body:
        raise PrecisionExhausted("substitution output has no known cells")

    cells = {}
    for (i, j), c in F.body.items():
        for ex, cx in TX[i].coeffs.items():
            row = ctx.mul(c, cx)
            for ey, cy in TY[j].coeffs.items():
                if ex + ey >= cap:
                    continue
                s = ctx.add(cells.get((ex, ey), 0), ctx.mul(row, cy))
                if s:
                    cells[(ex, ey)] = s
                else:
                    del cells[(ex, ey)]
    if F.body and not cells:
        raise PrecisionExhausted("substitution output has no known cells")
    return BivariateSeries.make(ctx, 0, 0, cells, cap)


def evaluate(F, sx, sy):
    """F(sx, sy) for univariate series arguments of positive order."""
    ctx = F.ctx
    for s in (sx, sy):
        if s.is_zero() or s.ord() < 1:
            raise LocalsymError("evaluation points must have positive order")
    deep = F.D * min(sx.ord(), sy.ord()) \
        + abs(F.muX) * sx.ord() + abs(F.muY) * sy.ord()
    FX = _laurent_pow(sx, F.muX, deep)
    FY = _laurent_pow(sy, F.muY, deep)
    cap = F.D * min(sx.ord(), sy.ord()) + FX.ord_lower_bound() \
        + FY.ord_lower_bound()
    acc = FieldElement(ctx, {}, cap)
    powx = {0: FX}
    powy = {0: FY}
    for (i, j), c in sorted(F.body.items()):
        if i not in powx:
            powx[i] = FX * _laurent_pow(sx, i)
        if j not in powy:
            powy[j] = FY * _laurent_pow(sy, j)
        acc = acc + (powx[i] * powy[j]).scale(c)
    return acc


def _unit_inverse(u, digits):
    """Exact inverse of an exact unit, trusted through pi^digits.

    Sound wherever only digits below the cutoff are consumed; the tower
    action reads digits below its depth only.
    """
    if u.is_monomial():
        return u.inv()
    return u.inv(target_prec=digits).with_exact()


def square_bracket(tw, F, b, c, level=None):
    """Rescale F from basepoint xi_level to the tower basepoint xi_M.

    Sends X to the path series of the inverse unit of b twisted by
    Frobenius to the norm of b, and Y likewise for c; both norms must
    be >= 1.  With level == M and b = c = 1 this is the identity.
    """
    if level is None:
        level = tw.M
    for a in (b, c):
        if a.is_zero():
            raise DivisionByZero("bracket entries must be nonzero")
        if not a.is_exact():
            raise LocalsymError("bracket entries must be exact")
        if a.ord() > 0:
            raise LocalsymError("bracket entries must have norm >= 1")
    beta, gamma = -b.ord(), -c.ord()
    digits = max(level, 1) + 1
    ub = _unit_inverse(b.shift(beta), digits)
    uc = _unit_inverse(c.shift(gamma), digits)
    return substitute(F, path_series(tw, level, ub), beta,
                      path_series(tw, level, uc), gamma)


def weierstrass_divide(F, W):
    """Division with remainder by a divisor distinguished in Y.

    W must have trivial prefactors and restrict to Y^d on the X = 0
    axis; every other cell of W then carries a positive power of X, so
    the defect loop gains an X-digit per pass and terminates at the
    horizon.  Returns (Q, R) with F = Q*W + R and deg_Y R < d.
    """
    ctx = F.ctx
    if W.muX or W.muY:
        raise LocalsymError("divisor must have trivial prefactors")
    axis = [(i, j) for (i, j) in W.body if i == 0]
    if len(axis) != 1 or W.body[axis[0]] != 1:
        raise LocalsymError("divisor is not distinguished in Y")
    d = axis[0][1]
    if F.muX < 0 or F.muY < 0:
        raise LocalsymError("dividend has negative prefactors")
    cap = min(F.abs_horizon(), W.D)
    defect = {(i, j): ctx.neg(c) for (i, j), c in W.body.items()
              if (i, j) != (0, d)}
    cur = F._abs_cells(cap)
    quo = {}
    while True:
        high = {}
        low = {}
        for (i, j), c in cur.items():
            if j >= d:
                high[(i, j - d)] = c
            else:
                low[(i, j)] = c
        if not high:
            break
        for key, c in high.items():
            s = ctx.add(quo.get(key, 0), c)
            if s:
                quo[key] = s
            else:
                del quo[key]
        cur = low
        for (i1, j1), c1 in high.items():
            for (i2, j2), c2 in defect.items():
                i, j = i1 + i2, j1 + j2
                if i + j >= cap:
                    continue
                s = ctx.add(cur.get((i, j), 0), ctx.mul(c1, c2))
                if s:
                    cur[(i, j)] = s
                else:
                    del cur[(i, j)]
    return (BivariateSeries.make(ctx, 0, 0, quo, cap),
            BivariateSeries.make(ctx, 0, 0, cur, cap))


def diag_valuation(F):
    """Multiplicity of (X - Y) in F and the leading diagonal series.

    Returns (ell, F/(X-Y)^ell restricted to X = Y) with the restriction
    a nonzero Laurent series in the second variable.  Divisions happen
    on the prefactor-free body; the prefactors rejoin as a shift of the
    diagonal at the end.
    """
    ctx = F.ctx
    if F.is_zero():
        raise ZeroToPrecision("no diagonal below the horizon")
    shift = F.muX + F.muY
    cur = dict(F.body)
    D = F.D
    ell = 0
    while True:
        diag = {}
        for (i, j), c in cur.items():
            s = ctx.add(diag.get(i + j, 0), c)
            if s:
                diag[i + j] = s
            else:
                del diag[i + j]
        rest = FieldElement(ctx, diag, D)
        if not rest.is_zero():
            return ell, rest.shift(shift)
        if D <= 1 or not cur:
            raise ZeroToPrecision("diagonal valuation exceeds the horizon")
        # divide by (X - Y): q_{u} = c_{u+1} + Y*q_{u+1}, top down
        cols = {}
        for (i, j), c in cur.items():
            cols.setdefault(i, {})[j] = c
        prev = {}
        nxt = {}
        for u in range(max(cols) - 1, -1, -1):
            col = dict(cols.get(u + 1, {}))
            for j, c in prev.items():
                s = ctx.add(col.get(j + 1, 0), c)
                if s:
                    col[j + 1] = s
                else:
                    del col[j + 1]
            if col:
                nxt[u] = col
            prev = col
        cur = {(u, j): c for u, col in nxt.items() for j, c in col.items()
               if u + j < D - 1}
        D -= 1
        ell += 1


def z_series(tw, t):
    """The divisor series of t at the tower basepoint.

    For norm >= 1 this is X^{||t||} minus the path series of the unit
    part of t in Y; for norm < 1 the variables trade places and the
    unit part inverts.  Vanishes at the graph of the action of t.
    """
    if t.is_zero():
        raise DivisionByZero("no divisor series at zero")
    if not t.is_exact():
        raise LocalsymError("divisor series needs an exact element")
    ctx = tw.ctx
    n = -t.ord()
    u = t.shift(n)
    if n < 0:
        u = _unit_inverse(u, max(tw.M, 1) + 1)
    deg = ctx.q ** abs(n)
    if deg >= tw.prec:
        raise PrecisionExhausted("norm of t exceeds the tower horizon")
    S = path_series(tw, tw.M, u)
    body = {}
    if n >= 0:
        body[(deg, 0)] = 1
        for e, c in S.coeffs.items():
            body[(0, e)] = ctx.neg(c)
    else:
        body[(0, deg)] = 1
        for e, c in S.coeffs.items():
            body[(e, 0)] = ctx.neg(c)
    return BivariateSeries.make(ctx, 0, 0, body, tw.prec)


def _z_divisor(tw, n, u):
    """Unit-normalized divisor for t = u*pi^{-n}, n >= 0, as a Y-
    distinguished Weierstrass divisor of degree 1."""
    ctx = tw.ctx
    S = path_series(tw, tw.M, u)
    su = S.shift(-1).inv()
    deg = ctx.q ** n
    body = {(0, 1): 1}
    for e, c in su.coeffs.items():
        body[(deg, e)] = ctx.neg(c)
    return BivariateSeries(ctx, 0, 0, body, deg + su.prec)


def z_divide_out(F, tw, t):
    """Multiplicity of the divisor series of t in F, with the cofactor.

    Returns (ell, C) where F = Z_t^ell * C up to prefactors and a unit,
    and C is no longer divisible by Z_t.  Norms below one run through
    the dagger, where the divisor becomes distinguished.
    """
    if t.is_zero():
        raise DivisionByZero("no divisor series at zero")
    if not t.is_exact():
        raise LocalsymError("divisor valuation needs an exact element")
    n = -t.ord()
    if n < 0:
        uinv = _unit_inverse(t.shift(-t.ord()), max(tw.M, 1) + 1)
        ell, cof = z_divide_out(F.dagger(), tw, uinv.shift(-t.ord()))
        return ell, cof.dagger()
    if F.is_zero():
        raise ZeroToPrecision("zero to horizon divides everything")
    if tw.ctx.q ** n >= tw.prec:
        raise PrecisionExhausted("norm of t exceeds the tower horizon")
    W = _z_divisor(tw, n, t.shift(n))
    cur = BivariateSeries.make(F.ctx, 0, 0, F.body, F.D)
    ell = 0
    while True:
        quo, rem = weierstrass_divide(cur, W)
        if not rem.is_zero():
            return ell, BivariateSeries.make(F.ctx, F.muX + cur.muX,
                                             F.muY + cur.muY, cur.body, cur.D)
        if quo.is_zero():
            raise ZeroToPrecision("divisor multiplicity exceeds the horizon")
        cur = quo
        ell += 1


def z_valuation(F, tw, t):
    """Multiplicity of the divisor series of t in F."""
    return z_divide_out(F, tw, t)[0]


def p_root_biv(F):
    """The p-th root when one exists below the horizon, else None.

    Char-p roots are cellwise: all exponents (prefactors included) must
    be divisible by p and each coefficient maps through the inverse
    Frobenius.
    """
    ctx = F.ctx
    p = ctx.p
    D = -(-F.D // p)
    if F.is_zero():
        return BivariateSeries.zero(ctx, D)
    if F.muX % p or F.muY % p:
        return None
    body = {}
    for (i, j), c in F.body.items():
        if i % p or j % p:
            return None
        body[(i // p, j // p)] = ctx.frobenius(c, -1)
    return BivariateSeries.make(ctx, F.muX // p, F.muY // p, body, D)
