"""Rigged virtual lattices: Z[1/p]-combinations of primitives
coef * 1_{ell+L} (x) 1_{w+rO}, with lower-star evaluation, scaling, the
rational Fourier transform, exact zero-function certification, and the
classification predicates.

The transform of a primitive has a closed form with an additive-character
weight e0(-ell*x + w*y); the weight is re-expanded into plain primitives by
splitting the dual lattice into level sets of x -> tr Res(-ell*x*omega) and
the dual ball into sub-balls on which y -> tr Res(w*y*omega) is constant.
"""

from fractions import Fraction

from .errors import LocalsymError, NotPiRegular
from .gf import lambda0
from .lattice import as_fraction, tail_lattice
from .localfield import (FieldElement, LaurentFraction, mu_ball,
                         require_p_fraction)


def _norm(ctx, v):
    """||v|| = q^(-ord v) as an exact Fraction."""
    n = v.ord() if not isinstance(v, int) else v
    q = ctx.q
    return Fraction(1, q ** n) if n >= 0 else Fraction(q ** (-n))


class Primitive:
    """coef * 1_{ell+L} (x) 1_{w + pi^(ord r) O}."""

    __slots__ = ("coef", "ell", "lattice", "w", "r")

    def __init__(self, coef, ell, lattice, w, r):
        ctx = lattice.ctx
        self.coef = Fraction(coef)
        require_p_fraction(self.coef, ctx.p)
        self.ell = as_fraction(ell)
        self.lattice = lattice
        self.w = as_fraction(w)
        if isinstance(r, LaurentFraction):
            raise LocalsymError("ball radius must be an exact element")
        if r.is_zero():
            raise LocalsymError("ball radius must be nonzero")
        self.r = r

    @property
    def ball_ord(self):
        return self.r.ord()

    def supports_x(self, x):
        return self.lattice.coset_member(self.ell, x)

    def supports_y(self, y):
        diff = as_fraction(y).sub(self.w)
        return diff.is_zero() or diff.ord() >= self.ball_ord

    def same_support(self, other):
        if self.ball_ord != other.ball_ord:
            return False
        if not self.supports_y(other.w):
            return False
        if not self.lattice.same_lattice(other.lattice):
            return False
        return self.lattice.member(self.ell.sub(other.ell))

    def with_coef(self, coef):
        return Primitive(coef, self.ell, self.lattice, self.w, self.r)

    def __repr__(self):
        from .literals import rvl_str
        return rvl_str(VirtualLattice(self.lattice.ctx, (self,)))


class VirtualLattice:
    """A finite Z[1/p]-combination of primitives, kept merged."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms=()):
        self.ctx = ctx
        merged = []
        for t in terms:
            for i, s in enumerate(merged):
                if s.same_support(t):
                    ncoef = s.coef + t.coef
                    if ncoef:
                        merged[i] = s.with_coef(ncoef)
                    else:
                        del merged[i]
                    break
            else:
                if t.coef:
                    merged.append(t)
        self.terms = tuple(merged)

    @staticmethod
    def zero(ctx):
        return VirtualLattice(ctx, ())

    def is_zero_combination(self):
        return not self.terms

    def add(self, other):
        return VirtualLattice(self.ctx, self.terms + other.terms)

    def neg(self):
        return VirtualLattice(
            self.ctx, [t.with_coef(-t.coef) for t in self.terms])

    def sub(self, other):
        return self.add(other.neg())

    def scale_coef(self, f):
        f = Fraction(f)
        if not f:
            return VirtualLattice.zero(self.ctx)
        return VirtualLattice(
            self.ctx, [t.with_coef(t.coef * f) for t in self.terms])

    def scale(self, b, c):
        """Phi^{(b,c)}: (Phi^{(b,c)})_*(x,y) = ||b|| Phi_*(x/b, y/c)."""
        if b.is_zero() or c.is_zero():
            raise LocalsymError("scaling parameters must be nonzero")
        nb = _norm(self.ctx, b)
        out = []
        for t in self.terms:
            out.append(Primitive(
                t.coef * nb,
                t.ell.mul(as_fraction(b)),
                t.lattice.rescale(b),
                t.w.mul(as_fraction(c)),
                c * t.r))
        return VirtualLattice(self.ctx, out)

    def lower_star(self, x, y):
        total = Fraction(0)
        for t in self.terms:
            if t.supports_x(x) and t.supports_y(y):
                total += t.coef
        return total

    def __repr__(self):
        from .literals import rvl_str
        return rvl_str(self)


def sample_vl(ctx, t):
    """The elementary pair 1_{t + T_0} (x) 1_{t + O} used throughout."""
    t = as_fraction(t)
    return VirtualLattice(ctx, (Primitive(
        1, t, tail_lattice(ctx, 0), t, FieldElement.one(ctx)),))


# ---------------------------------------------------------------------------
# rational Fourier transform

_EXPANSION_CAP = 1 << 14


def g0_transform(vl, omega):
    """G0[Phi] as a plain virtual lattice.

    Per primitive: support moves to L-dual x (w + r O)-dual, the weight
    e0(-ell*x + w*y) splits into level sets (x side: dual-lattice kernel;
    y side: sub-balls), and the coefficient picks up mu(rO)/mu(k/L).
    """
    ctx = vl.ctx
    p = ctx.p
    out = []
    for t in vl.terms:
        D = t.lattice.dual(omega)
        ratio = mu_ball(ctx, t.ball_ord, omega).div(
            t.lattice.covolume(omega))
        mu_ratio = t.coef * ratio.as_fraction()
        require_p_fraction(mu_ratio, p)
        K, translates = D.level_sets(t.ell.neg(), omega)
        ball_lo = -t.ball_ord - omega.ord()
        if t.w.is_zero():
            y_parts = [(LaurentFraction(FieldElement.zero(ctx)), 0, ball_lo)]
        else:
            split_hi = -(t.w.ord() + omega.ord())
            if split_hi <= ball_lo:
                y_parts = [(LaurentFraction(FieldElement.zero(ctx)), 0,
                            ball_lo)]
            else:
                if ctx.q ** (split_hi - ball_lo) > _EXPANSION_CAP:
                    raise LocalsymError("transform ball split too large")
                y_parts = []
                wu = t.w.mul(LaurentFraction(omega.u))
                for code in range(ctx.q ** (split_hi - ball_lo)):
                    cc = code
                    coeffs = {}
                    for e in range(ball_lo, split_hi):
                        cv = cc % ctx.q
                        cc //= ctx.q
                        if cv:
                            coeffs[e] = cv
                    y0 = FieldElement(ctx, coeffs)
                    if y0.is_zero():
                        val = 0
                    else:
                        res = wu.mul(LaurentFraction(y0)).expand(0)
                        val = ctx.trace(res.coefficient(-1))
                    y_parts.append((LaurentFraction(y0), val, split_hi))
        for tau1, tr_x in translates.items():
            for y0, tau2, rad in y_parts:
                lam = lambda0(p, (tau1 + tau2) % p)
                if not lam:
                    continue
                out.append(Primitive(
                    mu_ratio * lam, tr_x, K, y0,
                    FieldElement.pi_power(ctx, rad)))
    return VirtualLattice(ctx, out)


def rt_square_residual(vl, omega):
    """p * G0^2[Phi] - Phi - sum over C in F_p^x of Phi^{(C,C)}.

    Zero as a function exactly when the squaring rule holds.
    """
    ctx = vl.ctx
    lhs = g0_transform(g0_transform(vl, omega), omega).scale_coef(ctx.p)
    rhs = vl
    for c in range(1, ctx.p):
        # Phi_*(Cx, Cy) = (Phi^{(1/C, 1/C)})_* since ||C|| = 1
        cinv = FieldElement.constant(ctx, ctx.inv(c))
        rhs = rhs.add(vl.scale(cinv, cinv))
    return lhs.sub(rhs)


# ---------------------------------------------------------------------------
# exact zero-function and attainable-value analysis

def _x_window_depth(terms):
    """A ball pi^(-M0) O that meets every attainable membership pattern.

    Every lattice contains num*T_{m + deg den}; the product N of the distinct
    numerators gives a common sublattice N*T_J under which patterns are
    invariant, and greedy reduction brings any point to ord >= ord N - J.
    """
    seen = {}
    for t in terms:
        seen[t.lattice.scale.num.key()] = t.lattice.scale.num
    nums = list(seen.values())
    ctx = terms[0].lattice.ctx
    N = FieldElement.one(ctx)
    for n in nums:
        N = N * n
    topN = N.max_exp()
    J = None
    for t in terms:
        num = t.lattice.scale.num
        den = t.lattice.scale.den
        cand = t.lattice.tail + den.max_exp() + (topN - num.max_exp())
        J = cand if J is None else max(J, cand)
    return max(0, J - N.ord() + 1)


def _x_representatives(terms):
    depth = _x_window_depth(terms)
    ctx = terms[0].lattice.ctx
    zero = FieldElement.zero(ctx)
    reps = {}
    for t in terms:
        n = t.lattice.count_in_ball(t.ell, zero, -depth)
        if n > _EXPANSION_CAP:
            raise LocalsymError("zero-function window too large")
        for x in t.lattice.points_in_ball(t.ell, zero, -depth):
            reps.setdefault(x.key(), x)
    return list(reps.values())


def _y_representatives(ctx, active):
    """Coset reps refining every ball of the active primitives."""
    s_max = max(t.ball_ord for t in active)
    reps = {}
    for t in active:
        span = s_max - t.ball_ord
        if ctx.q ** span > _EXPANSION_CAP:
            raise LocalsymError("zero-function ball split too large")
        for code in range(ctx.q ** span):
            cc = code
            coeffs = {}
            for e in range(t.ball_ord, s_max):
                cv = cc % ctx.q
                cc //= ctx.q
                if cv:
                    coeffs[e] = cv
            y = t.w.add(LaurentFraction(FieldElement(ctx, coeffs)))
            reps.setdefault(y.key(), y)
    return list(reps.values())


def attainable_values(vl):
    """Every value attained by Phi_* on k x k (exact, including 0)."""
    if not vl.terms:
        return {Fraction(0)}
    ctx = vl.ctx
    values = {Fraction(0)}
    for x in _x_representatives(vl.terms):
        active = [t for t in vl.terms if t.supports_x(x)]
        if not active:
            continue
        for y in _y_representatives(ctx, active):
            values.add(sum((t.coef for t in active if t.supports_y(y)),
                           Fraction(0)))
    return values


def is_zero_function(vl):
    """Does Phi_* vanish identically?  Exact."""
    if not vl.terms:
        return True
    ctx = vl.ctx
    for x in _x_representatives(vl.terms):
        active = [t for t in vl.terms if t.supports_x(x)]
        if not active:
            continue
        for y in _y_representatives(ctx, active):
            if sum((t.coef for t in active if t.supports_y(y)), Fraction(0)):
                return False
    return True


def x_slice_is_zero(vl, x):
    """Does y -> Phi_*(x, y) vanish identically?  Exact."""
    active = [t for t in vl.terms if t.supports_x(x)]
    if not active:
        return True
    for y in _y_representatives(vl.ctx, active):
        if sum((t.coef for t in active if t.supports_y(y)), Fraction(0)):
            return False
    return True


# ---------------------------------------------------------------------------
# classification

def theta_window(vl, omega, transformed=None):
    """(lo, hi, s_c): counting window and unit constancy radius.

    For ord a >= hi the theta symbol equals Phi_*(0,0); for ord a <= lo it
    equals ||a||*G0[Phi]_*(0,0); on a fixed shell it only depends on
    a mod 1 + pi^(s_c) O.
    """
    if transformed is None:
        transformed = g0_transform(vl, omega)
    hi = _small_side_threshold(vl)
    lo = -_small_side_threshold(transformed)
    s_c = 1
    for t in vl.terms:
        if not t.w.is_zero():
            s_c = max(s_c, t.ball_ord - t.w.ord())
    return lo, hi, s_c


def _small_side_threshold(vl):
    """Least h with: ord a >= h forces the count down to the origin term.

    A nonzero point of ell + L inside the ball a*w + pi^(ord a + ord r) O
    has ord at least ord a + min(ord w, ord r), so it is ruled out once
    ord a clears the largest ord the coset can reach.
    """
    h = 0
    for t in vl.terms:
        B = t.lattice.max_ord_in_coset(t.ell)
        low = t.ball_ord if t.w.is_zero() else min(t.ball_ord, t.w.ord())
        h = max(h, B - low + 1)
    return h


def classify(vl, omega):
    """Exact predicate record for a virtual lattice.

    Keys: proper, effective, separable, soft, theta_window.
    """
    from .symbols import theta, unit_representatives

    ctx = vl.ctx
    zero = FieldElement.zero(ctx)
    transformed = g0_transform(vl, omega)
    at_origin = vl.lower_star(zero, zero)
    dual_at_origin = transformed.lower_star(zero, zero)
    lo, hi, s_c = theta_window(vl, omega, transformed)
    thetas = []
    for n in range(lo, hi + 1):
        for u in unit_representatives(ctx, s_c):
            a = FieldElement.pi_power(ctx, n) * u
            thetas.append(theta(vl, a))
    effective = (all(v >= 0 for v in thetas)
                 and at_origin >= 0 and dual_at_origin >= 0)
    soft = (all(v == 0 for v in thetas)
            and at_origin == 0 and dual_at_origin == 0
            and x_slice_is_zero(vl, zero)
            and x_slice_is_zero(transformed, zero))
    separable = (all(v.denominator == 1 for v in attainable_values(vl))
                 and all(v.denominator == 1
                         for v in attainable_values(transformed)))
    return {
        "proper": at_origin == 0 and dual_at_origin == 0,
        "effective": effective,
        "separable": separable,
        "soft": soft,
        "theta_window": (lo, hi, s_c),
    }


# ---------------------------------------------------------------------------
# pi-regular decomposition

def floor_part(x):
    """The O-part (exponents >= 0) of an exact Laurent polynomial."""
    return FieldElement(x.ctx, {e: c for e, c in x.coeffs.items() if e >= 0})


def tail_part(x):
    """The T_0-part (exponents < 0) of an exact Laurent polynomial."""
    return FieldElement(x.ctx, {e: c for e, c in x.coeffs.items() if e < 0})


def pi_regular_decompose(vl, level):
    """Write Phi as sum of coef * Psi_t^{(pi^i, pi^j)} with ||t|| <= q^level.

    Psi_t is sample_vl's primitive.  Each lattice must contain a full tail
    pi^(-N) F_q[pi^(-1)]; in normal form that means a monomial scale
    numerator (denominators are fine).  The remaining constraint is
    ||w/r|| <= q^level per primitive.  Translates t are returned as exact
    fractions; their integer parts have infinite expansions whenever the
    scale has a nontrivial denominator.
    """
    ctx = vl.ctx
    zero = FieldElement.zero(ctx)
    out = []
    for t in vl.terms:
        sc = t.lattice.scale
        if not sc.num.is_monomial():
            raise NotPiRegular("lattice has no full tail component")
        j = t.ball_ord
        if not t.w.is_zero() and t.w.ord() - j < -level:
            raise NotPiRegular("ball center too large for the level")
        w_digits = t.w.expand(j)
        w_tail = FieldElement(
            ctx, {e - j: c for e, c in w_digits.coeffs.items()})
        # smallest full tail: T_N with N = tail + deg den - ord num
        N = t.lattice.tail + sc.den.max_exp() - sc.num.ord()
        i = -N
        coef = t.coef * Fraction(ctx.q) ** i
        if t.lattice.count_in_ball(zero, zero, -N) > _EXPANSION_CAP:
            raise LocalsymError("decomposition span too large")
        for x in t.lattice.points_in_ball(zero, zero, -N):
            full = t.ell.add(x).mul(
                as_fraction(FieldElement.pi_power(ctx, N)))
            tail_x = FieldElement(ctx, dict(full.expand(0).coeffs))
            tt = full.sub(tail_x).add(w_tail)
            if not tt.is_zero() and tt.ord() < -level:
                raise NotPiRegular("parameter exceeds the requested level")
            out.append((coef, tt, i, j))
    return out


def assemble_from_decomposition(ctx, parts):
    """Rebuild the virtual lattice sum coef * Psi_t^{(pi^i, pi^j)}."""
    total = VirtualLattice.zero(ctx)
    for coef, t, i, j in parts:
        piece = sample_vl(ctx, t).scale(
            FieldElement.pi_power(ctx, i), FieldElement.pi_power(ctx, j))
        total = total.add(piece.scale_coef(coef))
    return total
