"""Theta and Catalan symbols of rigged virtual lattices.

Both symbols reduce, per primitive, to the lattice points in one ball:
theta counts them, the Catalan symbol multiplies them.  The rest of the
module integrates locally constant functions against the multiplicative
Haar measure and uses that to check the Stirling formula, whose two
sides are computed by unrelated routes (point enumeration vs shell
quadrature) and compared exactly.
"""

from fractions import Fraction

from .errors import LocalsymError, RefinementDiverged, SupportNotDeclared
from .lattice import as_fraction
from .localfield import (
    FieldElement,
    PerfectElement,
    PerfectFraction,
    sign_power,
)
from .rvl import g0_transform, theta_window

_PRODUCT_CAP = 1 << 14


def unit_representatives(ctx, s):
    """Representatives of O^x modulo 1 + pi^s O (s >= 1)."""
    if s < 1:
        raise LocalsymError("constancy radius must be >= 1")
    reps = []
    for lead in range(1, ctx.q):
        for rest in range(ctx.q ** (s - 1)):
            coeffs = {0: lead}
            rr = rest
            for e in range(1, s):
                cv = rr % ctx.q
                rr //= ctx.q
                if cv:
                    coeffs[e] = cv
            reps.append(FieldElement(ctx, coeffs))
    return reps


def theta(vl, a):
    """Theta(a, Phi) = sum over x of Phi_*(x, x/a), an exact Z[1/p] value.

    Per primitive this is the number of points of ell + L in the ball
    a*w + pi^(ord a + ord r) O.
    """
    a = as_fraction(a)
    if a.is_zero():
        raise LocalsymError("theta needs a nonzero argument")
    total = Fraction(0)
    for t in vl.terms:
        count = t.lattice.count_in_ball(
            t.ell, t.w.mul(a), a.ord() + t.ball_ord)
        total += t.coef * count
    return total


def theta_functional_equation_check(vl, a, omega):
    """Does Theta(a, Phi) = ||a|| * Theta(1/a, G0[Phi]) hold?  Exact."""
    a = as_fraction(a)
    norm_a = Fraction(vl.ctx.q) ** (-a.ord())
    return theta(vl, a) == norm_a * theta(g0_transform(vl, omega), a.inv())


def partial_catalan(vl, a):
    """(a, Phi)_+: product over nonzero x of x^(Phi_*(x, x/a)).

    Runs over the same per-primitive point sets that theta counts; each
    point enters with exponent coef, so the value lives in the perfect
    closure (p-th roots appear whenever coef does not clear p).
    """
    a = as_fraction(a)
    if a.is_zero():
        raise LocalsymError("catalan needs a nonzero argument")
    out = PerfectFraction.one(vl.ctx)
    for t in vl.terms:
        radius = a.ord() + t.ball_ord
        if t.lattice.count_in_ball(t.ell, t.w.mul(a), radius) > _PRODUCT_CAP:
            raise LocalsymError("catalan product span too large")
        for x in t.lattice.points_in_ball(t.ell, t.w.mul(a), radius):
            if x.is_zero():
                continue
            factor = PerfectFraction(PerfectElement.from_field(x.num),
                                     PerfectElement.from_field(x.den))
            out = out.mul(factor.pow_fraction(t.coef))
    return out


def catalan(vl, a, omega):
    """The full symbol (a, Phi)_+ * (1/a, G0[Phi])_+^||a||."""
    a = as_fraction(a)
    plus = partial_catalan(vl, a)
    dual = partial_catalan(g0_transform(vl, omega), a.inv())
    return plus.mul(dual.pow_fraction(Fraction(vl.ctx.q) ** (-a.ord())))


def catalan_functional_equation_check(vl, a, omega):
    """Does (1/a, G0[Phi])^||a|| = (-1)^(Theta(a,Phi)-Phi_*(0,0)) (a, Phi)?

    Written out, both sides carry the same nonzero partial-symbol factor
    (1/a, G0[Phi])_+^||a||; cancelling it leaves the equivalent statement
    (a, G0^2[Phi])_+ = sign * (a, Phi)_+, which avoids building ||a||-th
    powers of large products.
    """
    a = as_fraction(a)
    ctx = vl.ctx
    transformed = g0_transform(vl, omega)
    lhs = partial_catalan(g0_transform(transformed, omega), a)
    rhs = partial_catalan(vl, a)
    zero = FieldElement.zero(ctx)
    if sign_power(ctx, theta(vl, a) - vl.lower_star(zero, zero)) < 0:
        rhs = rhs.neg()
    return lhs.agrees(rhs)


# ---------------------------------------------------------------------------
# multiplicative-measure quadrature

def mu_times_integrate(ctx, f, support, radius, singular_at_one=False):
    """Integrate an exact locally constant f over k^x, mu^x(O^x) = 1.

    ``support`` is the inclusive range (lo, hi) of shell orders where f
    may be nonzero and ``radius`` the declared constancy exponent s, so
    each shell splits into (q-1) q^(s-1) cosets t0 (1 + pi^s O) of
    measure 1/((q-1) q^(s-1)) each.  Both declarations are spot-checked:
    one probe beyond either end of the window, and one refined probe per
    coset.  With ``singular_at_one`` the coset of 1 is never evaluated at
    its center; it must instead vanish at refined probes, which is how a
    removable singularity at t = 1 is certified and dropped.
    """
    if support is None:
        raise SupportNotDeclared("integrand has no declared support window")
    lo, hi = support
    if radius < 1:
        raise LocalsymError("constancy radius must be >= 1")
    one = FieldElement.one(ctx)
    for n in (lo - 1, hi + 1):
        if f(FieldElement.pi_power(ctx, n)) != 0:
            raise SupportNotDeclared("nonzero value outside declared window")
    reps = unit_representatives(ctx, radius)
    coset_measure = Fraction(1, (ctx.q - 1) * ctx.q ** (radius - 1))
    refine = one + FieldElement.pi_power(ctx, radius)
    total = Fraction(0)
    for n in range(lo, hi + 1):
        shell = FieldElement.pi_power(ctx, n)
        for rep in reps:
            t0 = rep * shell
            if singular_at_one and n == 0 and (rep - one).is_zero():
                for j in range(3):
                    probe = one + FieldElement.pi_power(ctx, radius + j)
                    if f(probe) != 0:
                        raise RefinementDiverged(
                            "singular coset does not vanish near its center")
                continue
            value = f(t0)
            if f(t0 * refine) != value:
                raise RefinementDiverged("integrand varies inside a coset")
            total += value * coset_measure
    return total


# ---------------------------------------------------------------------------
# the Stirling formula

def _norm_one_minus(ctx, t):
    """||1 - t|| for exact t != 1."""
    n = t.ord()
    if n != 0:
        return Fraction(ctx.q) ** max(0, -n)
    diff = FieldElement.one(ctx) - t
    if diff.is_zero():
        raise LocalsymError("integrand evaluated at t = 1")
    return Fraction(ctx.q) ** (-diff.ord())


def _y_slice_window(vl):
    """Support shells and constancy radius for t -> Phi_*(0, t)."""
    lo, hi = 0, 0
    for t in vl.terms:
        lo = min(lo, t.ball_ord if t.w.is_zero()
                 else min(t.w.ord(), t.ball_ord))
        hi = max(hi, t.ball_ord)
    return lo, hi, max(1, hi - lo)


def stirling_check(vl, a, omega, mode="simplified"):
    """Evaluate both sides of the Stirling formula, exactly.

    Left side: Theta(a, Phi) ord(omega) + ord of the Catalan symbol; the
    symbol's ord already carries the two ord-weighted point sums of the
    full statement.  Right side: shell quadrature of the theta integrand
    (three-case bracket aligned to shells, removable coset at t = 1) plus
    the two y-slice integrals; full mode adds the origin-value
    corrections so non-proper inputs work too.  Returns a record with
    lhs, rhs and their exact comparison.
    """
    ctx = vl.ctx
    a = as_fraction(a)
    if a.is_zero():
        raise LocalsymError("stirling check needs a nonzero argument")
    if mode not in ("simplified", "full"):
        raise LocalsymError("mode must be 'simplified' or 'full'")
    transformed = g0_transform(vl, omega)
    zero = FieldElement.zero(ctx)
    phi00 = vl.lower_star(zero, zero)
    dual00 = transformed.lower_star(zero, zero)
    if mode == "simplified" and (phi00 != 0 or dual00 != 0):
        raise LocalsymError("simplified mode needs a proper virtual lattice")
    lo, hi, s_c = theta_window(vl, omega, transformed)
    theta_a = theta(vl, a)
    da = a.ord()
    norm_a = Fraction(ctx.q) ** (-da)
    lhs = theta_a * omega.ord() + catalan(vl, a, omega).ord()

    def bracket(n):
        if n == 0:
            return theta_a
        if mode == "simplified":
            return Fraction(0)
        return Fraction(ctx.q) ** (-da - n) * dual00 if n < 0 else phi00

    def theta_part(t):
        num = theta(vl, a.mul(as_fraction(t))) - bracket(t.ord())
        return num / _norm_one_minus(ctx, t)

    rhs = mu_times_integrate(
        ctx, theta_part, (min(lo - da, 0), max(hi - da, 0)), s_c,
        singular_at_one=True)

    def slice_integral(side, origin):
        w_lo, w_hi, w_s = _y_slice_window(side)

        def f(t):
            value = side.lower_star(zero, as_fraction(t))
            if mode == "full" and t.ord() >= 0:
                value -= origin
            return value

        return mu_times_integrate(ctx, f, (w_lo, w_hi), w_s)

    rhs += slice_integral(vl, phi00)
    rhs += norm_a * slice_integral(transformed, dual00)
    if mode == "full":
        rhs += (norm_a * dual00 - phi00) * da
    return {"lhs": lhs, "rhs": rhs, "equal": lhs == rhs}
