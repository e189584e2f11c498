"""The local field k = F_q((pi)) and friends.

FieldElement is a truncated Laurent series: a sparse dict of nonzero F_q
codes keyed by exponent, plus a precision horizon (None means the element
is a finite Laurent polynomial known exactly; otherwise every stored
exponent is < prec and digits at exponent >= prec are unknown).

On top of that: exact fractions of Laurent polynomials (LaurentFraction),
the perfect closure obtained by adjoining p-power roots of pi
(PerfectElement / PerfectFraction), differentials, residues, the additive
weight e0, and Haar measure values with half-integer q-exponents.
"""

from fractions import Fraction

from .errors import (DivisionByZero, LocalsymError, NoConvergence,
                     NonIntegerExponent, NonRationalCoefficient,
                     PrecisionExhausted, ZeroToPrecision)
from .gf import lambda0


def _min_prec(*precs):
    known = [p for p in precs if p is not None]
    return min(known) if known else None


class FieldElement:
    """Truncated Laurent series over F_q."""

    __slots__ = ("ctx", "coeffs", "prec")

    def __init__(self, ctx, coeffs, prec=None):
        self.ctx = ctx
        if prec is None:
            cc = {e: c for e, c in coeffs.items() if c}
        else:
            cc = {e: c for e, c in coeffs.items() if c and e < prec}
        self.coeffs = cc
        self.prec = prec

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(ctx):
        return FieldElement(ctx, {})

    @staticmethod
    def one(ctx):
        return FieldElement(ctx, {0: 1})

    @staticmethod
    def pi_power(ctx, n, coef=1):
        return FieldElement(ctx, {n: coef % ctx.q})

    @staticmethod
    def constant(ctx, code):
        return FieldElement(ctx, {0: code % ctx.q})

    # -- structure ----------------------------------------------------

    def is_zero(self):
        """True when no known coefficient is nonzero (exact or to precision)."""
        return not self.coeffs

    def is_exact(self):
        return self.prec is None

    def ord(self):
        if not self.coeffs:
            if self.prec is None:
                raise LocalsymError("ord of exact zero")
            raise ZeroToPrecision("zero to precision %d, ord unknown" % self.prec)
        return min(self.coeffs)

    def ord_lower_bound(self):
        if self.coeffs:
            return min(self.coeffs)
        return self.prec  # None means genuinely zero: no finite bound needed

    def leading(self):
        return self.coeffs[self.ord()]

    def coefficient(self, e):
        if self.prec is not None and e >= self.prec:
            raise PrecisionExhausted("coefficient at pi^%d beyond horizon %d" % (e, self.prec))
        return self.coeffs.get(e, 0)

    def support(self):
        return sorted(self.coeffs)

    def max_exp(self):
        """Largest exponent with a nonzero coefficient (exact elements only)."""
        if self.prec is not None:
            raise LocalsymError("max_exp needs an exact element")
        if not self.coeffs:
            raise LocalsymError("max_exp of zero")
        return max(self.coeffs)

    def is_monomial(self):
        return self.prec is None and len(self.coeffs) == 1

    def is_unit_scalar(self):
        return self.prec is None and self.coeffs == {0: 1}

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        assert self.ctx == other.ctx
        prec = _min_prec(self.prec, other.prec)
        cc = dict(self.coeffs)
        add = self.ctx.add
        for e, c in other.coeffs.items():
            r = add(cc.get(e, 0), c)
            if r:
                cc[e] = r
            elif e in cc:
                del cc[e]
        return FieldElement(self.ctx, cc, prec)

    def __neg__(self):
        neg = self.ctx.neg
        return FieldElement(self.ctx, {e: neg(c) for e, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        assert self.ctx == other.ctx
        ctx = self.ctx
        if self.prec is None and not self.coeffs:
            return self
        if other.prec is None and not other.coeffs:
            return other
        cands = []
        if self.prec is not None:
            lb = other.ord_lower_bound()
            if lb is None:
                return FieldElement.zero(ctx)
            cands.append(self.prec + lb)
        if other.prec is not None:
            lb = self.ord_lower_bound()
            if lb is None:
                return FieldElement.zero(ctx)
            cands.append(other.prec + lb)
        prec = min(cands) if cands else None
        cc = {}
        add, mul = ctx.add, ctx.mul
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if prec is not None and e >= prec:
                    continue
                r = add(cc.get(e, 0), mul(c1, c2))
                if r:
                    cc[e] = r
                elif e in cc:
                    del cc[e]
        return FieldElement(ctx, cc, prec)

    def scale(self, code):
        """Multiply by an F_q scalar."""
        if code == 0:
            return FieldElement(self.ctx, {}, self.prec)
        mul = self.ctx.mul
        return FieldElement(self.ctx, {e: mul(c, code) for e, c in self.coeffs.items()}, self.prec)

    def int_scale(self, n):
        return self.scale(self.ctx.from_int(n))

    def shift(self, n):
        """Multiply by pi^n."""
        prec = None if self.prec is None else self.prec + n
        return FieldElement(self.ctx, {e + n: c for e, c in self.coeffs.items()}, prec)

    def truncate(self, prec):
        return FieldElement(self.ctx, self.coeffs, _min_prec(self.prec, prec))

    def with_exact(self):
        """Reinterpret the known digits as an exact polynomial (use with care)."""
        return FieldElement(self.ctx, self.coeffs, None)

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        r = FieldElement.one(self.ctx)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def pth_power(self, k=1):
        """x -> x^(p^k): exponents times p^k, coefficients Frobenius^k."""
        ctx = self.ctx
        pk = ctx.p ** k
        prec = None if self.prec is None else self.prec * pk
        return FieldElement(ctx, {e * pk: ctx.frobenius(c, k) for e, c in self.coeffs.items()}, prec)

    def frobenius_coeffs(self, k=1):
        """Apply Frobenius^k to coefficients only (k may be negative)."""
        ctx = self.ctx
        return FieldElement(ctx, {e: ctx.frobenius(c, k) for e, c in self.coeffs.items()}, self.prec)

    def inv(self, target_prec=None):
        """Multiplicative inverse as a (possibly truncated) series."""
        if not self.coeffs:
            raise DivisionByZero("inverse of zero" if self.prec is None else
                                 "inverse of zero-to-precision")
        v = self.ord()
        c0 = self.coeffs[v]
        ctx = self.ctx
        if self.is_monomial():
            out = FieldElement(ctx, {-v: ctx.inv(c0)})
            return out if target_prec is None else out.truncate(target_prec)
        if self.prec is None:
            if target_prec is None:
                raise PrecisionExhausted("inverse of a non-monomial needs a target precision")
            prec = target_prec
        else:
            natural = self.prec - 2 * v
            prec = natural if target_prec is None else min(natural, target_prec)
        # self = c0 pi^v (1 + e); invert 1 + e by geometric series
        window = prec + v  # relative precision needed for (1+e)^-1
        inv_lead = FieldElement(ctx, {-v: ctx.inv(c0)})
        e = ((self * inv_lead) - FieldElement.one(ctx)).truncate(window)
        acc = FieldElement.one(ctx).truncate(window)
        term = FieldElement.one(ctx).truncate(window)
        guard = 0
        while not term.is_zero():
            term = (-(term * e)).truncate(window)
            acc = acc + term
            guard += 1
            if guard > window + abs(v) + 64:
                raise NoConvergence("geometric inverse did not terminate")
        return (acc * inv_lead).truncate(prec)

    def divexact(self, other):
        """Exact quotient of finite Laurent polynomials; raises if inexact."""
        q, r = polydivmod(self, other)
        if not r.is_zero():
            raise LocalsymError("division is not exact")
        return q

    # -- comparisons ----------------------------------------------------

    def agrees(self, other):
        """Equal on every mutually known coefficient."""
        assert self.ctx == other.ctx
        prec = _min_prec(self.prec, other.prec)
        for e in set(self.coeffs) | set(other.coeffs):
            if prec is not None and e >= prec:
                continue
            if self.coeffs.get(e, 0) != other.coeffs.get(e, 0):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return (self.ctx == other.ctx and self.coeffs == other.coeffs
                and self.prec == other.prec)

    def __hash__(self):
        return hash((tuple(sorted(self.coeffs.items())), self.prec))

    def key(self):
        return tuple(sorted(self.coeffs.items()))

    def __repr__(self):
        from .literals import laurent_str
        s = laurent_str(self)
        if self.prec is not None:
            s += " + O(pi^%d)" % self.prec
        return s


def polydivmod(a, b):
    """Division of finite Laurent polynomials.

    Strips pi-orders so both sides are honest polynomials with nonzero
    constant term, divides, and shifts back: a = q*b + r with the degree of
    r's polynomial part below that of b.  b divides a exactly iff r = 0.
    """
    if a.prec is not None or b.prec is not None:
        raise LocalsymError("polydivmod needs exact operands")
    if b.is_zero():
        raise DivisionByZero("division by zero polynomial")
    ctx = a.ctx
    if a.is_zero():
        return (a, a)
    va, vb = a.ord(), b.ord()
    rem = {e - va: c for e, c in a.coeffs.items()}
    bb = {e - vb: c for e, c in b.coeffs.items()}
    deg_b = max(bb)
    lead_inv = ctx.inv(bb[deg_b])
    quo = {}
    mul, add, neg = ctx.mul, ctx.add, ctx.neg
    while rem:
        e = max(rem)
        if e < deg_b:
            break
        shift = e - deg_b
        qc = mul(rem[e], lead_inv)
        quo[shift] = qc
        for be, bc in bb.items():
            ee = be + shift
            r = add(rem.get(ee, 0), neg(mul(bc, qc)))
            if r:
                rem[ee] = r
            elif ee in rem:
                del rem[ee]
    q = FieldElement(ctx, {e + va - vb: c for e, c in quo.items()})
    r = FieldElement(ctx, {e + va: c for e, c in rem.items()})
    return (q, r)


class LaurentFraction:
    """Exact ratio num/den of finite Laurent polynomials, den != 0.

    Normalized so den has ord 0 and constant term 1; common polynomial
    factors are removed with a Euclidean pass when cheap.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        ctx = num.ctx
        if den is None:
            den = FieldElement.one(ctx)
        if num.prec is not None or den.prec is not None:
            raise LocalsymError("LaurentFraction needs exact parts")
        if den.is_zero():
            raise DivisionByZero("fraction with zero denominator")
        if not num.is_zero():
            g = _poly_gcd(num, den)
            if not g.is_monomial() or g.coeffs != {0: 1}:
                num = num.divexact(g)
                den = den.divexact(g)
        v = den.ord()
        c = den.coeffs[v]
        adjust = FieldElement(ctx, {-v: ctx.inv(c)})
        self.num = num * adjust
        self.den = den * adjust

    @staticmethod
    def one(ctx):
        return LaurentFraction(FieldElement.one(ctx))

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_unit_scalar()

    def as_polynomial(self):
        if not self.is_polynomial():
            raise LocalsymError("fraction is not a polynomial")
        return self.num

    def ord(self):
        return self.num.ord() - self.den.ord()

    def mul(self, other):
        if isinstance(other, FieldElement):
            other = LaurentFraction(other)
        return LaurentFraction(self.num * other.num, self.den * other.den)

    def div(self, other):
        if isinstance(other, FieldElement):
            other = LaurentFraction(other)
        if other.num.is_zero():
            raise DivisionByZero("division by zero fraction")
        return LaurentFraction(self.num * other.den, self.den * other.num)

    def inv(self):
        return LaurentFraction(FieldElement.one(self.num.ctx)).div(self)

    def add(self, other):
        if isinstance(other, FieldElement):
            other = LaurentFraction(other)
        return LaurentFraction(self.num * other.den + other.num * self.den,
                               self.den * other.den)

    def neg(self):
        return LaurentFraction(-self.num, self.den)

    def sub(self, other):
        if isinstance(other, FieldElement):
            other = LaurentFraction(other)
        return self.add(other.neg())

    def expand(self, prec):
        """Series expansion of num/den to the given horizon."""
        if self.num.is_zero():
            return FieldElement(self.num.ctx, {}, prec)
        inv = self.den.inv(prec - self.num.ord())
        return (self.num * inv).truncate(prec)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            other = LaurentFraction(other)
        if not isinstance(other, LaurentFraction):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num.key(), self.den.key()))

    def key(self):
        return (self.num.key(), self.den.key())

    def __repr__(self):
        if self.is_polynomial():
            return repr(self.num)
        return "(%r)/(%r)" % (self.num, self.den)


def laurent_fraction_str(fr):
    from .literals import laurent_str
    if fr.is_polynomial():
        return laurent_str(fr.num)
    return "%s/%s" % (laurent_str(fr.num), laurent_str(fr.den))


def _poly_gcd(a, b):
    """gcd of finite Laurent polynomials, up to a monomial unit."""
    ctx = a.ctx
    a = a.shift(-a.ord()) if not a.is_zero() else a
    b = b.shift(-b.ord()) if not b.is_zero() else b
    while not b.is_zero():
        _, r = polydivmod(a, b)
        a, b = b, (r.shift(-r.ord()) if not r.is_zero() else r)
    return a if not a.is_zero() else FieldElement.one(ctx)


# ---------------------------------------------------------------------------
# scalars in Z[1/p]


def is_p_fraction(x, p):
    den = Fraction(x).denominator
    while den % p == 0:
        den //= p
    return den == 1


def require_p_fraction(x, p, where="coefficient"):
    x = Fraction(x)
    if not is_p_fraction(x, p):
        raise NonRationalCoefficient("%s %s is not in Z[1/%d]" % (where, x, p))
    return x


def p_parts(x, p):
    """Write x = n / p^e with e >= 0 minimal; raises if x is not in Z[1/p]."""
    x = Fraction(x)
    e = 0
    den = x.denominator
    while den % p == 0:
        den //= p
        e += 1
    if den != 1:
        raise NonIntegerExponent("%s is not in Z[1/%d]" % (x, p))
    return (x.numerator, e)


# ---------------------------------------------------------------------------
# differentials, residues, e0


class Differential:
    """omega = u * dpi for an exact nonzero u."""

    __slots__ = ("u",)

    def __init__(self, u):
        if u.prec is not None or u.is_zero():
            raise LocalsymError("differential needs an exact nonzero u")
        self.u = u

    @staticmethod
    def dpi(ctx):
        return Differential(FieldElement.one(ctx))

    def ord(self):
        return self.u.ord()

    def rescale(self, v):
        """omega -> v * omega."""
        return Differential(self.u * v)

    def __eq__(self, other):
        return isinstance(other, Differential) and self.u == other.u

    def __repr__(self):
        return "(%r)*dpi" % (self.u,)


def residue(x, omega):
    """Res(x omega) in F_q: the pi^(-1) coefficient of x*u."""
    y = x * omega.u
    return y.coefficient(-1)


def e0_weight(x, omega):
    """lambda0 of the F_p-trace of Res(x omega); values in {1, -1, 0}."""
    ctx = x.ctx
    return lambda0(ctx.p, ctx.trace(residue(x, omega)))


# ---------------------------------------------------------------------------
# measures


class MeasureValue:
    """mantissa * q^(half/2) with mantissa a Fraction and half in {0, 1}."""

    __slots__ = ("q", "mantissa", "half")

    def __init__(self, q, mantissa, half=0):
        self.q = q
        k, r = divmod(half, 2)  # half = 2k + r, r in {0, 1}
        m = Fraction(mantissa)
        if k >= 0:
            m *= q ** k
        else:
            m /= q ** (-k)
        self.mantissa = m
        self.half = r

    def mul(self, other):
        assert self.q == other.q
        return MeasureValue(self.q, self.mantissa * other.mantissa, self.half + other.half)

    def div(self, other):
        assert self.q == other.q
        return MeasureValue(self.q, self.mantissa / other.mantissa, self.half - other.half)

    def scale(self, f):
        return MeasureValue(self.q, self.mantissa * Fraction(f), self.half)

    def as_fraction(self):
        if self.half:
            raise NonRationalCoefficient("measure value has a dangling sqrt(q)")
        return self.mantissa

    def __eq__(self, other):
        return (isinstance(other, MeasureValue) and self.q == other.q
                and self.mantissa == other.mantissa and self.half == other.half)

    def __repr__(self):
        if self.half:
            return "%s*sqrt(%d)" % (self.mantissa, self.q)
        return "%s" % (self.mantissa,)


def mu_ball(ctx, r_ord, omega):
    """mu(pi^r O) = q^(-r) * q^(-ord(omega)/2)."""
    return MeasureValue(ctx.q, 1, -2 * r_ord - omega.ord())


def mu_mult_unit_coset(ctx, s):
    """Multiplicative measure of t0(1 + pi^s O) for s >= 1; O^x has measure 1."""
    if s <= 0:
        return Fraction(1)
    q = ctx.q
    return Fraction(1, q ** s) / (1 - Fraction(1, q))


# ---------------------------------------------------------------------------
# perfect closure


class PerfectElement:
    """A FieldElement read in the variable pi^(1/p^depth)."""

    __slots__ = ("elem", "depth")

    def __init__(self, elem, depth=0):
        ctx = elem.ctx
        p = ctx.p
        # canonical: shrink depth while every exponent is a multiple of p.
        # For truncated elements the horizon rounds down; refuse the step if
        # that would drop a known coefficient.
        while depth > 0 and all(e % p == 0 for e in elem.coeffs):
            prec = None
            if elem.prec is not None:
                prec = elem.prec // p
                if any(e // p >= prec for e in elem.coeffs):
                    break
            elem = FieldElement(ctx, {e // p: c for e, c in elem.coeffs.items()}, prec)
            depth -= 1
        self.elem = elem
        self.depth = depth

    @staticmethod
    def from_field(x):
        return PerfectElement(x, 0)

    @staticmethod
    def one(ctx):
        return PerfectElement(FieldElement.one(ctx))

    def is_zero(self):
        return self.elem.is_zero()

    def ctx(self):
        return self.elem.ctx

    def raise_depth(self, k):
        """Same value, represented at depth + k."""
        pk = self.elem.ctx.p ** k
        prec = None if self.elem.prec is None else self.elem.prec * pk
        elem = FieldElement(self.elem.ctx,
                            {e * pk: c for e, c in self.elem.coeffs.items()}, prec)
        out = PerfectElement.__new__(PerfectElement)
        out.elem, out.depth = elem, self.depth + k
        return out

    def _common(self, other):
        d = max(self.depth, other.depth)
        return self.raise_depth(d - self.depth), other.raise_depth(d - other.depth), d

    def mul(self, other):
        a, b, d = self._common(other)
        return PerfectElement(a.elem * b.elem, d)

    def add(self, other):
        a, b, d = self._common(other)
        return PerfectElement(a.elem + b.elem, d)

    def neg(self):
        return PerfectElement(-self.elem, self.depth)

    def p_root(self, k=1):
        """Exact p^k-th root: inverse Frobenius on coefficients, depth + k."""
        return PerfectElement(self.elem.frobenius_coeffs(-k), self.depth + k)

    def int_pow(self, n):
        if n < 0:
            raise LocalsymError("negative power of a PerfectElement; use PerfectFraction")
        out = PerfectElement(FieldElement.one(self.elem.ctx), 0)
        b = self
        while n:
            if n & 1:
                out = out.mul(b)
            b = b.mul(b)
            n >>= 1
        return out

    def pow_fraction(self, s):
        """x^s for s in Z[1/p], s >= 0."""
        n, e = p_parts(s, self.elem.ctx.p)
        if n < 0:
            raise LocalsymError("negative power; use PerfectFraction")
        return self.int_pow(n).p_root(e) if e else self.int_pow(n)

    def ord(self):
        return Fraction(self.elem.ord(), self.elem.ctx.p ** self.depth)

    def is_exact(self):
        return self.elem.prec is None

    def agrees(self, other):
        a, b, _ = self._common(other)
        return a.elem.agrees(b.elem)

    def __eq__(self, other):
        if not isinstance(other, PerfectElement):
            return NotImplemented
        return self.depth == other.depth and self.elem == other.elem

    def __hash__(self):
        return hash((self.depth, self.elem.key(), self.elem.prec))

    def __repr__(self):
        if self.depth == 0:
            return repr(self.elem)
        return "depth<%d>[%r]" % (self.depth, self.elem)


class PerfectFraction:
    """num/den of perfect elements; comparisons cross-multiply, so exact
    inputs give exact checks with no series inversion."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = PerfectElement.one(num.elem.ctx)
        if den.is_zero():
            raise DivisionByZero("perfect fraction with zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def one(ctx):
        return PerfectFraction(PerfectElement.one(ctx))

    @staticmethod
    def from_field(x):
        return PerfectFraction(PerfectElement.from_field(x))

    def is_zero(self):
        return self.num.is_zero()

    def mul(self, other):
        return PerfectFraction(self.num.mul(other.num), self.den.mul(other.den))

    def div(self, other):
        if other.num.is_zero():
            raise DivisionByZero("division by zero perfect fraction")
        return PerfectFraction(self.num.mul(other.den), self.den.mul(other.num))

    def neg(self):
        return PerfectFraction(self.num.neg(), self.den)

    def pow_fraction(self, s):
        s = Fraction(s)
        if s < 0:
            return PerfectFraction(self.den.pow_fraction(-s), self.num.pow_fraction(-s))
        return PerfectFraction(self.num.pow_fraction(s), self.den.pow_fraction(s))

    def ord(self):
        if self.num.is_zero():
            raise LocalsymError("ord of zero value")
        return self.num.ord() - self.den.ord()

    def agrees(self, other):
        """Cross-multiplied agreement on all mutually known digits."""
        lhs = self.num.mul(other.den)
        rhs = other.num.mul(self.den)
        return lhs.agrees(rhs)

    def evaluate(self, prec):
        """Collapse to a single PerfectElement at the given pi-precision."""
        d = max(self.num.depth, self.den.depth)
        num = self.num.raise_depth(d - self.num.depth).elem
        den = self.den.raise_depth(d - self.den.depth).elem
        pd = num.ctx.p ** d
        tprec = prec * pd
        if num.is_zero():
            return PerfectElement(num.truncate(tprec), d)
        inv = den.inv(tprec - num.ord())
        return PerfectElement((num * inv).truncate(tprec), d)

    def __repr__(self):
        if self.den == PerfectElement.one(self.num.elem.ctx):
            return repr(self.num)
        return "(%r)/(%r)" % (self.num, self.den)


def sign_power(ctx, s):
    """(-1)^s for s in Z[1/p]: in char 2 this is 1; for odd p the p-power
    roots of -1 equal -1, so only the numerator's parity matters."""
    if ctx.p == 2:
        return 1
    n, _ = p_parts(s, ctx.p)
    return -1 if n % 2 else 1
