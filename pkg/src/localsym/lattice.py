"""Normal-form lattices in k = F_q((pi)).

A lattice is stored as  scale * (span_Fp(gens) + T_m)  where T_m is the set
of finite F_q-combinations of pi^(-i) for i > m, the generators are exact
Laurent polynomials supported at exponents >= -m and F_p-independent modulo
T_m, and scale is an exact fraction of Laurent polynomials (denominator a
unit of O with constant term 1).

Membership, counting, enumeration, duality and level-set questions all
reduce to F_p-linear systems over finite exponent windows; tail directions
below each window are free and are accounted for in closed form.  Points of
a lattice with a non-trivial scale denominator are not Laurent polynomials,
so enumeration yields exact LaurentFraction values.
"""

from fractions import Fraction

from .errors import InvalidLattice, LocalsymError
from .localfield import FieldElement, LaurentFraction, MeasureValue


# ---------------------------------------------------------------------------
# F_p linear algebra over hashable column keys

def fp_rref(p, rows):
    """Reduced row echelon form over F_p.

    rows: iterable of (dict col -> coef, rhs).  Returns (pivots, inconsistent)
    where pivots is a list of (pivot col, row dict, rhs) in fully reduced form.
    """
    pivots = []
    for row, rhs in rows:
        row = {k: v % p for k, v in row.items() if v % p}
        rhs = rhs % p
        for col, prow, prhs in pivots:
            c = row.get(col)
            if c:
                for k, v in prow.items():
                    nv = (row.get(k, 0) - c * v) % p
                    if nv:
                        row[k] = nv
                    elif k in row:
                        del row[k]
                rhs = (rhs - c * prhs) % p
        if not row:
            if rhs:
                return pivots, True
            continue
        col = min(row)
        inv = pow(row[col], p - 2, p) if p > 2 else 1
        row = {k: (v * inv) % p for k, v in row.items()}
        rhs = (rhs * inv) % p
        for i, (c0, r0, b0) in enumerate(pivots):
            c = r0.get(col)
            if c:
                for k, v in row.items():
                    nv = (r0.get(k, 0) - c * v) % p
                    if nv:
                        r0[k] = nv
                    elif k in r0:
                        del r0[k]
                pivots[i] = (c0, r0, (b0 - c * rhs) % p)
        pivots.append((col, row, rhs))
    return pivots, False


def fp_solve(p, rows, cols):
    """Solve an affine system over F_p.

    Returns None if inconsistent, else (particular dict, kernel basis list);
    cols is the complete variable universe (columns absent from every row are
    genuinely free).
    """
    pivots, bad = fp_rref(p, rows)
    if bad:
        return None
    pivot_cols = {c for c, _, _ in pivots}
    particular = {}
    for col, _, rhs in pivots:
        if rhs:
            particular[col] = rhs
    kernel = []
    for f in cols:
        if f in pivot_cols:
            continue
        vec = {f: 1}
        for col, row, _ in pivots:
            c = row.get(f, 0)
            if c:
                vec[col] = (-c) % p
        kernel.append(vec)
    return particular, kernel


def _digit(code, p, j):
    return (code // p ** j) % p


def _code_from_digits(p, digits):
    code = 0
    for x in reversed(digits):
        code = code * p + (x % p)
    return code


def _basis_code(ctx, j):
    """F_q code of z^j."""
    return ctx.p ** j


def as_fraction(x):
    if isinstance(x, LaurentFraction):
        return x
    return LaurentFraction(x)


def _coords(ctx, elem):
    """F_p coordinates {(exp, digit index): value} of an exact element."""
    out = {}
    for e, c in elem.coeffs.items():
        for j in range(ctx.d):
            dig = _digit(c, ctx.p, j)
            if dig:
                out[(e, j)] = dig
    return out


def _from_coords(ctx, vec):
    coeffs = {}
    for (e, j), v in vec.items():
        coeffs[e] = coeffs.get(e, 0) + (v % ctx.p) * ctx.p ** j
    return FieldElement(ctx, coeffs)


def _span_contains(ctx, gen_rows, target_vec):
    """Is target_vec in the F_p-span of gen_rows (coordinate dicts)?"""
    eqs = {}
    for i, r in enumerate(gen_rows):
        for c, v in r.items():
            eqs.setdefault(c, {})[i] = v
    cols = set(eqs)
    cols.update(target_vec)
    sys_rows = [(eqs.get(c, {}), target_vec.get(c, 0)) for c in sorted(cols)]
    return fp_solve(ctx.p, sys_rows, list(range(len(gen_rows)))) is not None


class Lattice:
    """scale * (span_Fp(gens) + T_tail)."""

    __slots__ = ("ctx", "scale", "tail", "gens")

    def __init__(self, ctx, scale=None, tail=0, gens=()):
        self.ctx = ctx
        if scale is None:
            scale = LaurentFraction(FieldElement.one(ctx))
        elif isinstance(scale, FieldElement):
            scale = LaurentFraction(scale)
        if scale.is_zero():
            raise InvalidLattice("scale must be nonzero")
        self.scale = scale
        for g in gens:
            if g.prec is not None:
                raise InvalidLattice("generators must be exact")
            if g.ctx is not ctx:
                raise InvalidLattice("generator from a different field")
        m, basis = self._canonicalize(list(gens), tail)
        self.tail = m
        self.gens = basis

    def _canonicalize(self, gens, m):
        ctx = self.ctx
        while True:
            rows = []
            for g in gens:
                chopped = FieldElement(
                    ctx, {e: c for e, c in g.coeffs.items() if e >= -m})
                if not chopped.is_zero():
                    rows.append((_coords(ctx, chopped), 0))
            pivots, _ = fp_rref(ctx.p, rows)
            basis = [_from_coords(ctx, row) for _, row, _ in pivots]
            gen_rows = [row for _, row, _ in pivots]
            if len(basis) >= ctx.d:
                full_block = all(
                    _span_contains(ctx, gen_rows, {(-m, j): 1})
                    for j in range(ctx.d))
                if full_block:
                    m -= 1
                    gens = basis
                    continue
            basis.sort(key=lambda g: g.key())
            return m, tuple(basis)

    # -- basic data ---------------------------------------------------------

    def key(self):
        return (self.scale.key(), self.tail, tuple(g.key() for g in self.gens))

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        from .literals import lattice_str
        return lattice_str(self)

    def covolume(self, omega):
        """mu(k/L) = q^tail * ||scale|| * mu(O) / p^(#gens)."""
        ctx = self.ctx
        half = 2 * self.tail - 2 * self.scale.ord() - omega.ord()
        return MeasureValue(ctx.q, Fraction(1, ctx.p ** len(self.gens)), half)

    def rescale(self, b):
        """The lattice b * L."""
        return Lattice(self.ctx, self.scale.mul(as_fraction(b)),
                       self.tail, self.gens)

    # -- membership -----------------------------------------------------------

    def member(self, x):
        """Is x (exact element or fraction) in the lattice?"""
        x = as_fraction(x)
        if x.is_zero():
            return True
        ratio = x.mul(LaurentFraction(self.scale.den, self.scale.num))
        if not ratio.is_polynomial():
            return False
        h = ratio.as_polynomial()
        window = FieldElement(
            self.ctx, {e: c for e, c in h.coeffs.items() if e >= -self.tail})
        if window.is_zero():
            return True
        gen_rows = [_coords(self.ctx, g) for g in self.gens]
        return _span_contains(self.ctx, gen_rows, _coords(self.ctx, window))

    def coset_member(self, ell, x):
        return self.member(as_fraction(x).sub(as_fraction(ell)))

    def contains(self, other):
        """Does self contain other as a subgroup?"""
        for g in other.gens:
            if not self.member(other.scale.mul(LaurentFraction(g))):
                return False
        rho = other.scale.div(self.scale)
        if not rho.is_polynomial():
            return False
        top = rho.as_polynomial().max_exp()
        i_max = top + self.tail
        for i in range(other.tail + 1, i_max + 1):
            for j in range(self.ctx.d):
                v = FieldElement(self.ctx, {-i: _basis_code(self.ctx, j)})
                if not self.member(other.scale.mul(LaurentFraction(v))):
                    return False
        return True

    def same_lattice(self, other):
        return self.contains(other) and other.contains(self)

    # -- ball intersections -----------------------------------------------------

    def _ball_system(self, ell, w, R):
        """Linear data for (ell + L) ∩ (w + pi^R O).

        The condition scale*(g+t) ∈ (w-ell) + pi^R O is cleared of
        denominators:  NUM*(g+t) ≡ Y (mod pi^R O) with NUM, Y exact
        polynomials.  Returns (cols, rows, constrained tail exps, free tail
        exps); tail digits below the constrained window are forced to zero.
        """
        ctx = self.ctx
        p, d = ctx.p, ctx.d
        y_frac = as_fraction(w).sub(as_fraction(ell)).mul(
            LaurentFraction(self.scale.den, FieldElement.one(ctx)))
        NUM = self.scale.num * y_frac.den
        Y = y_frac.num
        v_n = NUM.ord()
        y_ord = Y.ord() if not Y.is_zero() else R
        B0 = min(y_ord, R) - v_n
        t_hi = -self.tail - 1
        free_lo = R - v_n
        constrained = list(range(B0, min(t_hi, free_lo - 1) + 1))
        free_exps = list(range(max(B0, free_lo), t_hi + 1))
        cols = [("g", i) for i in range(len(self.gens))]
        for j in constrained:
            for jj in range(d):
                cols.append(("t", j, jj))
        exps = set()
        for g in self.gens:
            for ge in g.coeffs:
                for ne in NUM.coeffs:
                    if ge + ne < R:
                        exps.add(ge + ne)
        for j in constrained:
            for ne in NUM.coeffs:
                if j + ne < R:
                    exps.add(j + ne)
        for e in Y.coeffs:
            if e < R:
                exps.add(e)
        rows = []
        for e in sorted(exps):
            acc_g = []
            for g in self.gens:
                acc = 0
                for ge, gc in g.coeffs.items():
                    nc = NUM.coeffs.get(e - ge)
                    if nc:
                        acc = ctx.add(acc, ctx.mul(gc, nc))
                acc_g.append(acc)
            for jj in range(d):
                row = {}
                for gi, acc in enumerate(acc_g):
                    if acc:
                        dig = _digit(acc, p, jj)
                        if dig:
                            row[("g", gi)] = dig
                for j in constrained:
                    nc = NUM.coeffs.get(e - j)
                    if nc:
                        for jj2 in range(d):
                            base = ctx.mul(nc, _basis_code(ctx, jj2))
                            dig = _digit(base, p, jj)
                            if dig:
                                key = ("t", j, jj2)
                                row[key] = (row.get(key, 0) + dig) % p
                rhs = _digit(Y.coeffs.get(e, 0), p, jj)
                if row or rhs:
                    rows.append((row, rhs))
        return cols, rows, constrained, free_exps

    def count_in_ball(self, ell, w, R):
        """#((ell + L) ∩ (w + pi^R O)), exactly."""
        cols, rows, _, free_exps = self._ball_system(ell, w, R)
        sol = fp_solve(self.ctx.p, rows, cols)
        if sol is None:
            return 0
        _, kernel = sol
        return self.ctx.p ** len(kernel) * self.ctx.q ** len(free_exps)

    def points_in_ball(self, ell, w, R):
        """Yield each point of (ell + L) ∩ (w + pi^R O) as a LaurentFraction."""
        ctx = self.ctx
        p = ctx.p
        cols, rows, constrained, free_exps = self._ball_system(ell, w, R)
        sol = fp_solve(p, rows, cols)
        if sol is None:
            return
        particular, kernel = sol
        ell = as_fraction(ell)
        for kcode in range(p ** len(kernel)):
            assign = dict(particular)
            kk = kcode
            for vec in kernel:
                c = kk % p
                kk //= p
                if c:
                    for col, v in vec.items():
                        assign[col] = (assign.get(col, 0) + c * v) % p
            for fcode in range(ctx.q ** len(free_exps)):
                ff = fcode
                tail_extra = {}
                for j in free_exps:
                    code = ff % ctx.q
                    ff //= ctx.q
                    if code:
                        tail_extra[j] = code
                yield self._decode_point(ell, assign, constrained, tail_extra)

    def _decode_point(self, ell_frac, assign, constrained, tail_extra):
        ctx = self.ctx
        g = FieldElement.zero(ctx)
        for i, gen in enumerate(self.gens):
            c = assign.get(("g", i), 0)
            if c:
                g = g + gen.int_scale(c)
        tcoeffs = dict(tail_extra)
        for j in constrained:
            digits = [assign.get(("t", j, jj), 0) for jj in range(ctx.d)]
            code = _code_from_digits(ctx.p, digits)
            if code:
                tcoeffs[j] = code
        t = FieldElement(ctx, tcoeffs)
        return ell_frac.add(self.scale.mul(LaurentFraction(g + t)))

    def shell_count(self, ell, h):
        """#((ell + L) ∩ {elements of ord exactly h})."""
        zero = FieldElement.zero(self.ctx)
        return (self.count_in_ball(ell, zero, h)
                - self.count_in_ball(ell, zero, h + 1))

    def max_ord_in_coset(self, ell):
        """Largest ord over nonzero elements of ell + L."""
        ell = as_fraction(ell)
        target = 2 if self.member(ell) else 1
        h = self.scale.ord() - self.tail - 2
        if not ell.is_zero():
            h = min(h, ell.ord() - 1)
        zero = FieldElement.zero(self.ctx)
        if self.count_in_ball(ell, zero, h) < target:
            raise LocalsymError("coset ball count below floor; bad data")
        steps = 0
        while self.count_in_ball(ell, zero, h + 1) >= target:
            h += 1
            steps += 1
            if steps > 400:
                raise LocalsymError("coset accumulates near 0; bad data")
        return h

    # -- duality ------------------------------------------------------------

    def dual(self, omega):
        """The dual lattice under (x, xi) -> trace(Res(x xi omega)).

        With eta = xi * scale * u (omega = u dpi), the tail directions force
        eta to be supported in exponents <= tail-1 and each generator gives
        one F_p condition; the dual is the solution lattice pulled back.
        """
        ctx = self.ctx
        p, d = ctx.p, ctx.d
        m = self.tail
        if self.gens:
            top = max(g.max_exp() for g in self.gens)
        else:
            top = -m - 1
        m_dual = top + 1
        window = range(-m_dual, m)
        cols = [(e, j) for e in window for j in range(d)]
        rows = []
        for g in self.gens:
            row = {}
            for e, c in g.coeffs.items():
                ee = -1 - e
                if ee < -m_dual or ee >= m:
                    continue
                for j in range(d):
                    t = ctx.trace(ctx.mul(c, _basis_code(ctx, j)))
                    if t:
                        row[(ee, j)] = (row.get((ee, j), 0) + t) % p
            rows.append((row, 0))
        particular, kernel = fp_solve(p, rows, cols)
        new_gens = [_from_coords(ctx, vec) for vec in kernel]
        new_scale = LaurentFraction(self.scale.den, self.scale.num * omega.u)
        return Lattice(ctx, new_scale, m_dual, new_gens)

    # -- level sets of a residue functional ----------------------------------

    def level_sets(self, s, omega):
        """Level sets of phi(x) = trace(Res(s x omega)) on the lattice.

        Returns (K, translates) where K is the kernel sublattice (index 1 or
        p in self) and translates maps each attained value in F_p to an exact
        coset representative (a LaurentFraction).
        """
        ctx = self.ctx
        p, d = ctx.p, ctx.d
        zero = FieldElement.zero(ctx)
        if s.is_zero():
            return self, {0: LaurentFraction(zero)}
        sigma = self.scale.mul(as_fraction(s)).mul(as_fraction(omega.u))
        if not sigma.is_polynomial():
            raise InvalidLattice(
                "residue functional does not terminate on this lattice")
        sig = sigma.as_polynomial()
        m = self.tail
        top = sig.max_exp()
        m_star = max(m, top + 1)
        dirs = list(self.gens)
        for j in range(-m_star, -m):
            for jj in range(d):
                dirs.append(FieldElement(ctx, {j: _basis_code(ctx, jj)}))
        vals = []
        for v in dirs:
            acc = 0
            for e, c in v.coeffs.items():
                sc = sig.coeffs.get(-1 - e)
                if sc:
                    acc = ctx.add(acc, ctx.mul(c, sc))
            vals.append(ctx.trace(acc))
        if all(x == 0 for x in vals):
            return self, {0: LaurentFraction(zero)}
        row = {i: v for i, v in enumerate(vals) if v}
        _, kernel = fp_solve(p, [(row, 0)], list(range(len(dirs))))
        new_gens = []
        for vec in kernel:
            g = FieldElement.zero(ctx)
            for i, c in vec.items():
                if c:
                    g = g + dirs[i].int_scale(c)
            if not g.is_zero():
                new_gens.append(g)
        K = Lattice(ctx, self.scale, m_star, new_gens)
        i0 = next(i for i, v in enumerate(vals) if v)
        v0_inv = pow(vals[i0], p - 2, p) if p > 2 else 1
        translates = {}
        for tau in range(p):
            coef = (tau * v0_inv) % p
            translates[tau] = self.scale.mul(
                LaurentFraction(dirs[i0].int_scale(coef)))
        return K, translates


def tail_lattice(ctx, m, scale=None):
    """The lattice scale * T_m."""
    return Lattice(ctx, scale, m, ())
