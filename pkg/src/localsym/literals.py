"""Literal grammars: F_q coefficients, Laurent series, lattices, virtual
lattices, and their JSON mirrors.  Parsers raise ValueError on bad input so
the CLI can map them to its input-error exit code."""

import re
from fractions import Fraction

from .errors import LocalsymError
from .gf import FieldContext


# -- F_q coefficients (polynomials in z) ------------------------------------

def fq_str(ctx, code):
    if code == 0:
        return "0"
    p = ctx.p
    terms = []
    e = 0
    while code:
        c = code % p
        code //= p
        if c:
            if e == 0:
                terms.append(str(c))
            elif e == 1:
                terms.append("z" if c == 1 else "%d*z" % c)
            else:
                terms.append("z^%d" % e if c == 1 else "%d*z^%d" % (c, e))
        e += 1
    return "+".join(reversed(terms))


def parse_fq(ctx, s):
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.replace(" ", "")
    if not s:
        raise ValueError("empty coefficient")
    # split into signed terms, accumulate digits mod p
    parts = re.findall(r"[+-]?[^+-]+", s)
    digits = [0] * ctx.d
    for part in parts:
        sign = 1
        if part[0] == "+":
            part = part[1:]
        elif part[0] == "-":
            sign = -1
            part = part[1:]
        m = re.fullmatch(r"(?:(\d+)\*?)?(z(?:\^(\d+))?)?", part)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError("bad F_q term %r" % part)
        c = int(m.group(1)) if m.group(1) else 1
        e = 0
        if m.group(2):
            e = int(m.group(3)) if m.group(3) else 1
        if e >= ctx.d:
            raise ValueError("z^%d is not reduced in F_%d" % (e, ctx.q))
        digits[e] = (digits[e] + sign * c) % ctx.p
    code = 0
    for dig in reversed(digits):
        code = code * ctx.p + dig
    return code


def parse_modulus(s, p, d):
    """Parse a monic modulus like z^2+z+1 into a coefficient tuple."""
    s = s.replace(" ", "")
    parts = re.findall(r"[+-]?[^+-]+", s)
    coeffs = [0] * (d + 1)
    for part in parts:
        sign = 1
        if part[0] == "+":
            part = part[1:]
        elif part[0] == "-":
            sign = -1
            part = part[1:]
        m = re.fullmatch(r"(?:(\d+)\*?)?(z(?:\^(\d+))?)?", part)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise ValueError("bad modulus term %r" % part)
        c = int(m.group(1)) if m.group(1) else 1
        e = 0
        if m.group(2):
            e = int(m.group(3)) if m.group(3) else 1
        if e > d:
            raise ValueError("modulus degree exceeds d")
        coeffs[e] = (coeffs[e] + sign * c) % p
    return tuple(coeffs)


# -- Laurent series ----------------------------------------------------------

def laurent_str(x):
    if not x.coeffs:
        return "0"
    ctx = x.ctx
    out = []
    for e in sorted(x.coeffs):
        c = x.coeffs[e]
        cs = fq_str(ctx, c)
        if "+" in cs or "-" in cs:
            cs = "(%s)" % cs
        if e == 0:
            out.append(cs)
        else:
            pi = "pi" if e == 1 else "pi^%d" % e
            out.append(pi if c == 1 else "%s*%s" % (cs, pi))
    return " + ".join(out)


def parse_laurent(ctx_or_field, s):
    from .localfield import FieldElement
    ctx = ctx_or_field
    s = s.strip()
    if s == "0":
        return FieldElement.zero(ctx)
    # split on top-level +/- (not inside parens)
    terms = []
    depth = 0
    cur = ""
    sign = 1
    prev = ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        splitter = ch in "+-" and depth == 0 and prev != "^"
        if splitter and cur.strip():
            terms.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif splitter:
            # leading sign
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur += ch
        if ch != " ":
            prev = ch
    if cur.strip():
        terms.append((sign, cur))
    coeffs = {}
    for sign, term in terms:
        term = term.strip().replace(" ", "")
        m = re.fullmatch(r"(?:(.+?)\*)?pi(?:\^(-?\d+))?", term)
        if m:
            coef_s = m.group(1)
            e = int(m.group(2)) if m.group(2) else 1
        else:
            coef_s = term
            e = 0
        if coef_s is None or coef_s == "":
            code = 1
        elif re.fullmatch(r"-?\d+", coef_s):
            code = int(coef_s) % ctx.p
        else:
            code = parse_fq(ctx, coef_s)
        if sign < 0:
            code = ctx.neg(code)
        if code:
            prev = coeffs.get(e, 0)
            tot = ctx.add(prev, code)
            if tot:
                coeffs[e] = tot
            elif e in coeffs:
                del coeffs[e]
    return FieldElement(ctx, coeffs)


# -- rationals ----------------------------------------------------------------

def fraction_str(f):
    f = Fraction(f)
    if f.denominator == 1:
        return str(f.numerator)
    return "%d/%d" % (f.numerator, f.denominator)


def parse_fraction(s):
    s = s.strip()
    m = re.fullmatch(r"(-?\d+)(?:/(\d+))?", s)
    if not m:
        # allow the n/p^e form
        m2 = re.fullmatch(r"(-?\d+)/(\d+)\^(\d+)", s)
        if m2:
            return Fraction(int(m2.group(1)), int(m2.group(2)) ** int(m2.group(3)))
        raise ValueError("bad rational %r" % s)
    if m.group(2):
        return Fraction(int(m.group(1)), int(m.group(2)))
    return Fraction(int(m.group(1)))


# -- lattices ------------------------------------------------------------------

def lattice_str(L):
    from .localfield import laurent_fraction_str
    parts = ["scale=%s" % laurent_fraction_str(L.scale)]
    parts.append("tail=%d" % L.tail)
    if L.gens:
        parts.append("gens=%s" % ",".join(laurent_str(g) for g in L.gens))
    return "lat(%s)" % "; ".join(parts)


def parse_laurent_fraction(ctx, s):
    from .localfield import LaurentFraction
    s = s.strip()
    if "/" in s:
        num_s, den_s = s.split("/", 1)
        return LaurentFraction(parse_laurent(ctx, num_s), parse_laurent(ctx, den_s))
    return LaurentFraction(parse_laurent(ctx, s))


def parse_lattice(ctx, s):
    from .lattice import Lattice
    from .localfield import FieldElement, LaurentFraction
    s = s.strip()
    m = re.fullmatch(r"lat\((.*)\)", s, re.S)
    if not m:
        raise ValueError("lattice literal must look like lat(...)")
    body = m.group(1)
    fields = {}
    for piece in body.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ValueError("bad lattice field %r" % piece)
        k, v = piece.split("=", 1)
        fields[k.strip()] = v.strip()
    scale = LaurentFraction(FieldElement.one(ctx))
    if "scale" in fields:
        scale = parse_laurent_fraction(ctx, fields["scale"])
    tail = int(fields.get("tail", "0"))
    gens = []
    if fields.get("gens"):
        gens = [parse_laurent(ctx, g) for g in fields["gens"].split(",") if g.strip()]
    return Lattice(ctx, scale, tail, gens)


# -- virtual lattices -----------------------------------------------------------

_PRIM_KEYS = ("coef", "ell", "L", "w", "r")


def parse_rvl(ctx, text):
    """Parse the line-based virtual-lattice literal (one primitive per line)."""
    from .rvl import Primitive, VirtualLattice
    prims = []
    for line in text.strip().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not line.startswith("prim"):
            raise ValueError("each line must start with 'prim'")
        rest = line[4:].strip()
        # locate key= markers at top level
        positions = []
        depth = 0
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif depth == 0:
                for key in _PRIM_KEYS:
                    kl = len(key) + 1
                    if rest[i:i + kl] == key + "=" and (i == 0 or rest[i - 1] == " "):
                        positions.append((i, key))
        positions.sort()
        fields = {}
        for idx, (pos, key) in enumerate(positions):
            end = positions[idx + 1][0] if idx + 1 < len(positions) else len(rest)
            fields[key] = rest[pos + len(key) + 1:end].strip()
        missing = [k for k in _PRIM_KEYS if k not in fields]
        if missing:
            raise ValueError("primitive missing fields %s" % ",".join(missing))
        prims.append(Primitive(
            parse_fraction(fields["coef"]),
            parse_laurent_fraction(ctx, fields["ell"]),
            parse_lattice(ctx, fields["L"]),
            parse_laurent_fraction(ctx, fields["w"]),
            parse_laurent(ctx, fields["r"]),
        ))
    return VirtualLattice(ctx, prims)


def rvl_str(phi):
    from .localfield import laurent_fraction_str
    lines = []
    for t in phi.terms:
        lines.append("prim coef=%s ell=%s L=%s w=%s r=%s" % (
            fraction_str(t.coef), laurent_fraction_str(t.ell),
            lattice_str(t.lattice), laurent_fraction_str(t.w),
            laurent_str(t.r)))
    return "\n".join(lines)


def rvl_to_json(phi):
    from .localfield import laurent_fraction_str
    out = []
    for t in phi.terms:
        out.append({
            "coef": fraction_str(t.coef),
            "ell": laurent_fraction_str(t.ell),
            "lattice": {
                "scale": laurent_fraction_str(t.lattice.scale),
                "tail": t.lattice.tail,
                "gens": [laurent_str(g) for g in t.lattice.gens],
            },
            "w": laurent_fraction_str(t.w),
            "r": laurent_str(t.r),
        })
    return {"terms": out}


def rvl_from_json(ctx, data):
    from .lattice import Lattice
    from .rvl import Primitive, VirtualLattice
    prims = []
    for t in data["terms"]:
        lat = t["lattice"]
        scale = parse_laurent_fraction(ctx, lat.get("scale", "1"))
        L = Lattice(ctx, scale, int(lat.get("tail", 0)),
                    [parse_laurent(ctx, g) for g in lat.get("gens", [])])
        prims.append(Primitive(parse_fraction(t["coef"]),
                               parse_laurent_fraction(ctx, t["ell"]),
                               L, parse_laurent_fraction(ctx, t["w"]),
                               parse_laurent(ctx, t["r"])))
    return VirtualLattice(ctx, prims)


def field_context_from_args(p, d, modulus=None):
    if modulus is not None:
        return FieldContext(p, d, parse_modulus(modulus, p, d))
    return FieldContext(p, d)
