"""Arithmetic in F_q = F_p[z]/(modulus), q = p^d.

Elements are ints 0..q-1 encoding polynomials in z base p: the code of
sum c_i z^i is sum c_i p^i.  A FieldContext precomputes the full add/mul
tables plus Frobenius and trace, so everything downstream is table lookups.
"""

from .errors import DivisionByZero, LocalsymError

# Built-in moduli, keyed by (p, d).  Coefficient tuples are low degree first
# and monic.  d = 1 uses the polynomial z itself.
DEFAULT_MODULI = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (2, 2): (1, 1, 1),       # z^2 + z + 1
    (2, 3): (1, 1, 0, 1),    # z^3 + z + 1
    (3, 2): (1, 0, 1),       # z^2 + 1
}


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mod(num, den, p):
    """Remainder of num by monic den, coefficients mod p, lists low-first."""
    num = [c % p for c in num]
    dd = len(den) - 1
    while len(num) > dd:
        lead = num[-1]
        if lead:
            shift = len(num) - 1 - dd
            for i in range(dd + 1):
                num[shift + i] = (num[shift + i] - lead * den[i]) % p
        num.pop()
    while num and num[-1] == 0:
        num.pop()
    return num


def _irreducible(mod, p):
    """Trial division by every monic polynomial of degree <= d/2."""
    d = len(mod) - 1
    if d == 1:
        return True
    if mod[0] == 0:
        return False  # divisible by z
    for deg in range(1, d // 2 + 1):
        for code in range(p ** deg):
            div = []
            c = code
            for _ in range(deg):
                div.append(c % p)
                c //= p
            div.append(1)
            if not _poly_mod(list(mod), div, p):
                return False
    return True


class FieldContext:
    """F_q with exhaustive arithmetic tables."""

    def __init__(self, p, d=1, modulus=None):
        if not _is_prime(p):
            raise LocalsymError("p must be prime, got %r" % (p,))
        if d < 1:
            raise LocalsymError("d must be >= 1, got %r" % (d,))
        if modulus is None:
            try:
                modulus = DEFAULT_MODULI[(p, d)]
            except KeyError:
                raise LocalsymError("no built-in modulus for p=%d d=%d" % (p, d))
        modulus = tuple(c % p for c in modulus[:-1]) + (modulus[-1],)
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise LocalsymError("modulus must be monic of degree d")
        if not _irreducible(modulus, p):
            raise LocalsymError("modulus is reducible over F_%d" % p)
        self.p = p
        self.d = d
        self.q = p ** d
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self):
        p, d, q = self.p, self.d, self.q
        decode = []
        for code in range(q):
            digits = []
            c = code
            for _ in range(d):
                digits.append(c % p)
                c //= p
            decode.append(digits)
        self._decode = decode

        self._add = [[0] * q for _ in range(q)]
        self._mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(q):
                s = [(x + y) % p for x, y in zip(decode[a], decode[b])]
                self._add[a][b] = self._encode(s)
                prod = [0] * (2 * d - 1)
                for i, x in enumerate(decode[a]):
                    if x:
                        for j, y in enumerate(decode[b]):
                            prod[i + j] += x * y
                r = _poly_mod(prod, list(self.modulus), p)
                r += [0] * (d - len(r))
                self._mul[a][b] = self._encode(r)

        self._neg = [self._encode([(-x) % p for x in decode[a]]) for a in range(q)]
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break

        frob = [0] * q
        for a in range(q):
            r = a
            for _ in range(p - 1):
                r = self._mul[r][a]
            frob[a] = r
        self._frob1 = frob

        self._trace = [0] * q
        for a in range(q):
            t, u = 0, a
            for _ in range(d):
                t = self._add[t][u]
                u = frob[u]
            assert t < p  # trace lands in the prime subfield
            self._trace[a] = t

    def _encode(self, digits):
        code = 0
        for x in reversed(digits):
            code = code * self.p + (x % self.p)
        return code

    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def neg(self, a):
        return self._neg[a]

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in F_%d" % self.q)
        return self._inv[a]

    def div(self, a, b):
        return self._mul[a][self.inv(b)]

    def pow(self, a, n):
        if n < 0:
            a = self.inv(a)
            n = -n
        r, b = 1, a
        while n:
            if n & 1:
                r = self._mul[r][b]
            b = self._mul[b][b]
            n >>= 1
        return r

    def frobenius(self, a, k=1):
        """a^(p^k); k may be negative (Frobenius has order dividing d)."""
        k %= self.d
        for _ in range(k):
            a = self._frob1[a]
        return a

    def trace(self, a):
        """Trace to F_p, returned as an int 0..p-1."""
        return self._trace[a]

    def from_int(self, n):
        """Embed an integer via F_p."""
        return n % self.p

    def in_prime_subfield(self, a):
        return a < self.p

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def multiplicative_generator(self):
        for g in range(1, self.q):
            x, n = g, 1
            while x != 1:
                x = self._mul[x][g]
                n += 1
            if n == self.q - 1:
                return g
        raise LocalsymError("no generator found")  # unreachable

    def prime_subfield_units(self):
        """Units of the fixed subfield F_p, as codes."""
        return range(1, self.p)

    def __eq__(self, other):
        return (isinstance(other, FieldContext)
                and (self.p, self.d, self.modulus) == (other.p, other.d, other.modulus))

    def __hash__(self):
        return hash((self.p, self.d, self.modulus))

    def __repr__(self):
        return "FieldContext(p=%d, d=%d)" % (self.p, self.d)


def lambda0(p, c):
    """The basic weight on F_p: 1 at 0, -1 at 1, 0 elsewhere."""
    if c == 0:
        return 1
    if c == 1:
        return -1
    return 0
