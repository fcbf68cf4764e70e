"""Exact arithmetic in small finite fields and their nilpotent thickenings.

Field element data is kept "raw" (ints for F_p, coefficient tuples for
extensions) so that the polynomial and matrix kernels can run tight
loops without wrapper overhead.  ``FieldElement`` boxes a raw value for
public use; raws and boxes are both immutable and hashable.

A raw field is any object providing the attribute family used across
this package: ``p``, ``size``, ``degree``, ``zero_raw``, ``one_raw``,
plus the ``*_raw`` methods (add, sub, neg, mul, inv, pow, pth_root,
is_zero, of_int, random, elements).  ``FieldSpec`` and ``TowerField``
both satisfy it, and the generic ``rp_*`` polynomial helpers below work
over either.
"""

from __future__ import annotations

import itertools
import random
import re

PRIME_CAP = 31
EXT_DEGREE_CAP = 4
TOWER_DEGREE_CAP = 8


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _tpoly_str(coeffs, sym: str = "t") -> str:
    """Ascending-power rendering with no spaces, e.g. ``1+2t+t^3``."""
    terms = []
    for k, c in enumerate(coeffs):
        if not c:
            continue
        if k == 0:
            terms.append(str(c))
        else:
            head = "" if c == 1 else str(c)
            terms.append(head + sym if k == 1 else f"{head}{sym}^{k}")
    return "+".join(terms) if terms else "0"


_TERM_RE = re.compile(r"^(?:(\d+))?(?:(t)(?:\^(\d+))?)?$")


class FieldSpec:
    """A small finite field, F_p or F_p[t]/(m(t)).

    p must be prime and at most 31.  An extension modulus is given by
    its ascending coefficient list over F_p and must be monic, of degree
    at most 4, and irreducible; irreducibility is checked by trial
    division against every monic polynomial of at most half the degree.

    Raw elements are ints in [0, p) for the prime field and fixed-length
    int tuples (ascending powers of t) for extensions.

    Examples
    --------
    >>> F9 = FieldSpec(3, (1, 0, 1))          # t^2 + 1
    >>> a = F9.parse("1+2t")
    >>> str(a * a)
    't'
    >>> str(a ** -1)
    '2+2t'
    """

    def __init__(self, p: int, ext_modulus=None):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"characteristic must be prime, got {p!r}")
        if p > PRIME_CAP:
            raise ValueError(f"characteristic {p} exceeds the cap {PRIME_CAP}")
        self.p = p
        self.char = p
        self._elems = None
        if ext_modulus is None:
            self.degree = 1
            self.size = p
            self.modulus = None
            self.zero_raw = 0
            self.one_raw = 1
            return

        m = [int(c) % p for c in ext_modulus]
        while m and m[-1] == 0:
            m.pop()
        d = len(m) - 1
        if d < 1 or d > EXT_DEGREE_CAP:
            raise ValueError(
                f"extension degree must be between 1 and {EXT_DEGREE_CAP}, got {d}")
        if m[-1] != 1:
            raise ValueError("extension modulus must be monic")
        base = FieldSpec(p)
        if not rp_irreducible(base, m):
            raise ValueError(
                f"extension modulus {_tpoly_str(m)} is reducible over F_{p}")
        self._base = base
        self.degree = d
        self.size = p ** d
        self.modulus = tuple(m)
        self.zero_raw = (0,) * d
        self.one_raw = (1,) + (0,) * (d - 1)

        # reduction table: t^k mod m as a length-d tuple, for k in [d, 2d-2]
        base_red = [(-c) % p for c in m[:d]]
        table = {d: tuple(base_red)}
        cur = list(base_red)
        for k in range(d + 1, 2 * d - 1):
            carry = cur[-1]
            cur = [0] + cur[:-1]
            if carry:
                cur = [(ci + carry * bi) % p for ci, bi in zip(cur, base_red)]
            table[k] = tuple(cur)
        self._red = table

    # raw protocol ------------------------------------------------------

    def is_zero_raw(self, a) -> bool:
        if self.modulus is None:
            return a == 0
        return not any(a)

    def add_raw(self, a, b):
        if self.modulus is None:
            return (a + b) % self.p
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub_raw(self, a, b):
        if self.modulus is None:
            return (a - b) % self.p
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg_raw(self, a):
        if self.modulus is None:
            return (-a) % self.p
        p = self.p
        return tuple((-x) % p for x in a)

    def mul_raw(self, a, b):
        p = self.p
        if self.modulus is None:
            return (a * b) % p
        d = self.degree
        acc = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    acc[i + j] += x * y
        for k in range(2 * d - 2, d - 1, -1):
            c = acc[k] % p
            if c:
                red = self._red[k]
                for i in range(d):
                    acc[i] += c * red[i]
        return tuple(c % p for c in acc[:d])

    def inv_raw(self, a):
        if self.modulus is None:
            if a == 0:
                raise ZeroDivisionError(f"division by zero in F_{self.p}")
            return pow(a, self.p - 2, self.p)
        cs = rp_trim(self._base, list(a))
        if not cs:
            raise ZeroDivisionError(f"division by zero in F_{self.size}")
        g, u, _ = rp_xgcd(self._base, cs, list(self.modulus))
        u = rp_divmod(self._base, u, list(self.modulus))[1]
        return tuple(u) + (0,) * (self.degree - len(u))

    def pow_raw(self, a, e: int):
        if e < 0:
            a = self.inv_raw(a)
            e = -e
        if self.modulus is None:
            return pow(a, e, self.p)
        out = self.one_raw
        base = a
        while e:
            if e & 1:
                out = self.mul_raw(out, base)
            e >>= 1
            if e:
                base = self.mul_raw(base, base)
        return out

    def pth_root_raw(self, a):
        # x -> x^p is an automorphism; its inverse is x -> x^(size/p)
        return self.pow_raw(a, self.size // self.p)

    def of_int_raw(self, n: int):
        if self.modulus is None:
            return n % self.p
        return (n % self.p,) + (0,) * (self.degree - 1)

    def random_raw(self, rng):
        if self.modulus is None:
            return rng.randrange(self.p)
        return tuple(rng.randrange(self.p) for _ in range(self.degree))

    def elements_raw(self):
        if self._elems is None:
            if self.modulus is None:
                self._elems = list(range(self.p))
            else:
                self._elems = [tuple(reversed(t)) for t in itertools.product(
                    range(self.p), repeat=self.degree)]
        return self._elems

    # boxed interface ---------------------------------------------------

    def elem(self, raw) -> "FieldElement":
        return FieldElement(self, raw)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, self.zero_raw)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, self.one_raw)

    @property
    def gen(self) -> "FieldElement":
        """The class of t, for extension fields."""
        if self.modulus is None:
            raise ValueError("prime field has no extension generator")
        return FieldElement(self, (0, 1) + (0,) * (self.degree - 2))

    def of_int(self, n: int) -> "FieldElement":
        return FieldElement(self, self.of_int_raw(n))

    def elements(self):
        return [FieldElement(self, r) for r in self.elements_raw()]

    def element_str(self, raw) -> str:
        if self.modulus is None:
            return str(raw)
        return _tpoly_str(raw)

    def parse_element(self, s: str):
        """Parse the inverse of element_str.  Whitespace is tolerated."""
        text = s.replace(" ", "")
        if self.modulus is None:
            if not text.isdigit():
                raise ValueError(f"bad element {s!r} for F_{self.p}")
            return int(text) % self.p
        if not text:
            raise ValueError(f"empty element string for F_{self.size}")
        coeffs = [0] * (2 * self.degree)
        for term in text.split("+"):
            m = _TERM_RE.match(term)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"bad term {term!r} in element {s!r}")
            c = int(m.group(1)) if m.group(1) is not None else 1
            if m.group(2) is None:
                k = 0
            else:
                k = int(m.group(3)) if m.group(3) is not None else 1
            if k >= len(coeffs):
                coeffs.extend([0] * (k + 1 - len(coeffs)))
            coeffs[k] = (coeffs[k] + c) % self.p
        base = self._base
        r = rp_divmod(base, rp_trim(base, coeffs), list(self.modulus))[1]
        return tuple(r) + (0,) * (self.degree - len(r))

    def parse(self, s: str) -> "FieldElement":
        return FieldElement(self, self.parse_element(s))

    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and self.p == other.p and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.modulus is None:
            return f"FieldSpec({self.p})"
        return f"FieldSpec({self.p}, {_tpoly_str(self.modulus)})"


class FieldElement:
    """A boxed field value supporting arithmetic with ints and same-field values."""

    __slots__ = ("field", "raw")

    def __init__(self, field, raw):
        self.field = field
        self.raw = raw

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field == self.field:
                return other.raw
            raise ValueError(
                f"cannot mix elements of {self.field!r} and {other.field!r}")
        if isinstance(other, int):
            return self.field.of_int_raw(other)
        return None

    def __add__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field, self.field.add_raw(self.raw, r))

    __radd__ = __add__

    def __sub__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub_raw(self.raw, r))

    def __rsub__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub_raw(r, self.raw))

    def __mul__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul_raw(self.raw, r))

    __rmul__ = __mul__

    def __truediv__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field,
                            self.field.mul_raw(self.raw, self.field.inv_raw(r)))

    def __rtruediv__(self, other):
        r = self._coerce(other)
        if r is None:
            return NotImplemented
        return FieldElement(self.field,
                            self.field.mul_raw(r, self.field.inv_raw(self.raw)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow_raw(self.raw, e))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_raw(self.raw))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.raw == other.raw
        if isinstance(other, int):
            return self.raw == self.field.of_int_raw(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.raw))

    def __bool__(self):
        return not self.field.is_zero_raw(self.raw)

    def pth_root(self) -> "FieldElement":
        return FieldElement(self.field, self.field.pth_root_raw(self.raw))

    def __str__(self):
        return self.field.element_str(self.raw)

    __repr__ = __str__


# generic polynomial helpers over a raw field -----------------------------
#
# A polynomial is a python list of raws with no trailing zeros; [] is the
# zero polynomial, and the degree of a nonzero one is len - 1.


def rp_trim(K, cs: list) -> list:
    while cs and K.is_zero_raw(cs[-1]):
        cs.pop()
    return cs


def rp_from_ints(K, ints) -> list:
    return rp_trim(K, [K.of_int_raw(n) for n in ints])


def rp_add(K, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = K.add_raw(out[i], c)
    return rp_trim(K, out)


def rp_neg(K, a):
    return [K.neg_raw(c) for c in a]


def rp_sub(K, a, b):
    out = list(a) + [K.zero_raw] * (len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = K.sub_raw(out[i], c)
    return rp_trim(K, out)


def rp_scale(K, c, a):
    if K.is_zero_raw(c):
        return []
    return [K.mul_raw(c, x) for x in a]


def rp_mul(K, a, b):
    if not a or not b:
        return []
    acc = [K.zero_raw] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if K.is_zero_raw(x):
            continue
        for j, y in enumerate(b):
            acc[i + j] = K.add_raw(acc[i + j], K.mul_raw(x, y))
    return rp_trim(K, acc)


def rp_divmod(K, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [K.zero_raw] * max(0, len(a) - len(b) + 1)
    inv_lead = K.inv_raw(b[-1])
    while len(a) >= len(b):
        if K.is_zero_raw(a[-1]):
            a.pop()
            continue
        c = K.mul_raw(a[-1], inv_lead)
        k = len(a) - len(b)
        q[k] = c
        for i in range(len(b) - 1):
            a[k + i] = K.sub_raw(a[k + i], K.mul_raw(c, b[i]))
        a.pop()
    return rp_trim(K, q), rp_trim(K, a)


def rp_monic(K, a):
    if not a:
        return []
    lead = a[-1]
    if lead == K.one_raw:
        return list(a)
    return rp_scale(K, K.inv_raw(lead), a)


def rp_gcd(K, a, b):
    r0, r1 = list(a), list(b)
    while r1:
        r0, r1 = r1, rp_divmod(K, r0, r1)[1]
    return rp_monic(K, r0)


def rp_xgcd(K, a, b):
    """Monic g = gcd(a, b) together with u, v satisfying a*u + b*v = g."""
    r0, r1 = list(a), list(b)
    s0, s1 = [K.one_raw], []
    t0, t1 = [], [K.one_raw]
    while r1:
        q, r = rp_divmod(K, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, rp_sub(K, s0, rp_mul(K, q, s1))
        t0, t1 = t1, rp_sub(K, t0, rp_mul(K, q, t1))
    if not r0:
        return [], [], []
    c = K.inv_raw(r0[-1])
    return rp_scale(K, c, r0), rp_scale(K, c, s0), rp_scale(K, c, t0)


def rp_eval(K, a, x):
    acc = K.zero_raw
    for c in reversed(a):
        acc = K.add_raw(K.mul_raw(acc, x), c)
    return acc


def rp_deriv(K, a):
    return rp_trim(K, [K.mul_raw(c, K.of_int_raw(k))
                       for k, c in enumerate(a)][1:])


def rp_pow_mod(K, a, e: int, m):
    out = [K.one_raw]
    base = rp_divmod(K, a, m)[1]
    while e:
        if e & 1:
            out = rp_divmod(K, rp_mul(K, out, base), m)[1]
        e >>= 1
        if e:
            base = rp_divmod(K, rp_mul(K, base, base), m)[1]
    return out


def rp_irreducible(K, f) -> bool:
    """Trial division by every monic polynomial of degree at most deg(f)/2."""
    d = len(f) - 1
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for tail in itertools.product(K.elements_raw(), repeat=k):
            g = list(tail) + [K.one_raw]
            if not rp_divmod(K, f, g)[1]:
                return False
    return True


# univariate factorization over a finite raw field ------------------------


def factor_univariate(K, f):
    """Cantor-Zassenhaus factorization of a nonzero univariate polynomial.

    Returns ``(lead, factors)`` where lead is the leading coefficient raw
    and factors lists (monic irreducible coefficient list, multiplicity)
    pairs whose product recombines to ``f / lead``.  The equal-degree
    splitter draws its trial polynomials from a fixed-seed PRNG, so the
    output order is deterministic.
    """
    f = rp_trim(K, list(f))
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    lead = f[-1]
    if len(f) == 1:
        return lead, []
    factors: list = []
    _factor_monic(K, rp_monic(K, f), 1, factors)
    return lead, factors


def _factor_monic(K, f, mult, out):
    if len(f) <= 1:
        return
    df = rp_deriv(K, f)
    if not df:
        # zero derivative forces f = h(x)^p with h obtained by p-th roots
        p = K.p
        h = rp_trim(K, [K.pth_root_raw(c) for c in f[::p]])
        _factor_monic(K, h, mult * p, out)
        return
    sf = rp_divmod(K, f, rp_gcd(K, f, df))[0]
    for q in _factor_squarefree(K, sf):
        e = 0
        while True:
            quo, rem = rp_divmod(K, f, q)
            if rem:
                break
            f, e = quo, e + 1
        out.append((q, e * mult))
    if len(f) > 1:
        _factor_monic(K, f, mult, out)


def _factor_squarefree(K, f):
    """Irreducible factors of a squarefree monic f, via distinct degrees."""
    out = []
    x = [K.zero_raw, K.one_raw]
    fstar = list(f)
    h = rp_divmod(K, x, fstar)[1]
    d = 0
    while len(fstar) - 1 >= 1:
        d += 1
        if 2 * d > len(fstar) - 1:
            out.append(fstar)
            break
        h = rp_pow_mod(K, h, K.size, fstar)
        g = rp_gcd(K, rp_sub(K, h, x), fstar)
        if len(g) > 1:
            out.extend(_equal_degree(K, g, d))
            fstar = rp_divmod(K, fstar, g)[0]
            h = rp_divmod(K, h, fstar)[1]
    return out


def _equal_degree(K, f, d):
    rng = random.Random(0xA5)
    work, done = [f], []
    while work:
        g = work.pop()
        if len(g) - 1 == d:
            done.append(g)
            continue
        h = _ed_split(K, g, d, rng)
        work.append(h)
        work.append(rp_divmod(K, g, h)[0])
    return done


def _ed_split(K, f, d, rng):
    n = len(f) - 1
    while True:
        u = rp_trim(K, [K.random_raw(rng) for _ in range(n)])
        if len(u) <= 1:
            continue
        g = rp_gcd(K, u, f)
        if 1 <= len(g) - 1 < n:
            return g
        if K.p == 2:
            # even q: split with the trace map over F_2
            m = K.size.bit_length() - 1
            t, acc = list(u), list(u)
            for _ in range(m * d - 1):
                t = rp_divmod(K, rp_mul(K, t, t), f)[1]
                acc = rp_add(K, acc, t)
            w = acc
        else:
            # odd q: Legendre-style split
            e = (K.size ** d - 1) // 2
            w = rp_sub(K, rp_pow_mod(K, u, e, f), [K.one_raw])
        g = rp_gcd(K, w, f)
        if 1 <= len(g) - 1 < n:
            return g


# splitting towers ---------------------------------------------------------


class TowerField:
    """An extension of a raw field by a monic irreducible polynomial.

    Used internally to build splitting fields for oracles and fiber
    tests.  Raw elements are tuples of base raws (ascending powers of
    the adjoined root).  The total degree over the prime field is capped
    at 8 so that searches stay desk sized; construction past the cap
    raises ValueError.
    """

    def __init__(self, base, modulus, check: bool = True):
        mod = rp_trim(base, list(modulus))
        deg = len(mod) - 1
        if deg < 2:
            raise ValueError("tower step must have degree at least 2")
        if mod[-1] != base.one_raw:
            raise ValueError("tower modulus must be monic")
        total = deg * getattr(base, "total_degree", base.degree)
        if total > TOWER_DEGREE_CAP:
            raise ValueError(
                f"splitting tower degree {total} exceeds the cap {TOWER_DEGREE_CAP}")
        if check and not rp_irreducible(base, mod):
            raise ValueError("tower modulus is reducible")
        self.base = base
        self.modulus = mod
        self.degree = deg
        self.total_degree = total
        self.p = base.p
        self.char = base.p
        self.size = base.size ** deg
        self.zero_raw = (base.zero_raw,) * deg
        self.one_raw = (base.one_raw,) + (base.zero_raw,) * (deg - 1)
        self._elems = None

        neg_tail = [base.neg_raw(c) for c in mod[:deg]]
        table = {deg: list(neg_tail)}
        cur = list(neg_tail)
        for k in range(deg + 1, 2 * deg - 1):
            carry = cur[-1]
            cur = [base.zero_raw] + cur[:-1]
            if not base.is_zero_raw(carry):
                cur = [base.add_raw(ci, base.mul_raw(carry, bi))
                       for ci, bi in zip(cur, neg_tail)]
            table[k] = list(cur)
        self._red = table

    def is_zero_raw(self, a) -> bool:
        B = self.base
        return all(B.is_zero_raw(c) for c in a)

    def add_raw(self, a, b):
        B = self.base
        return tuple(B.add_raw(x, y) for x, y in zip(a, b))

    def sub_raw(self, a, b):
        B = self.base
        return tuple(B.sub_raw(x, y) for x, y in zip(a, b))

    def neg_raw(self, a):
        B = self.base
        return tuple(B.neg_raw(x) for x in a)

    def mul_raw(self, a, b):
        B = self.base
        d = self.degree
        acc = [B.zero_raw] * (2 * d - 1)
        for i, x in enumerate(a):
            if B.is_zero_raw(x):
                continue
            for j, y in enumerate(b):
                acc[i + j] = B.add_raw(acc[i + j], B.mul_raw(x, y))
        for k in range(2 * d - 2, d - 1, -1):
            c = acc[k]
            if not B.is_zero_raw(c):
                red = self._red[k]
                for i in range(d):
                    acc[i] = B.add_raw(acc[i], B.mul_raw(c, red[i]))
        return tuple(acc[:d])

    def inv_raw(self, a):
        B = self.base
        cs = rp_trim(B, list(a))
        if not cs:
            raise ZeroDivisionError("division by zero in tower field")
        g, u, _ = rp_xgcd(B, cs, self.modulus)
        u = rp_divmod(B, u, self.modulus)[1]
        return tuple(u) + (B.zero_raw,) * (self.degree - len(u))

    def pow_raw(self, a, e: int):
        if e < 0:
            a = self.inv_raw(a)
            e = -e
        out = self.one_raw
        base = a
        while e:
            if e & 1:
                out = self.mul_raw(out, base)
            e >>= 1
            if e:
                base = self.mul_raw(base, base)
        return out

    def pth_root_raw(self, a):
        return self.pow_raw(a, self.size // self.p)

    def of_int_raw(self, n: int):
        B = self.base
        return (B.of_int_raw(n),) + (B.zero_raw,) * (self.degree - 1)

    def embed_raw(self, a):
        """Embed a base raw into the tower."""
        B = self.base
        return (a,) + (B.zero_raw,) * (self.degree - 1)

    @property
    def gen_raw(self):
        B = self.base
        return (B.zero_raw, B.one_raw) + (B.zero_raw,) * (self.degree - 2)

    def random_raw(self, rng):
        B = self.base
        return tuple(B.random_raw(rng) for _ in range(self.degree))

    def elements_raw(self):
        if self._elems is None:
            self._elems = [tuple(reversed(t)) for t in itertools.product(
                self.base.elements_raw(), repeat=self.degree)]
        return self._elems

    def __repr__(self):
        return f"TowerField(size={self.size}, total_degree={self.total_degree})"


def splitting_tower(K, f):
    """Extend K until the polynomial f splits into linear factors.

    Returns ``(L, lift, roots)``: L is K itself or a TowerField over it,
    lift maps K raws into L raws, and roots lists (root raw, multiplicity)
    pairs accounting for deg(f).  Raises ValueError if the required tower
    would pass the total-degree cap.
    """
    f = rp_trim(K, list(f))
    if len(f) <= 1:
        raise ValueError("need a nonconstant polynomial to split")
    L = K

    def lift(a):
        return a

    while True:
        fl = [lift(c) for c in f]
        _, facs = factor_univariate(L, fl)
        nonlinear = [q for q, _ in facs if len(q) > 2]
        if not nonlinear:
            roots = [(L.neg_raw(q[0]), e) for q, e in facs]
            return L, lift, roots
        step = TowerField(L, nonlinear[0], check=False)
        prev = lift

        def lift(a, _step=step, _prev=prev):
            return _step.embed_raw(_prev(a))

        L = step


# nilpotent thickenings ----------------------------------------------------


class EpsRing:
    """The truncated polynomial ring k[e]/(e^order) over a FieldSpec k.

    Elements with zero constant term are nilpotent, which makes this the
    natural home for divided-power experiments at desk scale.
    """

    def __init__(self, field: FieldSpec, order: int):
        if order < 1:
            raise ValueError("truncation order must be at least 1")
        self.field = field
        self.order = order
        self.char = field.p

    @property
    def zero(self) -> "EpsElement":
        return EpsElement(self, (self.field.zero_raw,) * self.order)

    @property
    def one(self) -> "EpsElement":
        return EpsElement(self, (self.field.one_raw,)
                          + (self.field.zero_raw,) * (self.order - 1))

    @property
    def eps(self) -> "EpsElement":
        if self.order == 1:
            return self.zero
        c = [self.field.zero_raw] * self.order
        c[1] = self.field.one_raw
        return EpsElement(self, tuple(c))

    def of_int(self, n: int) -> "EpsElement":
        return EpsElement(self, (self.field.of_int_raw(n),)
                          + (self.field.zero_raw,) * (self.order - 1))

    def embed(self, x: FieldElement) -> "EpsElement":
        if x.field != self.field:
            raise ValueError("element from a different base field")
        return EpsElement(self, (x.raw,)
                          + (self.field.zero_raw,) * (self.order - 1))

    def elements(self):
        """Every ring element; only sensible for very small rings."""
        raws = self.field.elements_raw()
        return [EpsElement(self, tuple(reversed(t)))
                for t in itertools.product(raws, repeat=self.order)]

    def __eq__(self, other):
        return (isinstance(other, EpsRing) and self.field == other.field
                and self.order == other.order)

    def __hash__(self):
        return hash((self.field, self.order))

    def __repr__(self):
        return f"EpsRing({self.field!r}, order={self.order})"


class EpsElement:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: EpsRing, coeffs):
        self.ring = ring
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, EpsElement):
            if other.ring == self.ring:
                return other.coeffs
            raise ValueError("cannot mix elements of different eps rings")
        if isinstance(other, int):
            return self.ring.of_int(other).coeffs
        if isinstance(other, FieldElement):
            return self.ring.embed(other).coeffs
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F = self.ring.field
        return EpsElement(self.ring, tuple(
            F.add_raw(x, y) for x, y in zip(self.coeffs, c)))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F = self.ring.field
        return EpsElement(self.ring, tuple(
            F.sub_raw(x, y) for x, y in zip(self.coeffs, c)))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F = self.ring.field
        return EpsElement(self.ring, tuple(
            F.sub_raw(y, x) for x, y in zip(self.coeffs, c)))

    def __neg__(self):
        F = self.ring.field
        return EpsElement(self.ring, tuple(F.neg_raw(x) for x in self.coeffs))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        F = self.ring.field
        n = self.ring.order
        acc = [F.zero_raw] * n
        for i, x in enumerate(self.coeffs):
            if F.is_zero_raw(x):
                continue
            for j in range(n - i):
                y = c[j]
                if not F.is_zero_raw(y):
                    acc[i + j] = F.add_raw(acc[i + j], F.mul_raw(x, y))
        return EpsElement(self.ring, tuple(acc))

    __rmul__ = __mul__

    def inv(self) -> "EpsElement":
        F = self.ring.field
        if F.is_zero_raw(self.coeffs[0]):
            raise ZeroDivisionError("constant term vanishes, not a unit")
        c0inv = F.inv_raw(self.coeffs[0])
        # x = c0 (1 + n) with n nilpotent, so 1/x = c0^{-1} sum_k (-n)^k
        unit = EpsElement(self.ring, tuple(
            F.mul_raw(c0inv, c) for c in self.coeffs))
        n = unit - self.ring.one
        out = self.ring.one
        term = self.ring.one
        for _ in range(1, self.ring.order):
            term = term * (-n)
            out = out + term
        scale = EpsElement(self.ring, (c0inv,)
                           + (F.zero_raw,) * (self.ring.order - 1))
        return out * scale

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self * EpsElement(self.ring, c).inv()

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return EpsElement(self.ring, c) * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = self.ring.one
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self.coeffs == c

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __bool__(self):
        F = self.ring.field
        return not all(F.is_zero_raw(c) for c in self.coeffs)

    @property
    def is_nilpotent(self) -> bool:
        return self.ring.field.is_zero_raw(self.coeffs[0])

    @property
    def is_unit(self) -> bool:
        return not self.is_nilpotent

    def __str__(self):
        F = self.ring.field
        terms = []
        for k, c in enumerate(self.coeffs):
            if F.is_zero_raw(c):
                continue
            cs = F.element_str(c)
            if "+" in cs:
                cs = f"({cs})"
            if k == 0:
                terms.append(cs)
            else:
                head = "" if cs == "1" else cs
                terms.append(head + "e" if k == 1 else f"{head}e^{k}")
        return "+".join(terms) if terms else "0"

    __repr__ = __str__
