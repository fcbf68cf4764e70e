"""Truncated p-typical Witt vectors over small coefficient rings.

Components live either in a finite field or in a nilpotent test algebra
F_q[eps]/(eps^m) with m <= p.  The ring structure goes through the
universal addition/multiplication polynomials, computed once over the
integers by solving ghost components symbolically and cached per (p, n);
characteristic p enters only when a polynomial is evaluated on actual
components.  Alongside the ring: Frobenius and Verschiebung, the
Frobenius-kernel test with its divided-power extraction, and the checker
for the binomial divided-power relations.
"""

import threading
from collections import namedtuple
from fractions import Fraction
from math import comb, factorial

import sympy

from .fields import EpsElement, EpsRing, FieldElement, FieldSpec

WITT_LENGTH_CAP = 4

_Universal = namedtuple("_Universal", "add mul neg")

_poly_cache = {}
_poly_lock = threading.Lock()


def _integral_terms(expr, gens):
    """Expand expr and return {exponent tuple: int coefficient}.

    The ghost solve divides by powers of p; every coefficient must come
    out integral, and we refuse to continue if one does not.
    """
    poly = sympy.Poly(sympy.expand(expr), *gens)
    out = {}
    for exps, coeff in poly.terms():
        q = sympy.Rational(coeff)
        if q.q != 1:
            raise AssertionError(f"non-integral universal coefficient {q}")
        out[tuple(int(e) for e in exps)] = int(q.p)
    return out


def _compute_universal(p: int, n: int) -> _Universal:
    xs = sympy.symbols([f"wx{i}" for i in range(n)])
    ys = sympy.symbols([f"wy{i}" for i in range(n)])

    def ghost(vs, j):
        return sum(p**i * vs[i] ** (p ** (j - i)) for i in range(j + 1))

    def solve(targets):
        # components whose ghost vector equals targets, level by level
        comps = []
        for j in range(n):
            rest = sum(p**i * comps[i] ** (p ** (j - i)) for i in range(j))
            comps.append(sympy.expand(sympy.Rational(1, p**j) * (targets[j] - rest)))
        return comps

    both = list(xs) + list(ys)
    add = tuple(
        _integral_terms(e, both)
        for e in solve([ghost(xs, j) + ghost(ys, j) for j in range(n)]))
    mul = tuple(
        _integral_terms(e, both)
        for e in solve([ghost(xs, j) * ghost(ys, j) for j in range(n)]))
    neg = tuple(
        _integral_terms(e, list(xs))
        for e in solve([-ghost(xs, j) for j in range(n)]))
    return _Universal(add, mul, neg)


def _universal(p: int, n: int) -> _Universal:
    got = _poly_cache.get((p, n))
    if got is not None:
        return got
    with _poly_lock:
        got = _poly_cache.get((p, n))
        if got is None:
            got = _compute_universal(p, n)
            _poly_cache[(p, n)] = got
    return got


def _eval_table(ring, table, values):
    p = ring.char
    acc = ring.zero
    for exps, coeff in table.items():
        c = coeff % p
        if c == 0:
            continue
        term = ring.of_int(c)
        for base, e in zip(values, exps):
            if e:
                term = term * base**e
        acc = acc + term
    return acc


def _adopt(ring, c):
    if isinstance(c, int):
        return ring.of_int(c)
    if isinstance(ring, FieldSpec):
        if isinstance(c, FieldElement) and c.field == ring:
            return c
    elif isinstance(ring, EpsRing):
        if isinstance(c, EpsElement) and c.ring == ring:
            return c
        if isinstance(c, FieldElement) and c.field == ring.field:
            return ring.embed(c)
    raise ValueError("component does not live in the coefficient ring")


class WittVector:
    """A vector (a_0, ..., a_{n-1}) carrying the p-typical ring structure."""

    __slots__ = ("ring", "components")

    def __init__(self, ring, components):
        if not isinstance(ring, (FieldSpec, EpsRing)):
            raise ValueError(
                "coefficient ring must be a finite field or an eps ring")
        comps = tuple(_adopt(ring, c) for c in components)
        if not 1 <= len(comps) <= WITT_LENGTH_CAP:
            raise ValueError(
                f"Witt length must be between 1 and {WITT_LENGTH_CAP}, "
                f"got {len(comps)}")
        self.ring = ring
        self.components = comps

    @classmethod
    def zero(cls, ring, length: int) -> "WittVector":
        return cls(ring, [ring.zero] * length)

    @property
    def length(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __add__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return witt_ring_op(self, other, "add")

    def __mul__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return witt_ring_op(self, other, "mul")

    def __neg__(self):
        tables = _universal(self.ring.char, self.length).neg
        return WittVector(
            self.ring,
            [_eval_table(self.ring, t, self.components) for t in tables])

    def __sub__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return witt_ring_op(self, -other, "add")

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash((self.ring, self.components))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    __repr__ = __str__


def witt_ring_op(u: WittVector, v: WittVector, op: str) -> WittVector:
    """Add or multiply two Witt vectors via the universal polynomials."""
    if not isinstance(u, WittVector) or not isinstance(v, WittVector):
        raise ValueError("witt_ring_op expects two Witt vectors")
    if u.ring != v.ring:
        raise ValueError("coefficient ring mismatch between Witt vectors")
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} vs {v.length}")
    polys = _universal(u.ring.char, u.length)
    if op == "add":
        tables = polys.add
    elif op == "mul":
        tables = polys.mul
    else:
        raise ValueError(f"unknown op {op!r}, expected 'add' or 'mul'")
    values = u.components + v.components
    return WittVector(u.ring, [_eval_table(u.ring, t, values) for t in tables])


def witt_frobenius(u: WittVector) -> WittVector:
    """Componentwise p-th power; the Frobenius in characteristic p."""
    p = u.ring.char
    return WittVector(u.ring, [c**p for c in u.components])


def witt_verschiebung(u: WittVector) -> WittVector:
    """Shift down one slot: V(a_0,...,a_{n-2}) = (0, a_0, ..., a_{n-2})."""
    if u.length + 1 > WITT_LENGTH_CAP:
        raise ValueError(
            f"shifting a length-{u.length} vector would exceed the cap "
            f"{WITT_LENGTH_CAP}")
    return WittVector(u.ring, (u.ring.zero,) + u.components)


def witt_truncate(u: WittVector, length: int) -> WittVector:
    """Drop high components; the projection onto a shorter truncation."""
    if not 1 <= length <= u.length:
        raise ValueError(f"cannot truncate length {u.length} to {length}")
    return WittVector(u.ring, u.components[:length])


def teichmuller_lift(ring, a, length: int) -> WittVector:
    """The multiplicative lift (a, 0, ..., 0)."""
    return WittVector(ring, [a] + [ring.zero] * (length - 1))


class DividedPowerSequence:
    """Elements gamma_0..gamma_N standing in for a, a^2/2!, ..., a^N/N!.

    Only gamma_0 = 1 and gamma_1 = a are enforced here; whether the rest
    satisfy the binomial relations is divided_power_check's business.
    """

    __slots__ = ("base", "gammas")

    def __init__(self, base, gammas):
        gs = tuple(gammas)
        if not gs:
            raise ValueError("need at least gamma_0")
        if gs[0] != 1:
            raise ValueError("gamma_0 must be 1")
        if len(gs) > 1 and gs[1] != base:
            raise ValueError("gamma_1 must equal the base element")
        self.base = base
        self.gammas = gs

    @property
    def cutoff(self) -> int:
        return len(self.gammas) - 1

    def __repr__(self):
        return f"DividedPowerSequence({self.base!r}, {list(self.gammas)!r})"


def divided_power_check(s: DividedPowerSequence):
    """Verify gamma_n gamma_m = C(n+m, n) gamma_{n+m} for all index pairs.

    Indices past the cutoff are treated as zero, the convention for
    divided powers on a nilpotent ideal.  Returns (True, None) when every
    relation holds exactly, else (False, (n, m)) for the first failure.
    """
    g = s.gammas
    top = s.cutoff
    for n in range(1, top + 1):
        for m in range(n, top + 1):
            k = n + m
            lhs = g[n] * g[m]
            if k <= top:
                ok = lhs == g[k] * comb(k, n)
            else:
                ok = lhs == 0
            if not ok:
                return (False, (n, m))
    return (True, None)


def _kernel_unit_constants(p: int, n: int):
    """The units c_j with a_j = c_j * (a_0^{p^j} / (p^j)!) on the kernel.

    Solved over the rationals from the vanishing of the higher ghost
    components of a Frobenius-kernel element, then reduced mod p.  Each
    c_j must be a p-adic unit; that is asserted, not assumed.
    """
    rs = [Fraction(1)]
    for j in range(1, n):
        acc = sum(Fraction(p**i) * rs[i] ** (p ** (j - i)) for i in range(j))
        rs.append(-acc / p**j)
    out = []
    for j, r in enumerate(rs):
        c = r * factorial(p**j)
        if c.numerator % p == 0 or c.denominator % p == 0:
            raise AssertionError(f"kernel constant c_{j} = {c} is not a p-unit")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return out


def _base_p_digits(k: int, p: int, width: int):
    digits = []
    for _ in range(width):
        k, d = divmod(k, p)
        digits.append(d)
    return digits


def frobenius_kernel_membership(u: WittVector):
    """Test F(u) = 0 and, if so, extract divided powers of a_0.

    Returns (False, None) off the kernel.  On it, each component a_j is a
    unit multiple of the p^j-th divided power of a_0; dividing the units
    out and filling in composite indices digit by digit gives a sequence
    gamma_0..gamma_{p^n - 1} that passes divided_power_check.
    """
    if not witt_frobenius(u).is_zero():
        return (False, None)
    ring = u.ring
    p = ring.char
    n = u.length
    cs = _kernel_unit_constants(p, n)
    prime_gammas = [u.components[j] * pow(cs[j], -1, p) for j in range(n)]
    gammas = [ring.one]
    for k in range(1, p**n):
        digits = _base_p_digits(k, p, n)
        den = 1
        for j, kj in enumerate(digits):
            den *= factorial(p**j) ** kj
        scale, rem = divmod(factorial(k), den)
        # k! / prod (p^j)!^{k_j} is an integer prime to p: same p-adic
        # valuation on both sides by Legendre's digit formula
        if rem != 0 or scale % p == 0:
            raise AssertionError(f"bad digit constant at index {k}")
        val = ring.of_int(pow(scale % p, -1, p))
        for j, kj in enumerate(digits):
            if kj:
                val = val * prime_gammas[j] ** kj
        gammas.append(val)
    return (True, DividedPowerSequence(u.components[0], gammas))


def _component_nilpotent(c) -> bool:
    if isinstance(c, EpsElement):
        return c.is_nilpotent
    return not c


def nilpotent_components_check(u: WittVector) -> bool:
    """True iff every component is nilpotent (zero, in a field)."""
    return all(_component_nilpotent(c) for c in u.components)
