"""Dense univariate polynomials over small finite fields.

Two layers live here.  ``DensePoly`` is a polynomial in x over a
``FieldSpec`` with ascending raw coefficients and no trailing zeros (the
zero polynomial has empty coefficients and degree -1).  ``LambdaPoly``
is a polynomial in a second variable lam whose coefficients are
``DensePoly`` values; spectral covers and characteristic polynomials
live there.

The text grammar used by the CLI is implemented at the bottom: terms
``c``, ``x``, ``x^k``, ``c x^k`` joined by ``+``, with extension-field
coefficients written in brackets, e.g. ``[1+t] x^2``.  Printing is
canonical (ascending degree) and parse/print round-trips bit exactly.
"""

from __future__ import annotations

from .fields import FieldElement, FieldSpec, rp_divmod, rp_gcd, rp_mul, rp_xgcd


class DensePoly:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs=()):
        cs = list(coeffs)
        for i, c in enumerate(cs):
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise ValueError("coefficient from a different field")
                cs[i] = c.raw
        while cs and field.is_zero_raw(cs[-1]):
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (field.one_raw,))

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero_raw, field.one_raw))

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, [field.of_int_raw(n) for n in ints])

    @classmethod
    def constant(cls, field, c):
        if isinstance(c, FieldElement):
            if c.field != field:
                raise ValueError("constant from a different field")
            return cls(field, (c.raw,))
        return cls(field, (field.of_int_raw(c),))

    @classmethod
    def monic_from_roots(cls, field, roots):
        """The product of x - r over the given field elements."""
        out = cls.one(field)
        for r in roots:
            raw = r.raw if isinstance(r, FieldElement) else field.of_int_raw(r)
            out = out * cls(field, (field.neg_raw(raw), field.one_raw))
        return out

    # structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("the zero polynomial has no leading coefficient")
        return self.field.elem(self.coeffs[-1])

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one_raw

    def coeff(self, k: int) -> FieldElement:
        if 0 <= k < len(self.coeffs):
            return self.field.elem(self.coeffs[k])
        return self.field.zero

    # arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, DensePoly):
            if other.field != self.field:
                raise ValueError("polynomials over different fields")
            return other
        if isinstance(other, int):
            return DensePoly(self.field, (self.field.of_int_raw(other),))
        if isinstance(other, FieldElement):
            return DensePoly.constant(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add_raw(out[i], c)
        return DensePoly(F, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return DensePoly(F, [F.neg_raw(c) for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        F = self.field
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return DensePoly(F, ())
        if len(b) == 1:
            c = b[0]
            return DensePoly(F, [F.mul_raw(x, c) for x in a])
        if len(a) == 1:
            c = a[0]
            return DensePoly(F, [F.mul_raw(c, y) for y in b])
        acc = [F.zero_raw] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if F.is_zero_raw(x):
                continue
            for j, y in enumerate(b):
                acc[i + j] = F.add_raw(acc[i + j], F.mul_raw(x, y))
        return DensePoly(F, acc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        out = DensePoly.one(self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __divmod__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        q, r = rp_divmod(self.field, list(self.coeffs), list(o.coeffs))
        return DensePoly(self.field, q), DensePoly(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "DensePoly":
        """Quotient, raising if the division leaves a remainder."""
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError(f"{self} is not divisible by {other}")
        return q

    def __eq__(self, other):
        if isinstance(other, DensePoly):
            return self.field == other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, FieldElement)):
            o = self._coerce(other)
            return self.coeffs == o.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    # calculus and reindexing -------------------------------------------

    def deriv(self) -> "DensePoly":
        F = self.field
        return DensePoly(F, [F.mul_raw(c, F.of_int_raw(k))
                             for k, c in enumerate(self.coeffs)][1:])

    def eval_raw(self, x_raw):
        F = self.field
        acc = F.zero_raw
        for c in reversed(self.coeffs):
            acc = F.add_raw(F.mul_raw(acc, x_raw), c)
        return acc

    def __call__(self, point) -> FieldElement:
        F = self.field
        if isinstance(point, FieldElement):
            if point.field != F:
                raise ValueError("evaluation point from a different field")
            raw = point.raw
        else:
            raw = F.of_int_raw(point)
        return F.elem(self.eval_raw(raw))

    def compose(self, inner: "DensePoly") -> "DensePoly":
        """self(inner(x)), by Horner over polynomials."""
        acc = DensePoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * inner + DensePoly(self.field, (c,))
        return acc

    def monic(self) -> "DensePoly":
        if not self.coeffs:
            return self
        F = self.field
        inv = F.inv_raw(self.coeffs[-1])
        return DensePoly(F, [F.mul_raw(inv, c) for c in self.coeffs])

    def gcd(self, other: "DensePoly") -> "DensePoly":
        o = self._coerce(other)
        return DensePoly(self.field,
                         rp_gcd(self.field, list(self.coeffs), list(o.coeffs)))

    def xgcd(self, other: "DensePoly"):
        o = self._coerce(other)
        g, u, v = rp_xgcd(self.field, list(self.coeffs), list(o.coeffs))
        F = self.field
        return DensePoly(F, g), DensePoly(F, u), DensePoly(F, v)

    def times_x_power(self, k: int) -> "DensePoly":
        if not self.coeffs or k == 0:
            return self
        return DensePoly(self.field,
                         (self.field.zero_raw,) * k + self.coeffs)

    def pth_power(self) -> "DensePoly":
        """f^p, using (sum c_j x^j)^p = sum c_j^p x^(jp) in characteristic p."""
        F = self.field
        p = F.p
        out = [F.zero_raw] * (p * len(self.coeffs))
        for j, c in enumerate(self.coeffs):
            out[p * j] = F.pow_raw(c, p)
        return DensePoly(F, out)

    def pth_root(self) -> "DensePoly":
        """The g with g^p = f; raises ValueError when f is not a p-th power."""
        F = self.field
        p = F.p
        out = []
        for k, c in enumerate(self.coeffs):
            if k % p == 0:
                out.append(F.pth_root_raw(c))
            elif not F.is_zero_raw(c):
                raise ValueError("polynomial is not a p-th power")
        return DensePoly(F, out)

    def decimate(self, m: int):
        """Parts f_0..f_{m-1} with f(x) = sum_j x^j f_j(x^m)."""
        F = self.field
        return [DensePoly(F, self.coeffs[j::m]) for j in range(m)]

    @classmethod
    def undecimate(cls, field, parts, m: int) -> "DensePoly":
        out = [field.zero_raw] * (m * max((len(p.coeffs) for p in parts),
                                          default=0))
        for j, part in enumerate(parts):
            for k, c in enumerate(part.coeffs):
                idx = j + m * k
                if idx >= len(out):
                    out.extend([field.zero_raw] * (idx + 1 - len(out)))
                out[idx] = c
        return cls(field, out)

    def __str__(self):
        return format_poly(self)

    __repr__ = __str__


class LambdaPoly:
    """Polynomial in lam with DensePoly coefficients, ascending in lam."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs=()):
        cs = [c if isinstance(c, DensePoly) else DensePoly.constant(field, c)
              for c in coeffs]
        while cs and cs[-1].is_zero:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def lam(cls, field):
        return cls(field, (DensePoly.zero(field), DensePoly.one(field)))

    @classmethod
    def constant(cls, field, c) -> "LambdaPoly":
        if isinstance(c, DensePoly):
            return cls(field, (c,))
        return cls(field, (DensePoly.constant(field, c),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == DensePoly.one(self.field)

    def coeff(self, k: int) -> DensePoly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return DensePoly.zero(self.field)

    def _coerce(self, other):
        if isinstance(other, LambdaPoly):
            if other.field != self.field:
                raise ValueError("lambda polynomials over different fields")
            return other
        if isinstance(other, (int, FieldElement, DensePoly)):
            return LambdaPoly.constant(self.field, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return LambdaPoly(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return LambdaPoly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return LambdaPoly(self.field, ())
        zero = DensePoly.zero(self.field)
        acc = [zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.is_zero:
                continue
            for j, y in enumerate(b):
                acc[i + j] = acc[i + j] + x * y
        return LambdaPoly(self.field, acc)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = LambdaPoly.constant(self.field, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, LambdaPoly):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def deriv_lam(self) -> "LambdaPoly":
        F = self.field
        return LambdaPoly(F, [c * k for k, c in enumerate(self.coeffs)][1:])

    def eval_poly(self, g: DensePoly) -> DensePoly:
        """Evaluate at lam = g(x)."""
        acc = DensePoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * g + c
        return acc

    def coeff_strings(self):
        return [format_poly(c) for c in self.coeffs]

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            cs = format_poly(c)
            if k == 0:
                terms.append(cs)
                continue
            if cs == "1":
                head = ""
            elif "+" in cs or " " in cs:
                head = f"({cs}) "
            else:
                head = cs + " "
            terms.append(head + ("lam" if k == 1 else f"lam^{k}"))
        return " + ".join(terms) if terms else "0"

    __repr__ = __str__


# text grammar -------------------------------------------------------------


class PolyParseError(ValueError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.pos = pos
        self.text = text


def format_poly(poly: DensePoly, var: str = "x") -> str:
    F = poly.field
    if not poly.coeffs:
        return "0"
    bracketed = F.modulus is not None
    terms = []
    for k, c in enumerate(poly.coeffs):
        if F.is_zero_raw(c):
            continue
        if k == 0:
            body = f"[{F.element_str(c)}]" if bracketed else str(c)
            terms.append(body)
            continue
        power = var if k == 1 else f"{var}^{k}"
        if c == F.one_raw:
            terms.append(power)
        elif bracketed:
            terms.append(f"[{F.element_str(c)}] {power}")
        else:
            terms.append(f"{c} {power}")
    return " + ".join(terms)


def parse_poly(field: FieldSpec, text: str, var: str = "x") -> DensePoly:
    """Parse the CLI polynomial grammar over the given field.

    Lenient about whitespace ("2x^3", "2 x^3" and "2 x ^ 3" all parse);
    strict about everything else, with error positions reported.
    """
    if not isinstance(text, str):
        raise PolyParseError("polynomial must be text", repr(text), 0)
    n = len(text)
    coeffs: dict = {}

    def skip(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    def read_int(i):
        j = i
        while j < n and text[j].isdigit():
            j += 1
        if j == i:
            raise PolyParseError("expected a number", text, i)
        return int(text[i:j]), j

    def read_term(i):
        c_raw = None
        if i < n and text[i].isdigit():
            val, i = read_int(i)
            c_raw = field.of_int_raw(val)
        elif i < n and text[i] == "[":
            j = text.find("]", i)
            if j < 0:
                raise PolyParseError("unclosed bracket", text, i)
            try:
                c_raw = field.parse_element(text[i + 1:j])
            except ValueError as exc:
                raise PolyParseError(str(exc), text, i) from None
            i = j + 1
        i = skip(i)
        k = 0
        saw_var = False
        if i < n and text[i] == var:
            i += 1
            k = 1
            saw_var = True
            j = skip(i)
            if j < n and text[j] == "^":
                k, i = read_int(skip(j + 1))
        if c_raw is None:
            if not saw_var:
                raise PolyParseError("expected a term", text, i)
            c_raw = field.one_raw
        return c_raw, k, i

    i = skip(0)
    if i == n:
        raise PolyParseError("empty polynomial", text, i)
    while True:
        c_raw, k, i = read_term(i)
        prev = coeffs.get(k, field.zero_raw)
        coeffs[k] = field.add_raw(prev, c_raw)
        i = skip(i)
        if i == n:
            break
        if text[i] != "+":
            raise PolyParseError("expected '+'", text, i)
        i = skip(i + 1)
        if i == n:
            raise PolyParseError("dangling '+'", text, i)

    top = max(coeffs) if coeffs else -1
    out = [field.zero_raw] * (top + 1)
    for k, c in coeffs.items():
        out[k] = c
    return DensePoly(field, out)
