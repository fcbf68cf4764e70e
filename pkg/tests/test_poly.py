import pytest
from hypothesis import given, strategies as st

from logpcurv.fields import FieldSpec
from logpcurv.poly import (
    DensePoly,
    LambdaPoly,
    PolyParseError,
    format_poly,
    parse_poly,
)

F2 = FieldSpec(2)
F3 = FieldSpec(3)
F5 = FieldSpec(5)
F9 = FieldSpec(3, (1, 0, 1))


def P(field, *ints):
    return DensePoly.from_ints(field, ints)


def test_canonical_trailing_zeros():
    f = DensePoly.from_ints(F3, [1, 2, 0, 0])
    assert f.degree == 1
    assert DensePoly.from_ints(F3, [0, 0]).degree == -1
    assert not DensePoly.zero(F3)


def test_divmod_example():
    # frozen: divmod(x^3, x^2 + 1) over F_3 is (x, 2x)
    q, r = divmod(P(F3, 0, 0, 0, 1), P(F3, 1, 0, 1))
    assert q == P(F3, 0, 1)
    assert r == P(F3, 0, 2)


def test_arith_identities():
    f = P(F5, 1, 2, 3)
    g = P(F5, 4, 0, 1)
    assert f * g == g * f
    assert (f + g) - g == f
    assert f * (g + 1) == f * g + f
    assert (f * g).exact_div(g) == f
    with pytest.raises(ValueError):
        (f * g + 1).exact_div(g)


poly_ints = st.lists(st.integers(min_value=0, max_value=4), max_size=7)


@given(poly_ints, poly_ints)
def test_divmod_property(ai, bi):
    a = DensePoly.from_ints(F5, ai)
    b = DensePoly.from_ints(F5, bi)
    if b.is_zero:
        with pytest.raises(ZeroDivisionError):
            divmod(a, b)
        return
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


def test_gcd_monic():
    f = P(F5, 4, 0, 1) * P(F5, 1, 1)     # (x-1)(x+1)^2
    g = P(F5, 1, 2, 1)                   # (x+1)^2
    d = f.gcd(g)
    assert d.is_monic
    assert d == P(F5, 1, 2, 1)
    assert (P(F5, 4, 0, 1)).gcd(P(F5, 1, 1)) == P(F5, 1, 1)


def test_eval_and_compose():
    f = P(F3, 1, 0, 1)
    assert f(1) == F3.of_int(2)
    assert f(F3.of_int(2)) == F3.of_int(2)
    g = P(F3, 0, 0, 1)
    assert f.compose(g) == P(F3, 1, 0, 0, 0, 1)


def test_deriv_char_p():
    assert P(F3, 0, 0, 0, 1).deriv() == DensePoly.zero(F3)
    assert P(F3, 1, 1, 1).deriv() == P(F3, 1, 2)


def test_pth_power_and_root():
    f = P(F3, 1, 2)
    fp = f.pth_power()
    assert fp == f * f * f
    assert fp.pth_root() == f
    with pytest.raises(ValueError):
        P(F3, 0, 1).pth_root()


def test_decimate_roundtrip():
    f = P(F5, 1, 2, 3, 4, 0, 1, 2)
    parts = f.decimate(5)
    assert len(parts) == 5
    assert DensePoly.undecimate(F5, parts, 5) == f
    # f = sum x^j f_j(x^5) checked structurally
    x = DensePoly.x(F5)
    recon = DensePoly.zero(F5)
    for j, part in enumerate(parts):
        recon = recon + x ** j * part.compose(x ** 5)
    assert recon == f


def test_monic_from_roots():
    q = DensePoly.monic_from_roots(F5, [0, 1])
    assert q == P(F5, 0, 4, 1)
    assert DensePoly.monic_from_roots(F5, []) == DensePoly.one(F5)


def test_format_prime():
    assert format_poly(DensePoly.zero(F3)) == "0"
    assert format_poly(P(F3, 2)) == "2"
    assert format_poly(P(F3, 0, 1)) == "x"
    assert format_poly(P(F3, 0, 0, 2)) == "2 x^2"
    assert format_poly(P(F3, 1, 1, 0, 2)) == "1 + x + 2 x^3"


def test_format_extension():
    t = F9.gen
    f = DensePoly(F9, (F9.of_int_raw(2), (F9.one + t).raw, F9.one_raw))
    assert format_poly(f) == "[2] + [1+t] x + x^2"


def test_parse_basic():
    assert parse_poly(F3, "1 + x + 2 x^3") == P(F3, 1, 1, 0, 2)
    assert parse_poly(F3, "2x^3+x+1") == P(F3, 1, 1, 0, 2)
    assert parse_poly(F3, " 2 x ^ 3 ") == P(F3, 0, 0, 0, 2)
    assert parse_poly(F3, "0") == DensePoly.zero(F3)
    assert parse_poly(F3, "x^0") == DensePoly.one(F3)
    assert parse_poly(F3, "x + x") == P(F3, 0, 2)
    assert parse_poly(F5, "7") == P(F5, 2)


def test_parse_extension():
    f = parse_poly(F9, "[1+t] x^2 + [2] + x")
    t = F9.gen
    assert f.coeff(2) == F9.one + t
    assert f.coeff(0) == F9.of_int(2)
    assert f.coeff(1) == F9.one


def test_parse_errors_carry_position():
    for bad, pos in [("", 0), ("x +", 3), ("x ^", 3), ("* x", 0),
                     ("x y", 2), ("[1+t x", 0), ("1 - x", 2)]:
        with pytest.raises(PolyParseError) as err:
            parse_poly(F9, bad)
        assert err.value.pos == pos


def test_roundtrip_bit_exact():
    import random
    rng = random.Random(7)
    for fld in (F2, F3, F5, F9):
        for _ in range(50):
            f = DensePoly(fld, [fld.random_raw(rng) for _ in range(rng.randrange(6))])
            s = format_poly(f)
            assert parse_poly(fld, s) == f
            assert format_poly(parse_poly(fld, s)) == s


def test_lambda_poly_arithmetic():
    x = DensePoly.x(F3)
    lam = LambdaPoly.lam(F3)
    f = lam ** 2 + LambdaPoly.constant(F3, x) * lam + 2
    assert f.degree == 2
    assert f.is_monic
    assert f.coeff(1) == x
    g = f - lam * x
    assert g == lam ** 2 + 2
    assert (lam + 1) * (lam + 2) == lam ** 2 + 2 + 0 * lam
    assert (lam + 1) * (lam + 2) == lam ** 2 + 2


def test_lambda_eval_poly():
    lam = LambdaPoly.lam(F5)
    x = DensePoly.x(F5)
    f = lam ** 2 - LambdaPoly.constant(F5, x)
    assert f.eval_poly(x) == x * x - x
    assert f.eval_poly(DensePoly.zero(F5)) == -x


def test_lambda_deriv():
    lam = LambdaPoly.lam(F3)
    f = lam ** 3 + lam
    assert f.deriv_lam() == LambdaPoly.constant(F3, 1)


def test_lambda_str():
    lam = LambdaPoly.lam(F3)
    x = DensePoly.x(F3)
    f = lam ** 2 + LambdaPoly.constant(F3, x + 1) * lam + 2
    assert str(f) == "2 + (1 + x) lam + lam^2"
