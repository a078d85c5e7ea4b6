import math
import random

import pytest

from ivif_lexopt.ivifn import (
    Interval, Ivifn, IvifnError, LINEAR, NestingViolated, OutOfRange, ShapeMismatch, ShapeSpec,
    SpreadNegative, add, alpha_beta_cuts, alpha_cuts, beta_cuts, characteristic_points, cuts,
    format_ivifn, integrate, is_nonnegative, membership, mul, parse_tuple, scalar_mul,
    sign_class, sub, supports, validate,
)

import oracles


def tup(x):
    return x.as_tuple()


def close(x, y, tol=1e-9):
    return all(abs(p - q) <= tol * (1 + abs(q)) for p, q in zip(tup(x), y))


def test_validate_worked_number(five):
    assert five.a == 5 and five.spreads == (2, 2, 3, 3, 5, 5, 5, 4)


def test_validate_crisp_zero():
    z = validate(0, [0] * 8)
    assert z.is_crisp()


def test_validate_names_nesting_pair():
    with pytest.raises(NestingViolated, match="l_mu_U"):
        validate(5, (3, 2, 2, 3, 5, 5, 5, 4))


def test_validate_negative_spread():
    with pytest.raises(SpreadNegative):
        validate(1, (-1, 0, 0, 0, 0, 0, 0, 0))


def test_validate_rejects_nan():
    with pytest.raises(IvifnError):
        validate(math.nan, [0] * 8)


def test_parse_and_format_roundtrip(five):
    assert format_ivifn(five) == "(5;2,2,3,3;5,5,5,4)"
    assert parse_tuple("(5;2,2,3,3;5,5,5,4)_LR") == five
    with pytest.raises(IvifnError):
        parse_tuple("(1;2;3)")


def test_json_roundtrip(five):
    assert Ivifn.from_json(five.to_json()) == five
    assert Ivifn.from_json(3) == Ivifn.crisp(3)
    with pytest.raises(IvifnError):
        Ivifn.from_json({"a": 1})


def test_supports(five, eight):
    assert supports(five) == ((3, 7), (2, 8), (0, 9), (0, 10))
    assert supports(eight) == ((7, 9), (6, 10), (6, 11), (4, 12))
    assert all(s == (0, 0) for s in supports(Ivifn.crisp(0)))


def test_alpha_cuts(five):
    lo, up = alpha_cuts(five, 1.0)
    assert lo == (5, 5) and up == (5, 5)
    lo, _ = alpha_cuts(five, 0.5)
    assert lo == (4, 6)


def test_beta_cuts(five):
    lo, _ = beta_cuts(five, 0.5)
    assert lo == (2.5, 7.5)


def test_cuts_range_checks(five):
    with pytest.raises(OutOfRange):
        cuts(five, 0.7, 0.6)
    with pytest.raises(OutOfRange):
        alpha_cuts(five, 0.0)
    c = cuts(five, 0.3, 0.4)
    assert isinstance(c.alpha_lower, Interval)
    assert alpha_beta_cuts(five, 0.3, 0.4)


def test_cuts_nested_in_supports_and_shrinking():
    rng = random.Random(3)
    for _ in range(200):
        x = validate(oracles.random_number(rng)[0], oracles.random_number(rng)[1:])
        sup = supports(x)
        prev = None
        for al in (0.1, 0.4, 0.7, 1.0):
            lo, up = alpha_cuts(x, al)
            assert sup.mu_L.contains(lo) and sup.mu_U.contains(up)
            if prev:
                assert prev[0].contains(lo) and prev[1].contains(up)
            prev = (lo, up)


def test_add_sub(five, eight):
    assert tup(add(five, eight)) == (13, 3, 3, 5, 5, 9, 9, 7, 7)
    # cross sums: l'_nu_U = 2 + r'_nu_U(5) = 6, r'_nu_U = 3 + l'_nu_U(5) = 8
    assert tup(sub(eight, five)) == (3, 3, 3, 5, 5, 9, 9, 6, 8)
    one = parse_tuple("(1;1,1,1,1;1,1,1,1)")
    m1 = parse_tuple("(-1;1,1,1,1;1,1,1,1)")
    assert tup(add(one, m1)) == (0, 2, 2, 2, 2, 2, 2, 2, 2)
    assert add(five, Ivifn.crisp(0)) == five
    assert sub(five, Ivifn.crisp(0)) == five
    assert not sub(five, five).is_crisp()


def test_scalar_mul():
    twelve = parse_tuple("(12;2,3,4,4;6,8,4,4)")
    assert tup(scalar_mul(10, twelve)) == (120, 20, 30, 40, 40, 60, 80, 40, 40)
    assert tup(scalar_mul(-1, parse_tuple("(5;2,2,3,3;5,5,5,4)"))) == (-5, 2, 2, 3, 3, 5, 5, 4, 5)
    assert scalar_mul(0, twelve).is_crisp()


def test_mul_worked_numbers(five, eight):
    assert tup(mul(five, eight)) == (40, 19, 23, 28, 40, 40, 80, 40, 59)
    assert mul(five, Ivifn.crisp(1)) == five
    assert mul(five, Ivifn.crisp(0)).is_crisp()


def test_mul_matches_class_formulas():
    rng = random.Random(11)
    for k in range(1, 11):
        for _ in range(100):
            x = oracles.random_number_in_class(rng, k)
            y = oracles.random_number(rng)
            got = tup(mul(validate(x[0], x[1:]), validate(y[0], y[1:])))
            want = oracles.prop_mul(x, y)
            assert all(abs(g - w) <= 1e-9 * (1 + abs(w)) for g, w in zip(got, want)), (k, x, y)


def test_mul_support_hull():
    rng = random.Random(5)
    for _ in range(200):
        x = validate(*(lambda t: (t[0], t[1:]))(oracles.random_number(rng)))
        y = validate(*(lambda t: (t[0], t[1:]))(oracles.random_number(rng)))
        z = mul(x, y)
        for sx, sy, sz in zip(supports(x), supports(y), supports(z)):
            prods = [u * v for u in sx for v in sy]
            assert abs(min(prods) - sz.lo) < 1e-9 and abs(max(prods) - sz.hi) < 1e-9


def test_shape_mismatch():
    odd = ShapeSpec.custom("sq", lambda t: max(0.0, 1 - t) ** 2, lambda al: 1 - math.sqrt(al))
    x = validate(1, [1] * 8, shapes=(odd,) * 4)
    with pytest.raises(ShapeMismatch):
        add(x, Ivifn.crisp(1))


def test_custom_shape_integral():
    odd = ShapeSpec.custom("sq", lambda t: max(0.0, 1 - t) ** 2, lambda al: 1 - math.sqrt(al))
    assert abs(odd.inverse_integral - 1 / 3) < 1e-8
    assert abs(LINEAR.inverse_integral - 0.5) < 1e-12
    assert abs(integrate(lambda t: t * t, 0, 1) - 1 / 3) < 1e-10


def test_sign_class_examples(five):
    assert sign_class(five) == 1
    assert sign_class(Ivifn.crisp(0)) == 1
    neg = parse_tuple("(-5;2,2,3,3;5,5,4,5)")
    assert characteristic_points(neg) == (-10, -9, -8, -7, -5, -3, -2, 0, 0)
    # a + r'_nu_U is already 0, so the first point >= 0 is the eighth
    assert sign_class(neg) == 8
    assert sign_class(parse_tuple("(-5;1,1,1,1;1,1,1,1)")) == 10
    assert is_nonnegative(five) and not is_nonnegative(neg)


def test_sign_class_matches_oracle():
    rng = random.Random(2)
    for k in range(1, 11):
        x = oracles.random_number_in_class(rng, k)
        assert sign_class(validate(x[0], x[1:])) == k


def test_membership_at_mean_and_ends():
    z = parse_tuple("(3138.94;410.44,569.18,735.66,723.92;1454.84,1669.39,1050.39,1229.97)")
    assert membership(z, z.a) == (1.0, 1.0, 0.0, 0.0)
    mu_l, mu_u, nu_l, nu_u = membership(z, z.a - z.l_nu_L)
    assert mu_l == mu_u == 0 and abs(nu_l - 1) < 1e-12
    assert abs(membership(z, z.a + z.r_nu_L)[2] - 1) < 1e-12


def test_membership_orderings():
    rng = random.Random(8)
    for _ in range(200):
        t = oracles.random_number(rng)
        x = validate(t[0], t[1:])
        for s in (rng.uniform(x.a - x.l_nu_L, x.a + x.r_nu_L) for _ in range(10)):
            mu_l, mu_u, nu_l, nu_u = membership(x, s)
            assert mu_l <= mu_u + 1e-12
            assert nu_l <= nu_u + 1e-12
            assert 0 <= mu_l <= 1 and 0 <= nu_u <= 1


def test_operators(five, eight):
    assert five + eight == add(five, eight)
    assert five - eight == sub(five, eight)
    assert five * eight == mul(five, eight)
    assert 2 * five == scalar_mul(2, five)
    assert -five == scalar_mul(-1, five)
