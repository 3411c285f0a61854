import math
import random
from fractions import Fraction

import pytest

from loft.errors import OrderError
from loft.field import FieldElement, NumberField, field_lambda6, field_sqrt2


def test_sqrt2_basic_signs():
    F = field_sqrt2()
    r = F.root_power(1)
    assert r.sign() == 1
    assert (r * r - 2).is_zero()
    assert (r - 1).sign() == 1
    assert (r - 2).sign() == -1
    # 1 < sqrt2 < 3/2 is false; sqrt2 > 7/5, sqrt2 < 3/2
    assert (r - Fraction(7, 5)).sign() == 1
    assert (r - Fraction(3, 2)).sign() == -1


def test_lambda6_defining_relation():
    F = field_lambda6()
    lam = F.root_power(1)
    powed = lam
    for _ in range(5):
        powed = powed * lam
    # lam^6 = lam + 1
    assert (powed - lam - 1).is_zero()
    assert 1.1 < F.float_root() < 1.2


def test_float_value_matches():
    F = field_sqrt2()
    r = F.root_power(1)
    assert math.isclose(float(r), math.sqrt(2), rel_tol=1e-12)
    lam = field_lambda6().root_power(1)
    x = float(lam)
    assert math.isclose(x ** 6, x + 1, rel_tol=1e-10)


def test_arithmetic_against_floats():
    F = field_lambda6()
    rng = random.Random(7)
    for _ in range(50):
        a = F.element([Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(6)])
        b = F.element([Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(6)])
        assert math.isclose(float(a + b), float(a) + float(b), rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(float(a - b), float(a) - float(b), rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(float(a * b), float(a) * float(b), rel_tol=1e-9, abs_tol=1e-9)


def test_inverse():
    F = field_lambda6()
    rng = random.Random(11)
    for _ in range(20):
        coords = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(6)]
        a = F.element(coords)
        if a.is_zero():
            continue
        assert (a * a.inverse() - 1).is_zero()
    with pytest.raises(ZeroDivisionError):
        F.zero.inverse()


def test_division():
    F = field_sqrt2()
    r = F.root_power(1)
    half = (r * r) / 4
    assert (half - Fraction(1, 2)).is_zero()
    assert ((1 / r) * r - 1).is_zero()


def test_comparisons_total_order():
    F = field_sqrt2()
    r = F.root_power(1)
    vals = [F.rational(1), r, F.rational(Fraction(3, 2)), r + 1, F.rational(3)]
    for i in range(len(vals)):
        for j in range(len(vals)):
            a, b = vals[i], vals[j]
            assert (a < b) == (float(a) < float(b) - 1e-12 or (i != j and float(a) < float(b)))


def test_sign_of_tiny_but_nonzero():
    # lam^5 - nearby rational: forces deep refinement but must terminate.
    F = field_lambda6()
    lam5 = F.root_power(5)
    approx = Fraction(float(lam5)).limit_denominator(10 ** 12)
    d = lam5 - approx
    assert d.sign() in (-1, 1)


def test_mixed_field_rejected():
    a = field_sqrt2().root_power(1)
    b = field_lambda6().root_power(1)
    with pytest.raises(OrderError):
        _ = a + b


def test_monic_required():
    with pytest.raises(OrderError):
        NumberField("bad", [1, 2], (0, 1))
