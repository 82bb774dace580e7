import json
import math
import random
from fractions import Fraction

import pytest

from bstiling.dynsys import (
    FAIL_IF_AMBIGUOUS, PREFER_HALVING, PREFER_THREE_HALVES, AmbiguousPreimage, BalancedRepSpec,
    Branch, DomainError, NoPreimage, Orbit, PiecewiseLinearMap, apply, balanced_digit,
    balanced_digits, has_periodic_point_upto, interval_average, kari_map, make_orbit,
    orbit_backward, orbit_forward, preimages,
)

F = Fraction
T = kari_map()


def test_map_branches():
    assert T.lo == F(2, 3) and T.hi == 2
    assert apply(T, F(3, 4)) == (F(3, 2), 2)
    assert apply(T, 1) == (2, 2)
    assert apply(T, F(3, 2)) == (1, F(2, 3))
    assert apply(T, 2) == (F(4, 3), F(2, 3))


def test_outside_domain():
    for x in (F(1, 2), F(5, 2), 0):
        with pytest.raises(DomainError):
            apply(T, x)


def test_partition_is_checked():
    with pytest.raises(ValueError):
        PiecewiseLinearMap((Branch(F(0), F(1), True, True, F(2)), Branch(F(1), F(2), True, True, F(1))))


def test_preimages():
    # 4/3 = 2 * 2/3 = 2/3 * 2
    assert sorted(preimages(T, F(4, 3))) == [(F(2, 3), 2), (2, F(2, 3))]
    # 5/8 lies left of the domain, so only the 2/3 branch applies
    assert preimages(T, F(5, 4)) == [(F(15, 8), F(2, 3))]


def test_backward_policies():
    x = F(4, 3)
    assert orbit_backward(T, x, 1, PREFER_HALVING).x(-1) == F(2, 3)
    assert orbit_backward(T, x, 1, PREFER_THREE_HALVES).x(-1) == 2
    with pytest.raises(AmbiguousPreimage):
        orbit_backward(T, x, 1, FAIL_IF_AMBIGUOUS)


def test_no_preimage():
    # nothing maps onto 2/3 from inside the domain except 1/3 (outside) and 1 (slope 2/3 branch excludes 1)
    with pytest.raises(NoPreimage):
        orbit_backward(T, F(2, 3), 1)


def test_orbit_of_five_quarters():
    orb = make_orbit(T, F(5, 4), 3, 3)
    assert orb.x(0) == F(5, 4)
    assert orb.x(1) == F(5, 6) and orb.q(1) == F(2, 3)
    assert orb.x(2) == F(5, 3) and orb.q(2) == 2
    for k in range(orb.k_min + 1, orb.k_max + 1):
        assert orb.x(k) == orb.q(k) * orb.x(k - 1)
        assert apply(T, orb.x(k - 1)) == (orb.x(k), orb.q(k))
    assert orb.q(orb.k_min) is None
    assert not orb.covers(4) and orb.covers(-3)


def test_orbit_json_round_trip():
    orb = make_orbit(T, F(5, 4), 4, 4)
    assert Orbit.from_json(json.loads(json.dumps(orb.to_json()))) == orb


def test_forward_orbit_never_repeats():
    orb = orbit_forward(T, F(5, 4), 200)
    vals = orb.values()
    assert len(set(vals)) == len(vals)
    assert all(T.contains(v) for v in vals)


def test_no_periodic_points():
    assert has_periodic_point_upto(T, 30) is False


def test_periodic_point_detector_positive_case():
    # slopes 2 and 1/2 compose to 1
    f = PiecewiseLinearMap((Branch(F(1, 2), F(1), True, True, F(2)), Branch(F(1), F(2), False, True, F(1, 2))))
    assert has_periodic_point_upto(f, 2)
    assert not has_periodic_point_upto(f, 1)


# -- balanced representations ----------------------------------------------------

def test_balanced_digits_of_five_quarters():
    d = balanced_digits(BalancedRepSpec(F(5, 4)), 1, 12)
    # B_k = floor(5k/4) - floor(5(k-1)/4)
    assert "".join(map(str, d)) == "111211121112"


def test_digits_take_two_values():
    for x in (F(5, 4), F(5, 6), F(5, 3), F(7, 5)):
        ds = set(balanced_digits(BalancedRepSpec(x), -20, 60))
        assert ds <= {math.floor(x), math.floor(x) + 1}


def test_partial_sum_bound_randomized():
    rng = random.Random(11)
    for _ in range(1000):
        x = F(rng.randint(1, 400), rng.randint(1, 200))
        r = F(rng.randint(-50, 50), rng.randint(1, 20))
        k = rng.randint(-100, 100)
        L = rng.randint(1, 60)
        spec = BalancedRepSpec(x, r)
        s = sum(balanced_digits(spec, k + 1, L))
        assert abs(s - L * x) < 1
        assert interval_average(spec, k, L) == F(s, L)


def test_interval_average_rejects_empty():
    with pytest.raises(ValueError):
        interval_average(BalancedRepSpec(F(1)), 0, 0)


def test_balanced_digit_formula():
    spec = BalancedRepSpec(F(5, 3), F(1, 2))
    assert balanced_digit(spec, 4) == math.floor(F(9, 2) * F(5, 3)) - math.floor(F(7, 2) * F(5, 3))
