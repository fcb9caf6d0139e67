import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvmann.schedules import (R_MAX, Constant, Explicit, FromBeta, Geometric, Harmonic,
                              HarmonicComplement, Schedule, rule_from_config)


def test_alpha_rules():
    assert Schedule(alpha=Constant(0.5)).alpha_at(7) == 0.5
    assert all(Schedule(alpha=Constant(1)).alpha_at(n) == 1 for n in range(5))
    assert Schedule(alpha=HarmonicComplement()).alpha_at(0) == 0.5


def test_r_rules():
    assert Schedule(r=Geometric(2)).r_at(10) == 1024
    assert Schedule(r=FromBeta(Constant(0.25))).r_at(3) == 3
    assert all(Schedule(r=Constant(0)).r_at(n) == 0 for n in range(5))
    assert Schedule(r=Harmonic()).r_at(3) == 0.25


def test_saturation_flag():
    s = Schedule(r=Geometric(2))
    assert s.r_value(60) == (min(2.0 ** 60, R_MAX), True)
    assert s.is_saturated(60) and not s.is_saturated(10)
    assert s.r_at(10_000) == R_MAX


def test_explicit_exhausted():
    s = Schedule(alpha=Explicit([0.2, 0.3]))
    assert s.alpha_at(1) == 0.3
    with pytest.raises(IndexError):
        s.alpha_at(2)


@pytest.mark.parametrize("kwargs", [
    {"alpha": Constant(1.5)},
    {"alpha": Explicit([0.5, -0.1])},
    {"r": Constant(-1)},
    {"r": FromBeta(Constant(0.0))},
    {"r": FromBeta(Explicit([0.5, 1.2]))},
])
def test_invalid_schedules(kwargs):
    with pytest.raises(ValueError):
        Schedule(**kwargs)


def test_negative_index():
    with pytest.raises(ValueError):
        Schedule().alpha_at(-1)


@given(st.floats(1e-12, 1.0))
def test_beta_round_trip(beta):
    s = Schedule(r=FromBeta(Constant(beta)))
    assert abs(1.0 / (s.r_at(0) + 1.0) - beta) <= 1e-14
    assert abs(s.beta_at(5) - beta) <= 1e-14


@given(st.integers(0, 2000))
def test_ranges(n):
    for s in (Schedule(HarmonicComplement(), Geometric(2)), Schedule(Constant(0.3), Harmonic())):
        assert 0 <= s.alpha_at(n) <= 1
        assert 0 <= s.r_at(n) <= R_MAX


def test_rule_from_config():
    assert rule_from_config({"kind": "constant", "value": 0.3}, "alpha") == Constant(0.3)
    assert rule_from_config({"kind": "geometric", "base": 3}, "r") == Geometric(3.0)
    assert rule_from_config({"kind": "from_beta", "list": [0.5]}, "r") == FromBeta(Explicit([0.5]))
    with pytest.raises(ValueError):
        rule_from_config({"kind": "geometric"}, "alpha")
