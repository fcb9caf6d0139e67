import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvmann import mappings as mp
from mvmann.mappings import (DomainError, MeanNonexpConstants, apply, estimate_min_constants,
                             grid_reports, verify_mean_nonexpansive,
                             verify_strictly_pseudocontractive)

ROSTER = [mp.halving(1), mp.halving(3), mp.affine(), mp.disk_rotation(), mp.tripod_retraction(),
          mp.reflection(), mp.identity(), mp.doubling()]


def test_apply_examples():
    h = mp.halving(1)
    assert apply(h, h.space.point((0.8,))).coords == (0.4,)
    d = mp.disk_rotation()
    assert apply(d, d.space.origin) == d.space.origin
    t = mp.tripod_retraction()
    assert apply(t, t.space.point((2, 4))) == t.space.point((2, 2))


def test_apply_outside_domain():
    h = mp.halving(1)
    with pytest.raises(DomainError):
        apply(h, h.space.point((1.5,)))
    with pytest.raises(DomainError):
        apply(h, mp.halving(2).space.point((0, 0)))


def test_domain_boundary_tolerance():
    h = mp.halving(1)
    apply(h, h.space.point((1.0 + 1e-13,)))


@pytest.mark.parametrize("m", ROSTER, ids=lambda m: f"{m.name}-{m.space.id}")
def test_known_fixed_points(m):
    for z in m.known_fixed_points:
        assert m.space.distance(z, apply(m, z)) <= 1e-10


@pytest.mark.parametrize("m", ROSTER, ids=lambda m: f"{m.name}-{m.space.id}")
def test_self_map_closure(m):
    rng = np.random.default_rng(0)
    for _ in range(1000):
        assert m.contains(apply(m, m.sample(rng)))


def test_affine_fixed_point_solves_linear_system():
    M, c = np.array([[0.5, 0.2], [-0.1, 0.4]]), np.array([0.1, -0.2])
    m = mp.affine(M, c)
    z = np.array(m.known_fixed_points[0].coords)
    assert np.allclose(M @ z + c, z, atol=1e-15)


def test_affine_rejects_expansive_matrix_and_small_ball():
    with pytest.raises(ValueError):
        mp.affine([[1.2, 0], [0, 0.1]], [0, 0])
    with pytest.raises(ValueError):
        mp.affine([[0.5, 0], [0, 0.5]], [1.0, 0.0], radius=1.0)


def test_disk_rotation_is_hyperbolic_contraction():
    m = mp.disk_rotation()
    rep = verify_mean_nonexpansive(m, MeanNonexpConstants(0.5, 0.0), 2000, seed=3)
    assert rep.passed


# -- mean nonexpansive verification -------------------------------------------

def test_halving_passes():
    rep = verify_mean_nonexpansive(mp.halving(1), MeanNonexpConstants(0.5, 0.0), 1000, seed=0)
    assert rep.passed and rep.worst_margin >= 0 and rep.witness is None
    assert "not a proof" in rep.note


def test_doubling_fails_with_witness():
    m = mp.doubling()
    c = MeanNonexpConstants(0.6, 0.4)
    rep = verify_mean_nonexpansive(m, c, 1000, seed=0)
    assert not rep.passed
    x, y = (p.coords[0] for p in rep.witness)
    assert abs(2 * x - 2 * y) > c.a * abs(x - y) + c.b * abs(x - 2 * y)
    # a grid of pairs (0, y) violates it too: 2|y| > (a + 2b)|y|
    for y in np.linspace(-1, 1, 21):
        if y != 0:
            assert 2 * abs(y) > (c.a + 2 * c.b) * abs(y)


@pytest.mark.parametrize("m", [mp.halving(1), mp.reflection(), mp.identity(), mp.tripod_retraction()],
                         ids=lambda m: m.name)
def test_nonexpansive_builtins_pass_at_one_zero(m):
    assert verify_mean_nonexpansive(m, MeanNonexpConstants(1.0, 0.0), 500, seed=1).passed


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_verification_monotone_in_constants(a, b, da, db):
    if a + b > 1:
        a, b = a / (a + b), b / (a + b)
    a2, b2 = a + da * (1 - a - b), b
    b2 = b2 + db * (1 - a2 - b2)
    m = mp.affine()
    lo = verify_mean_nonexpansive(m, MeanNonexpConstants(a, b), 200, seed=9)
    hi = verify_mean_nonexpansive(m, MeanNonexpConstants(a2, b2), 200, seed=9)
    assert hi.worst_margin >= lo.worst_margin - 1e-15
    if lo.passed:
        assert hi.passed


def test_constants_validation():
    with pytest.raises(ValueError):
        MeanNonexpConstants(0.7, 0.4)
    with pytest.raises(ValueError):
        MeanNonexpConstants(-0.1, 0.2)


# -- minimal constants -------------------------------------------------------------

def bruteforce_min_constants(m, step, n_samples, seed):
    """Independent grid search: same sample draw, margins recomputed by hand."""
    rng = np.random.default_rng(seed)
    pairs = [(m.sample(rng), m.sample(rng)) for _ in range(n_samples)]
    T = m.fn
    d = m.space._distance
    rows = [(d(x.coords, y.coords), d(x.coords, T(y.coords)), d(T(x.coords), T(y.coords)))
            for x, y in pairs]
    n = round(1 / step)
    found = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            a, b = i * step, j * step
            if all(a * dxy + b * dxty - dtt >= -1e-12 for dxy, dxty, dtt in rows):
                found.append((i + j, j, a, b))
    return min(found)[2:] if found else None


def test_min_constants_halving():
    m = mp.halving(1)
    got = estimate_min_constants(m, 0.05, 500, seed=0)
    assert (got.a, got.b) == pytest.approx(bruteforce_min_constants(m, 0.05, 500, 0))
    assert (got.a, got.b) == pytest.approx((0.5, 0.0))


def test_min_constants_identity():
    got = estimate_min_constants(mp.identity(), 0.05, 500, seed=0)
    assert (got.a, got.b) == (1.0, 0.0)


def test_min_constants_doubling_none():
    assert estimate_min_constants(mp.doubling(), 0.05, 500, seed=0) is None
    assert bruteforce_min_constants(mp.doubling(), 0.05, 500, 0) is None


@pytest.mark.parametrize("m", [mp.affine(), mp.disk_rotation(), mp.tripod_retraction()],
                         ids=lambda m: m.name)
def test_min_constants_pass_their_own_sample(m):
    c = estimate_min_constants(m, 0.05, 300, seed=4)
    assert c is not None
    assert verify_mean_nonexpansive(m, c, 300, seed=4).passed


def test_grid_order_and_size():
    reps = grid_reports(mp.halving(1), 0.25, 50, seed=0)
    keys = [(r.constants.a + r.constants.b, r.constants.b) for r in reps]
    assert keys == sorted(keys)
    assert len(reps) == 15  # (n+1)(n+2)/2 with n = 4


def test_min_constants_bad_grid():
    with pytest.raises(ValueError):
        estimate_min_constants(mp.halving(1), 0.0)


# -- strict pseudocontractivity ---------------------------------------------------

def test_pseudocontractive_examples():
    assert verify_strictly_pseudocontractive(mp.halving(1), 0.0, 500, seed=0).passed
    rep = verify_strictly_pseudocontractive(mp.reflection(), 0.9, 500, seed=0)
    assert rep.passed and rep.witness_pair is None
    bad = verify_strictly_pseudocontractive(mp.doubling(), 0.0, 500, seed=0)
    assert not bad.passed and bad.worst_violation > 0
    x, y = (p.coords[0] for p in bad.witness_pair)
    assert 4 * (x - y) ** 2 > (x - y) ** 2


def test_pseudocontractive_needs_euclidean():
    with pytest.raises(ValueError):
        verify_strictly_pseudocontractive(mp.disk_rotation(), 0.5)


def test_make_mapping():
    assert mp.make_mapping("halving", dim=2).space.dimension == 2
    with pytest.raises(ValueError, match="unknown mapping"):
        mp.make_mapping("shrink")


def test_doubling_domain_is_unbounded():
    m = mp.doubling()
    assert math.isinf(m.domain.radius)
    assert apply(m, m.space.point((10.0,))).coords == (20.0,)
