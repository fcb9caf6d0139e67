import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvmann import diagnostics as dg
from mvmann import mappings as mp
from mvmann.iteration import IterationState, IterationTrace, run
from mvmann.schedules import Constant, Schedule
from mvmann.spaces import Euclidean, PoincareDisk, TripodTree

H = mp.halving(1)
ZERO = H.space.origin


@pytest.fixture(scope="module")
def halving_trace():
    return run("mvm", H, H.space.point((1.0,)), Schedule(Constant(0.5), Constant(1.0)), 1e-8)


@pytest.fixture(scope="module")
def long_halving_trace():
    # run past the residual tolerance so the last 100 steps form a Cauchy window
    return run("mvm", H, H.space.point((1.0,)), Schedule(Constant(0.5), Constant(1.0)), 1e-300, 300)


@pytest.fixture(scope="module")
def doubling_trace():
    m = mp.doubling()
    return run("picard", m, m.space.point((1.0,)), residual_tol=1e-8, max_iters=1000)


def constant_trace(z, n=5):
    space = Euclidean(len(z.coords))
    return IterationTrace("mvm", "const", space, [IterationState(i, z, 0.0) for i in range(n)])


def test_fejer(halving_trace, doubling_trace):
    rep = dg.fejer_check(halving_trace, ZERO)
    assert rep.passed and rep.max_increase <= 0
    assert len(rep.distances) == len(halving_trace)
    const = dg.fejer_check(constant_trace(ZERO), ZERO)
    assert const.passed and all(d == 0 for d in const.distances)
    bad = dg.fejer_check(doubling_trace, ZERO)
    assert not bad.passed and bad.max_increase > 0


def test_residual_profile(halving_trace, doubling_trace):
    prof = dg.residual_profile(halving_trace)
    assert prof.strictly_decreasing and prof.final <= 1e-8
    assert prof.first_below[1e-8] == halving_trace.final.n
    firsts = [prof.first_below[t] for t in dg.DECADES]
    assert firsts == sorted(firsts)
    assert all(r == 0 for _, r in dg.residual_profile(constant_trace(ZERO)).steps)
    res = [r for _, r in dg.residual_profile(doubling_trace).steps]
    assert all(b > a for a, b in zip(res, res[1:]))


def brute_center(tail, cands, space):
    vals = [max(space.distance(x, c) for x in tail) for c in cands]
    best = min(vals)
    return vals.index(best), best


def test_center_constant_tail():
    res = dg.asymptotic_center([ZERO] * 4, [H.space.point((0.3,)), ZERO], H.space)
    assert res.center_hat == ZERO and res.radius_hat == 0


def test_center_convergent_tail(halving_trace):
    tail = halving_trace.points[-50:]
    cands = tail + [ZERO]
    res = dg.asymptotic_center(tail, cands, H.space)
    i, best = brute_center(tail, cands, H.space)
    assert res.center_index == i and res.radius_hat == best
    # the minimax point of a one-sided tail sits inside it, near 0
    assert H.space.distance(res.center_hat, ZERO) <= res.radius_hat
    assert res.radius_hat <= tail[0].coords[0]


@pytest.mark.parametrize("space,p,q", [
    (Euclidean(2), (0.2, 0.1), (-0.5, 0.4)),
    (PoincareDisk(), (0.3, 0.6), (-0.7, 0.1)),
    (TripodTree(), (0, 1.5), (2, 2.0)),
], ids=["euclidean", "poincare", "tripod"])
def test_center_alternating_pair(space, p, q):
    p, q = space.point(p), space.point(q)
    m = space.combine(p, q, 0.5)
    tail = [p, q] * 10
    res = dg.asymptotic_center(tail, [p, q, m], space)
    assert brute_center(tail, [p, q, m], space)[0] == 2
    assert res.center_hat == m
    assert res.radius_hat == pytest.approx(space.distance(p, q) / 2, abs=1e-12)


def test_center_ties_go_first():
    p, q = H.space.point((0.5,)), H.space.point((-0.5,))
    res = dg.asymptotic_center([ZERO], [p, q], H.space)
    assert res.center_index == 0


def test_center_requires_input():
    with pytest.raises(ValueError):
        dg.asymptotic_center([], [ZERO], H.space)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=20),
       st.lists(st.floats(-1, 1), min_size=1, max_size=20))
def test_center_is_exact_argmin(tail, cands):
    sp = H.space
    tail, cands = [sp.point((t,)) for t in tail], [sp.point((c,)) for c in cands]
    res = dg.asymptotic_center(tail, cands, sp)
    for c in cands:
        assert dg.center_objective(tail, c, sp) >= res.radius_hat


def test_center_radius_shrinks_with_later_tail():
    tr = run("mvm", H, H.space.point((1.0,)), Schedule(Constant(0.1), Constant(1.0)), 1e-300, 400)
    a = dg.trace_center(tr, [ZERO], tail_start=100)
    b = dg.trace_center(tr, [ZERO], tail_start=200)
    assert H.space.distance(b.center_hat, ZERO) <= H.space.distance(a.center_hat, ZERO) + 1e-12
    assert b.radius_hat <= a.radius_hat + 1e-12


def test_strong_convergence(halving_trace, doubling_trace):
    r = dg.strong_convergence_check(halving_trace, [ZERO], 1e-6)
    assert r.converged and r.index is not None
    z = dg.strong_convergence_check(constant_trace(ZERO), [ZERO], 1e-6)
    assert z.converged and z.index == 0
    assert not dg.strong_convergence_check(doubling_trace, [ZERO], 1e-6)
    with pytest.raises(ValueError):
        dg.strong_convergence_check(halving_trace, [], 1e-6)


@given(st.floats(1e-12, 1.0), st.floats(1.0, 100.0))
@settings(deadline=None, max_examples=30)
def test_strong_convergence_monotone_in_tol(tol, factor):
    tr = run("mann", H, H.space.point((1.0,)), Schedule(Constant(0.3)), 1e-5, 200)
    if dg.strong_convergence_check(tr, [ZERO], tol):
        assert dg.strong_convergence_check(tr, [ZERO], tol * factor)


def test_bounded_limits(long_halving_trace, doubling_trace):
    rep = dg.bounded_limits_check(long_halving_trace, ZERO, [ZERO])
    assert rep.bounded and rep.distance_decreasing and rep.distance_converges
    assert rep.fixed_set_distance_converges and rep.all_hold
    assert dg.bounded_limits_check(constant_trace(ZERO), ZERO, [ZERO]).all_hold
    assert not dg.bounded_limits_check(doubling_trace, ZERO).bounded


def test_subsequence_agreement(long_halving_trace):
    agr = dg.subsequence_agreement(long_halving_trace, [ZERO], k=3)
    assert agr.agree and len(agr.centers) == 3
    # a two-cycle that never settles: even and odd subsequences disagree
    p, q = H.space.point((0.5,)), H.space.point((-0.5,))
    states = [IterationState(i, p if i % 2 == 0 else q, 1.0) for i in range(40)]
    tr = IterationTrace("mvm", "flip", H.space, states)
    assert not dg.subsequence_agreement(tr, k=2, tail_start=0).agree


def test_reports_serialize(halving_trace):
    for rep in (dg.fejer_check(halving_trace, ZERO), dg.residual_profile(halving_trace),
                dg.trace_center(halving_trace, [ZERO]),
                dg.strong_convergence_check(halving_trace, [ZERO]),
                dg.bounded_limits_check(halving_trace, ZERO, [ZERO]),
                dg.subsequence_agreement(halving_trace, [ZERO])):
        assert isinstance(rep.to_dict(), dict)


def test_fejer_disk_trace():
    m = mp.disk_rotation()
    tr = run("mvm", m, m.space.point((0.7, 0.3)), Schedule(Constant(0.5), Constant(1.0)))
    assert dg.fejer_check(tr, m.space.origin).passed
    assert np.isfinite(tr.final.residual)
