"""Finite-trace evidence for the convergence properties of an iteration.

Nothing here proves anything about infinite sequences.  ``limsup`` is
replaced by a max over a stored tail, infima over the space by minima over a
finite candidate set, and "the limit exists" by a Cauchy window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .iteration import IterationTrace
from .spaces import Point, SpaceModel

__all__ = [
    "FEJER_TOL",
    "FejerReport",
    "ResidualProfile",
    "AsymptoticCenterResult",
    "StrongConvergenceResult",
    "BoundedLimitsReport",
    "SubsequenceAgreement",
    "fejer_check",
    "residual_profile",
    "center_objective",
    "asymptotic_center",
    "strong_convergence_check",
    "bounded_limits_check",
    "subsequence_agreement",
    "trace_center",
]

FEJER_TOL = 1e-12
DECADES = tuple(10.0 ** -k for k in range(2, 9))


def _pt(p: Point) -> list:
    return list(p.coords)


@dataclass
class FejerReport:
    reference: Point
    max_increase: float
    passed: bool
    distances: list = field(repr=False)

    def to_dict(self) -> dict:
        return {"reference": _pt(self.reference), "max_increase": self.max_increase,
                "passed": self.passed, "tol": FEJER_TOL}


def fejer_check(trace: IterationTrace, z: Point) -> FejerReport:
    """Largest step-to-step increase of ``d(x_n, z)`` along the trace."""
    space = trace.space
    dist = [space.distance(x, z) for x in trace.points]
    incs = [b - a for a, b in zip(dist, dist[1:])]
    worst = max(incs) if incs else 0.0
    return FejerReport(z, worst, worst <= FEJER_TOL, dist)


@dataclass
class ResidualProfile:
    steps: list
    first_below: dict

    @property
    def final(self) -> float:
        return self.steps[-1][1]

    @property
    def strictly_decreasing(self) -> bool:
        r = [v for _, v in self.steps]
        return all(b < a for a, b in zip(r, r[1:]))

    def to_dict(self) -> dict:
        return {"final_residual": self.final,
                "first_index_below": {f"{k:.0e}": v for k, v in self.first_below.items()}}


def residual_profile(trace: IterationTrace) -> ResidualProfile:
    steps = [(s.n, s.residual) for s in trace.states]
    first = {}
    for thr in DECADES:
        first[thr] = next((n for n, r in steps if r <= thr), None)
    return ResidualProfile(steps, first)


def center_objective(tail: list, c: Point, space: SpaceModel) -> float:
    """``max_n d(x_n, c)`` over the tail, the finite stand-in for ``limsup``."""
    return max(space.distance(x, c) for x in tail)


@dataclass
class AsymptoticCenterResult:
    center_hat: Point
    radius_hat: float
    candidate_count: int
    tail_start: int
    center_index: int

    def to_dict(self) -> dict:
        return {"center_hat": _pt(self.center_hat), "radius_hat": self.radius_hat,
                "candidate_count": self.candidate_count, "tail_start": self.tail_start,
                "center_index": self.center_index}


def asymptotic_center(tail: list, candidates: list, space: SpaceModel,
                      tail_start: int = 0) -> AsymptoticCenterResult:
    """Exact minimizer of :func:`center_objective` over ``candidates``.

    Ties go to the first candidate.
    """
    if not tail or not candidates:
        raise ValueError("tail and candidates must be nonempty")
    best_i, best = 0, math.inf
    for i, c in enumerate(candidates):
        v = center_objective(tail, c, space)
        if v < best:
            best_i, best = i, v
    return AsymptoticCenterResult(candidates[best_i], best, len(candidates), tail_start, best_i)


def trace_center(trace: IterationTrace, extra: list = (),
                 tail_start: int | None = None) -> AsymptoticCenterResult:
    """Asymptotic-center proxy over the tail of a trace (default: last half).

    Candidates are the tail points followed by ``extra``.
    """
    pts = trace.points
    if tail_start is None:
        tail_start = len(pts) // 2
    tail = pts[tail_start:] or pts[-1:]
    return asymptotic_center(tail, list(tail) + list(extra), trace.space, tail_start)


@dataclass
class StrongConvergenceResult:
    converged: bool
    index: int | None
    min_distance: float
    tol: float

    def __bool__(self):
        return self.converged

    def to_dict(self) -> dict:
        return {"converged": self.converged, "index": self.index,
                "min_distance": self.min_distance, "tol": self.tol}


def _dist_to_set(x: Point, fixed_set: list, space: SpaceModel) -> float:
    return min(space.distance(x, z) for z in fixed_set)


def strong_convergence_check(trace: IterationTrace, fixed_set: list,
                             tol: float = 1e-6) -> StrongConvergenceResult:
    """True iff some iterate comes within ``tol`` of ``fixed_set``."""
    space = trace.space
    if not fixed_set:
        raise ValueError("fixed_set must be nonempty")
    best, index = math.inf, None
    for n, x in enumerate(trace.points):
        dn = _dist_to_set(x, fixed_set, space)
        if dn < best:
            best = dn
        if index is None and dn <= tol:
            index = n
    return StrongConvergenceResult(index is not None, index, best, tol)


@dataclass
class BoundedLimitsReport:
    bounded: bool
    max_distance_from_start: float
    distance_decreasing: bool
    distance_converges: bool
    distance_spread: float
    fixed_set_distance_converges: bool | None
    fixed_set_spread: float | None
    window: int
    cauchy_tol: float

    @property
    def all_hold(self) -> bool:
        parts = [self.bounded, self.distance_decreasing, self.distance_converges]
        if self.fixed_set_distance_converges is not None:
            parts.append(self.fixed_set_distance_converges)
        return all(parts)

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "max_distance_from_start": self.max_distance_from_start,
            "distance_decreasing": self.distance_decreasing,
            "distance_converges": self.distance_converges,
            "distance_spread": self.distance_spread,
            "fixed_set_distance_converges": self.fixed_set_distance_converges,
            "fixed_set_spread": self.fixed_set_spread,
            "window": self.window,
            "cauchy_tol": self.cauchy_tol,
            "all_hold": self.all_hold,
        }


def bounded_limits_check(trace: IterationTrace, z: Point,
                       fixed_set: list | None = None, window: int = 100,
                       cauchy_tol: float = 1e-10, cap: float = 1e12) -> BoundedLimitsReport:
    """Boundedness, monotone convergence of ``d(x_n, z)`` and of ``d(x_n, F)``.

    "Converges" means the values over the last ``window`` iterates differ by
    at most ``cauchy_tol``.  A diverged trace is never bounded.
    """
    space = trace.space
    pts = trace.points
    x0 = pts[0]
    spread_from_start = max(space.distance(x0, x) for x in pts)
    bounded = trace.stop_reason != "diverged" and spread_from_start < cap

    dist = [space.distance(x, z) for x in pts]
    decreasing = all(b - a <= FEJER_TOL for a, b in zip(dist, dist[1:]))
    tail = dist[-window:]
    spread = max(tail) - min(tail)

    fs_ok = fs_spread = None
    if fixed_set:
        fd = [_dist_to_set(x, fixed_set, space) for x in pts[-window:]]
        fs_spread = max(fd) - min(fd)
        fs_ok = fs_spread <= cauchy_tol
    return BoundedLimitsReport(bounded, spread_from_start, decreasing, spread <= cauchy_tol,
                              spread, fs_ok, fs_spread, min(window, len(pts)), cauchy_tol)


@dataclass
class SubsequenceAgreement:
    """Centers of ``k`` disjoint arithmetic subsequences of the tail.

    Agreement is a necessary condition for Delta-convergence only.
    """

    centers: list
    max_pairwise_distance: float
    agree: bool
    k: int
    tol: float

    def to_dict(self) -> dict:
        return {"centers": [_pt(c) for c in self.centers],
                "max_pairwise_distance": self.max_pairwise_distance,
                "agree": self.agree, "k": self.k, "tol": self.tol,
                "note": "heuristic necessary condition, not Delta-convergence"}


def subsequence_agreement(trace: IterationTrace, extra: list = (),
                          k: int = 3, tol: float = 1e-6,
                          tail_start: int | None = None) -> SubsequenceAgreement:
    space = trace.space
    pts = trace.points
    if tail_start is None:
        tail_start = len(pts) // 2
    tail = pts[tail_start:] or pts[-1:]
    cands = list(tail) + list(extra)
    centers = []
    for j in range(k):
        sub = tail[j::k] or tail[-1:]
        centers.append(asymptotic_center(sub, cands, space, tail_start).center_hat)
    gap = max((space.distance(p, q) for i, p in enumerate(centers) for q in centers[i + 1:]),
              default=0.0)
    return SubsequenceAgreement(centers, gap, gap <= tol, k, tol)
