"""Iteration schemes in geodesic form and the trace-producing driver.

Every affine expression ``(1 - t) x + t y`` of the classical schemes is
replaced by the space's convex mapping ``C(x, y, t)``.  The mean-value--Mann
step is

    omega_n   = C(x_n, T x_n, 1 / (r_n + 1))
    x_{n+1}   = C(x_n, T omega_n, alpha_n)

With ``r_n = 0, alpha_n = 1`` it is ``T(T x_n)``; with
``beta_n = 1 / (r_n + 1)`` it is exactly the Ishikawa step; as
``r_n -> inf`` it approaches the Mann step.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .mappings import DomainError, MappingSpec, apply
from .schedules import Schedule
from .spaces import Point, SpaceModel

__all__ = [
    "SCHEMES",
    "IterationState",
    "IterationTrace",
    "mvm_step",
    "picard_step",
    "mann_step",
    "ishikawa_step",
    "gordon_step",
    "run",
]

log = logging.getLogger(__name__)

CLAMP_TOL = 1e-9
NORM_CAP = 1e12

SCHEMES = ("mvm", "mann", "picard", "ishikawa", "gordon")


@dataclass(frozen=True)
class IterationState:
    n: int
    x: Point
    residual: float
    omega: Point | None = None


@dataclass
class IterationTrace:
    scheme: str
    mapping: str
    space: SpaceModel
    states: list
    ref_fixed_point: Point | None = None
    dist_to_ref: list | None = None
    stop_reason: str = "max_iters"
    r_saturated: bool = False
    clamped_steps: int = 0
    # steps taken with alpha_n exactly 0 or 1, outside the usual [a, b] in (0, 1)
    alpha_boundary_steps: int = 0

    def __len__(self):
        return len(self.states)

    @property
    def points(self) -> list:
        return [s.x for s in self.states]

    @property
    def residuals(self) -> list:
        return [s.residual for s in self.states]

    @property
    def final(self) -> IterationState:
        return self.states[-1]

    @property
    def iterations_to_tol(self) -> int | None:
        return self.final.n if self.stop_reason == "residual_tol" else None


def _keep_in_domain(T: MappingSpec, x: Point) -> tuple[Point, bool]:
    """Clamp round-off escapes back into the domain; real escapes raise."""
    space, R = T.space, T.domain.radius
    if not space.is_finite(x) or math.isinf(R):
        return x, False
    d = space.norm(x)
    if d <= R + 1e-12:
        return x, False
    if d <= R + CLAMP_TOL:
        log.warning("%s: iterate %.3g outside the domain radius, clamped", T.name, d - R)
        return space.retract(x, R), True
    raise DomainError(f"{T.name}: iterate left the domain by {d - R:.3g}")


def mvm_step(T: MappingSpec, x: Point, alpha: float, r: float) -> tuple[Point, Point]:
    """One mean-value--Mann step; returns ``(x_next, omega)``."""
    C = T.space.combine
    omega = C(x, apply(T, x), 1.0 / (r + 1.0))
    x_next = C(x, apply(T, omega), alpha)
    return x_next, omega


def picard_step(T: MappingSpec, x: Point) -> Point:
    return apply(T, x)


def mann_step(T: MappingSpec, x: Point, alpha: float) -> Point:
    return T.space.combine(x, apply(T, x), alpha)


def ishikawa_step(T: MappingSpec, x: Point, alpha: float, beta: float) -> Point:
    C = T.space.combine
    y = C(x, apply(T, x), beta)
    return C(x, apply(T, y), alpha)


def gordon_step(T: MappingSpec, x: Point, n: int) -> Point:
    """Mean-value step ``x_{n+1} = (n x_n + T x_n) / (n + 1)``."""
    return T.space.combine(x, apply(T, x), 1.0 / (n + 1))


def _nearest_fixed_point(T: MappingSpec, x: Point) -> Point | None:
    if not T.known_fixed_points:
        return None
    d = T.space.distance
    return min(T.known_fixed_points, key=lambda z: d(x, z))


def run(scheme: str, T: MappingSpec, x0: Point, sched: Schedule | None = None,
        residual_tol: float = 1e-8, max_iters: int = 100_000) -> IterationTrace:
    """Iterate ``scheme`` from ``x0`` until the residual ``d(x_n, T x_n)`` drops
    to ``residual_tol``, ``max_iters`` steps are taken, or the iterate blows up.

    A blow-up (non-finite coordinates or distance from the origin above
    ``1e12``) ends the run with ``stop_reason = "diverged"``; the partial trace
    is returned.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")
    if residual_tol <= 0 or max_iters < 1:
        raise ValueError("residual_tol must be positive and max_iters >= 1")
    sched = sched or Schedule()
    space = T.space
    d = space.distance
    if not T.contains(x0):
        raise DomainError(f"{T.name}: x0 = {x0.coords} is outside the domain")

    ref = _nearest_fixed_point(T, x0)
    trace = IterationTrace(scheme, T.name, space, [], ref, [] if ref is not None else None)

    def record(n, x, omega=None):
        res = d(x, apply(T, x))
        trace.states.append(IterationState(n, x, res, omega))
        if ref is not None:
            trace.dist_to_ref.append(d(x, ref))
        return res

    x, n = x0, 0
    res = record(0, x)
    while True:
        if not math.isfinite(res):
            trace.stop_reason = "diverged"
            break
        if res <= residual_tol:
            trace.stop_reason = "residual_tol"
            break
        if n >= max_iters:
            trace.stop_reason = "max_iters"
            break
        omega = None
        if scheme in ("mvm", "mann", "ishikawa"):
            trace.alpha_boundary_steps += sched.alpha_at(n) in (0.0, 1.0)
        if scheme == "mvm":
            r, sat = sched.r_value(n)
            trace.r_saturated |= sat
            x_next, omega = mvm_step(T, x, sched.alpha_at(n), r)
        elif scheme == "mann":
            x_next = mann_step(T, x, sched.alpha_at(n))
        elif scheme == "picard":
            x_next = picard_step(T, x)
        elif scheme == "ishikawa":
            r, sat = sched.r_value(n)
            trace.r_saturated |= sat
            x_next = ishikawa_step(T, x, sched.alpha_at(n), 1.0 / (r + 1.0))
        else:
            x_next = gordon_step(T, x, n)
        n += 1
        if not space.is_finite(x_next) or space.norm(x_next) > NORM_CAP:
            trace.stop_reason = "diverged"
            break
        x_next, clamped = _keep_in_domain(T, x_next)
        trace.clamped_steps += clamped
        x = x_next
        res = record(n, x, omega)
    return trace
