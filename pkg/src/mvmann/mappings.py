"""Mean nonexpansive self-maps and sampling checks of their constants.

A map ``T`` is mean nonexpansive with constants ``a, b >= 0``, ``a + b <= 1`` if

    d(Tx, Ty) <= a d(x, y) + b d(x, Ty)

for all ``x, y`` in its domain.  ``(a, b) = (1, 0)`` is plain nonexpansiveness.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spaces import Euclidean, Point, PoincareDisk, SpaceModel, TripodTree

__all__ = [
    "DomainError",
    "Domain",
    "MeanNonexpConstants",
    "MappingSpec",
    "VerificationReport",
    "PseudocontractiveReport",
    "apply",
    "verify_mean_nonexpansive",
    "estimate_min_constants",
    "verify_strictly_pseudocontractive",
    "grid_reports",
    "MAPPINGS",
    "make_mapping",
    "halving",
    "affine",
    "disk_rotation",
    "tripod_retraction",
    "reflection",
    "identity",
    "doubling",
]

DOMAIN_TOL = 1e-12


class DomainError(ValueError):
    """A point lies outside a mapping's domain."""


@dataclass(frozen=True)
class Domain:
    """Closed metric ball of ``radius`` around the space origin.

    ``radius`` may be infinite; samples are then drawn from the ball of
    ``sample_radius``.
    """

    radius: float = math.inf
    sample_radius: float | None = None

    @property
    def sampling_radius(self) -> float:
        if self.sample_radius is not None:
            return min(self.sample_radius, self.radius)
        return self.radius

    def contains(self, space: SpaceModel, p: Point, tol: float = DOMAIN_TOL) -> bool:
        return space.is_finite(p) and space.norm(p) <= self.radius + tol

    def sample(self, space: SpaceModel, rng: np.random.Generator) -> Point:
        return space.sample(rng, scale=self.sampling_radius)


@dataclass(frozen=True)
class MeanNonexpConstants:
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError(f"constants must be nonnegative, got a={self.a}, b={self.b}")
        if self.a + self.b > 1 + 1e-12:
            raise ValueError(f"need a + b <= 1, got a + b = {self.a + self.b}")


@dataclass(frozen=True)
class MappingSpec:
    name: str
    space: SpaceModel
    domain: Domain
    fn: Callable[[tuple], tuple] = field(repr=False)
    known_fixed_points: tuple = ()
    claimed_constants: MeanNonexpConstants | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, p: Point) -> Point:
        return apply(self, p)

    def sample(self, rng: np.random.Generator) -> Point:
        return self.domain.sample(self.space, rng)

    def contains(self, p: Point) -> bool:
        return self.domain.contains(self.space, p)


def apply(m: MappingSpec, p: Point) -> Point:
    """Evaluate ``T p``; raises :class:`DomainError` if ``p`` is outside the domain."""
    if p.space_id != m.space.id:
        raise DomainError(f"{m.name}: point from {p.space_id!r}, mapping lives on {m.space.id!r}")
    if not m.contains(p):
        raise DomainError(f"{m.name}: {p.coords} lies outside the domain (radius {m.domain.radius})")
    return Point(m.space.id, m.space._normalize(m.fn(p.coords)))


# ---------------------------------------------------------------------------
# verification

@dataclass
class VerificationReport:
    mapping: str
    constants: MeanNonexpConstants
    passed: bool
    worst_margin: float
    witness: tuple | None
    n_samples: int
    seed: int
    note: str = "sampling evidence over finitely many pairs, not a proof"

    def to_dict(self) -> dict:
        return {
            "mapping": self.mapping,
            "a": self.constants.a,
            "b": self.constants.b,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": None if self.witness is None else [list(p.coords) for p in self.witness],
            "n_samples": self.n_samples,
            "seed": self.seed,
            "note": self.note,
        }


def _margin_tol(m: MappingSpec) -> float:
    # equality cases (e.g. identity at a + b = 1) land within round-off of zero
    return 1e-12 if isinstance(m.space, (Euclidean, TripodTree)) else 1e-10


def _sample_pairs(m: MappingSpec, n_samples: int, seed: int):
    rng = np.random.default_rng(seed)
    pairs = [(m.sample(rng), m.sample(rng)) for _ in range(n_samples)]
    d = m.space.distance
    dxy, dx_ty, dtx_ty = (np.empty(n_samples) for _ in range(3))
    for i, (x, y) in enumerate(pairs):
        tx, ty = apply(m, x), apply(m, y)
        dxy[i], dx_ty[i], dtx_ty[i] = d(x, y), d(x, ty), d(tx, ty)
    return pairs, dxy, dx_ty, dtx_ty


def _verdict(m, c, pairs, dxy, dx_ty, dtx_ty, seed):
    margins = c.a * dxy + c.b * dx_ty - dtx_ty
    i = int(np.argmin(margins))
    worst = float(margins[i])
    passed = worst >= -_margin_tol(m)
    return VerificationReport(m.name, c, passed, worst, None if passed else pairs[i],
                              len(pairs), seed)


def verify_mean_nonexpansive(m: MappingSpec, c: MeanNonexpConstants, n_samples: int = 1000,
                             seed: int = 0) -> VerificationReport:
    """Check ``d(Tx, Ty) <= a d(x, y) + b d(x, Ty)`` over sampled domain pairs.

    ``worst_margin`` is the smallest ``RHS - LHS`` seen; on failure the
    witnessing pair is attached.
    """
    return _verdict(m, c, *_sample_pairs(m, n_samples, seed), seed)


def _grid(step: float):
    n = int(math.floor(1.0 / step + 1e-9))
    cells = [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]
    # smallest a + b first, then smallest b
    cells.sort(key=lambda ij: (ij[0] + ij[1], ij[1]))
    return [MeanNonexpConstants(i * step, j * step) for i, j in cells]


def estimate_min_constants(m: MappingSpec, grid_step: float = 0.05, n_samples: int = 1000,
                           seed: int = 0) -> MeanNonexpConstants | None:
    """Smallest ``(a + b, b)`` grid point of the simplex that passes verification.

    Every grid point is tested against the same sample set, the one
    :func:`verify_mean_nonexpansive` draws for the same ``n_samples`` and
    ``seed``.  Returns ``None`` when no grid point passes.
    """
    if not 0 < grid_step <= 1:
        raise ValueError("grid_step must lie in (0, 1]")
    sample = _sample_pairs(m, n_samples, seed)
    for c in _grid(grid_step):
        if _verdict(m, c, *sample, seed).passed:
            return c
    return None


def grid_reports(m: MappingSpec, grid_step: float = 0.05, n_samples: int = 1000,
                 seed: int = 0) -> list[VerificationReport]:
    """Verification report for every grid point of the simplex, in search order."""
    sample = _sample_pairs(m, n_samples, seed)
    return [_verdict(m, c, *sample, seed) for c in _grid(grid_step)]


@dataclass
class PseudocontractiveReport:
    k: float
    passed: bool
    worst_violation: float
    witness_pair: tuple | None
    n_samples: int
    seed: int


def verify_strictly_pseudocontractive(m: MappingSpec, k: float, n_samples: int = 1000,
                                      seed: int = 0) -> PseudocontractiveReport:
    """Check ``|Tx-Ty|^2 <= |x-y|^2 + k |(I-T)x - (I-T)y|^2`` by sampling.

    Only defined on Euclidean spaces.  ``worst_violation`` is the largest
    ``LHS - RHS``; it is positive exactly when a witness pair is reported.
    """
    if not isinstance(m.space, Euclidean):
        raise ValueError("strict pseudocontractivity needs a normed (Euclidean) space")
    if not 0 <= k < 1:
        raise ValueError("k must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    worst, witness = -math.inf, None
    for _ in range(n_samples):
        x, y = m.sample(rng), m.sample(rng)
        xv, yv = np.array(x.coords), np.array(y.coords)
        txv, tyv = np.array(apply(m, x).coords), np.array(apply(m, y).coords)
        lhs = np.sum((txv - tyv) ** 2)
        rhs = np.sum((xv - yv) ** 2) + k * np.sum(((xv - txv) - (yv - tyv)) ** 2)
        v = float(lhs - rhs)
        if v > worst:
            worst = v
            witness = (x, y) if v > 0 else None
    return PseudocontractiveReport(k, worst <= 0, worst, witness, n_samples, seed)


# ---------------------------------------------------------------------------
# built-in roster

def halving(dim: int = 1, radius: float = 1.0) -> MappingSpec:
    space = Euclidean(dim)
    return MappingSpec("halving", space, Domain(radius), lambda c: tuple(x / 2.0 for x in c),
                       (space.origin,), MeanNonexpConstants(0.5, 0.0),
                       {"dim": dim, "radius": radius})


def affine(matrix=((0.5, 0.2), (-0.1, 0.4)), offset=(0.1, -0.2), radius: float | None = None,
           name: str = "affine") -> MappingSpec:
    """``x -> M x + c`` on a Euclidean ball.

    Requires ``||M||_2 < 1``.  With no ``radius`` the smallest ball with
    ``||M|| R + ||c|| <= R`` is used, which is mapped into itself.
    """
    M = np.array(matrix, dtype=float)
    c = np.array(offset, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != c.shape[0]:
        raise ValueError("affine: matrix must be square and match the offset length")
    norm = float(np.linalg.norm(M, 2))
    if norm >= 1:
        raise ValueError(f"affine: need operator norm < 1, got {norm:.6g}")
    need = float(np.linalg.norm(c)) / (1.0 - norm)
    if radius is None:
        radius = max(1.0, need)
    elif radius < need - 1e-12:
        raise ValueError(f"affine: radius {radius} too small for a self-map (need >= {need:.6g})")
    z = np.linalg.solve(np.eye(len(c)) - M, c)
    space = Euclidean(len(c))
    rows = [tuple(float(v) for v in row) for row in M]
    off = tuple(float(v) for v in c)

    def fn(x):
        return tuple(math.fsum([*(r * xi for r, xi in zip(row, x)), o]) for row, o in zip(rows, off))

    return MappingSpec(name, space, Domain(radius), fn, (space.point(z),),
                       MeanNonexpConstants(min(norm, 1.0), 0.0),
                       {"matrix": [list(r) for r in rows], "offset": list(off), "radius": radius})


def disk_rotation(factor: float = 0.5, angle: float = math.pi / 4,
                  euclidean_radius: float = 0.9) -> MappingSpec:
    """``z -> factor * e^{i angle} z`` on the Poincare disk.

    Holomorphic self-map of the disk, so Schwarz-Pick makes it a contraction
    of the hyperbolic metric with constant ``factor`` (attained at 0).
    """
    if not 0 <= factor < 1:
        raise ValueError("disk_rotation: factor must lie in [0, 1)")
    space = PoincareDisk()
    rot = cmath.rect(factor, angle)

    def fn(c):
        w = rot * complex(c[0], c[1])
        return (w.real, w.imag)

    return MappingSpec("disk_rotation", space, Domain(2.0 * math.atanh(euclidean_radius)), fn,
                       (space.origin,), MeanNonexpConstants(factor, 0.0),
                       {"factor": factor, "angle": angle, "euclidean_radius": euclidean_radius})


def tripod_retraction(factor: float = 0.5, leg_bound: float = 5.0) -> MappingSpec:
    """``(leg, t) -> (leg, factor * t)``: scales every leg toward the origin."""
    if not 0 <= factor < 1:
        raise ValueError("tripod_retraction: factor must lie in [0, 1)")
    space = TripodTree()
    return MappingSpec("tripod_retraction", space, Domain(leg_bound),
                       lambda c: (c[0], factor * c[1]), (space.origin,),
                       MeanNonexpConstants(factor, 0.0),
                       {"factor": factor, "leg_bound": leg_bound})


def reflection(dim: int = 1, radius: float = 1.0) -> MappingSpec:
    space = Euclidean(dim)
    return MappingSpec("reflection", space, Domain(radius), lambda c: tuple(-x for x in c),
                       (space.origin,), MeanNonexpConstants(1.0, 0.0),
                       {"dim": dim, "radius": radius})


def identity(dim: int = 1, radius: float = 1.0) -> MappingSpec:
    space = Euclidean(dim)
    return MappingSpec("identity", space, Domain(radius), lambda c: c, (space.origin,),
                       MeanNonexpConstants(1.0, 0.0), {"dim": dim, "radius": radius})


def doubling(dim: int = 1, sample_radius: float = 1.0) -> MappingSpec:
    """``x -> 2x`` on all of ``R^n``.  Not mean nonexpansive; negative control."""
    space = Euclidean(dim)
    return MappingSpec("doubling", space, Domain(math.inf, sample_radius),
                       lambda c: tuple(2.0 * x for x in c), (space.origin,), None,
                       {"dim": dim, "sample_radius": sample_radius})


MAPPINGS: dict[str, Callable[..., MappingSpec]] = {
    "halving": halving,
    "affine": affine,
    "disk_rotation": disk_rotation,
    "tripod_retraction": tripod_retraction,
    "reflection": reflection,
    "identity": identity,
    "doubling": doubling,
}

#: the space kind each built-in lives on
MAPPING_SPACES = {
    "halving": "euclidean",
    "affine": "euclidean",
    "disk_rotation": "poincare",
    "tripod_retraction": "tripod",
    "reflection": "euclidean",
    "identity": "euclidean",
    "doubling": "euclidean",
}


def make_mapping(name: str, **params) -> MappingSpec:
    try:
        factory = MAPPINGS[name]
    except KeyError:
        raise ValueError(f"unknown mapping {name!r}; available: {', '.join(MAPPINGS)}") from None
    return factory(**params)
