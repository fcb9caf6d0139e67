"""Hyperbolic (W-convex) model spaces.

Each model provides a metric ``distance`` and a convex mapping
``combine(p, q, lam)`` that returns the point a fraction ``lam`` of the way
along the geodesic from ``p`` to ``q``, so ``combine(p, q, 0) == p``.

Three models are provided:

* :class:`Euclidean` -- ``R^n`` with the norm metric, ``C(x, y, a) = (1-a)x + ay``.
* :class:`PoincareDisk` -- the hyperbolic plane in the Poincare disk model.
* :class:`TripodTree` -- three half-lines glued at a common origin (a metric tree).

All of them are CAT(0), hence W-hyperbolic spaces and
uniformly convex.  :func:`verify_axioms` and :func:`estimate_modulus` check
this empirically.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpaceMismatchError",
    "Point",
    "SpaceModel",
    "Euclidean",
    "PoincareDisk",
    "TripodTree",
    "AxiomReport",
    "ModulusSample",
    "ModulusEstimationError",
    "verify_axioms",
    "estimate_modulus",
    "make_space",
]


class SpaceMismatchError(ValueError):
    """Points from different spaces were combined."""


@dataclass(frozen=True)
class Point:
    space_id: str
    coords: tuple

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


class SpaceModel:
    """Base class: a metric plus a convex mapping.

    Subclasses implement ``_distance``, ``_combine``, ``_sample``,
    ``_sample_near`` and ``_reflect`` on raw coordinate tuples.
    """

    kind: str = ""
    dimension: int = 0
    #: tolerance used for axiom and geodesic checks
    tol: float = 1e-9
    #: radius (around the origin) of the default sampling domain
    sample_radius: float = 1.0

    @property
    def id(self) -> str:
        return self.kind

    def __repr__(self):
        return f"{type(self).__name__}({self.id!r})"

    def __eq__(self, other):
        return isinstance(other, SpaceModel) and self.id == other.id

    def __hash__(self):
        return hash(self.id)

    # -- points ----------------------------------------------------------
    def point(self, coords) -> Point:
        coords = self._normalize(tuple(float(c) for c in coords))
        self._validate(coords)
        return Point(self.id, coords)

    @property
    def origin(self) -> Point:
        return Point(self.id, self._normalize((0.0,) * self.dimension))

    def _normalize(self, coords: tuple) -> tuple:
        return coords

    def _validate(self, coords: tuple) -> None:
        if len(coords) != self.dimension:
            raise ValueError(
                f"{self.id}: expected {self.dimension} coordinates, got {len(coords)}"
            )

    def _check(self, *points: Point) -> None:
        for p in points:
            if p.space_id != self.id:
                raise SpaceMismatchError(
                    f"point belongs to {p.space_id!r}, not {self.id!r}"
                )

    # -- public geometry -------------------------------------------------
    def distance(self, p: Point, q: Point) -> float:
        self._check(p, q)
        return self._distance(p.coords, q.coords)

    def combine(self, p: Point, q: Point, lam: float) -> Point:
        """Point at fraction ``lam`` along the geodesic from ``p`` to ``q``."""
        self._check(p, q)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {lam!r}")
        if lam == 0.0:
            return p
        if lam == 1.0:
            return q
        return Point(self.id, self._combine(p.coords, q.coords, lam))

    def norm(self, p: Point) -> float:
        """Distance from the origin."""
        return self.distance(self.origin, p)

    def is_finite(self, p: Point) -> bool:
        return all(math.isfinite(c) for c in p.coords)

    def sample(self, rng: np.random.Generator, scale: float | None = None) -> Point:
        """Random point within distance ``scale`` of the origin."""
        if scale is None:
            scale = self.sample_radius
        return Point(self.id, self._normalize(self._sample(rng, scale)))

    def sample_near(self, center: Point, radius: float, rng: np.random.Generator,
                    on_sphere: bool = False) -> Point:
        """Random point within (or, with ``on_sphere``, exactly at) ``radius`` of ``center``."""
        self._check(center)
        if on_sphere:
            s = radius
        else:
            s = radius * rng.random() ** (1.0 / max(self.dimension, 1))
        return Point(self.id, self._normalize(self._sample_near(center.coords, s, rng)))

    def reflect(self, center: Point, p: Point, rng: np.random.Generator) -> Point:
        """Geodesic symmetry: a point ``p'`` with ``center`` the midpoint of ``p, p'``.

        In the tripod the reflection through a branch point is not unique;
        ``rng`` picks a branch.
        """
        self._check(center, p)
        return Point(self.id, self._normalize(self._reflect(center.coords, p.coords, rng)))

    def retract(self, p: Point, radius: float) -> Point:
        """Nearest point of the closed ball of ``radius`` around the origin."""
        d = self.norm(p)
        if d <= radius:
            return p
        return self.combine(self.origin, p, radius / d)


# ---------------------------------------------------------------------------

class Euclidean(SpaceModel):
    tol = 1e-9
    sample_radius = 1.0

    def __init__(self, dimension: int = 2):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = int(dimension)

    @property
    def id(self) -> str:
        return f"euclidean({self.dimension})"

    def _distance(self, a, b):
        if self.dimension == 1:
            return abs(a[0] - b[0])
        return math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(a, b)))

    def _combine(self, a, b, lam):
        return tuple((1.0 - lam) * x + lam * y for x, y in zip(a, b))

    def _direction(self, rng):
        v = rng.standard_normal(self.dimension)
        n = np.linalg.norm(v)
        while n == 0.0:
            v = rng.standard_normal(self.dimension)
            n = np.linalg.norm(v)
        return v / n

    def _sample(self, rng, scale):
        s = scale * rng.random() ** (1.0 / self.dimension)
        return tuple(float(c) for c in s * self._direction(rng))

    def _sample_near(self, c, s, rng):
        return tuple(float(x) for x in np.asarray(c) + s * self._direction(rng))

    def _reflect(self, c, p, rng):
        return tuple(2.0 * x - y for x, y in zip(c, p))


class PoincareDisk(SpaceModel):
    """Hyperbolic plane (curvature -1), Poincare disk model.

    Geodesic interpolation moves ``p`` to the origin with the Moebius map
    ``z -> (z - p) / (1 - conj(p) z)``, walks along the straight ray by
    hyperbolic arclength and maps back.
    """

    kind = "poincare"
    dimension = 2
    tol = 1e-7
    # hyperbolic radius of the Euclidean disk |z| <= 0.9
    sample_radius = 2.0 * math.atanh(0.9)

    def _validate(self, coords):
        super()._validate(coords)
        if math.hypot(*coords) >= 1.0:
            raise ValueError(f"poincare: point {coords} is not inside the unit disk")

    @staticmethod
    def _z(c) -> complex:
        return complex(c[0], c[1])

    @staticmethod
    def _xy(z: complex) -> tuple:
        return (z.real, z.imag)

    @staticmethod
    def _to_origin(p: complex, z: complex) -> complex:
        return (z - p) / (1.0 - p.conjugate() * z)

    @staticmethod
    def _from_origin(p: complex, w: complex) -> complex:
        return (w + p) / (1.0 + p.conjugate() * w)

    def _distance(self, a, b):
        za, zb = self._z(a), self._z(b)
        num = abs(za - zb)
        if num == 0.0:
            return 0.0
        return 2.0 * math.atanh(min(num / abs(1.0 - za.conjugate() * zb), 1.0))

    def _combine(self, a, b, lam):
        p, q = self._z(a), self._z(b)
        w = self._to_origin(p, q)
        rho = abs(w)
        if rho == 0.0:
            return a
        w_lam = w / rho * math.tanh(lam * math.atanh(rho))
        return self._xy(self._from_origin(p, w_lam))

    def _sample(self, rng, scale):
        # uniform in the hyperbolic radius, uniform angle
        s = scale * math.sqrt(rng.random())
        return self._xy(cmath.rect(math.tanh(s / 2.0), 2.0 * math.pi * rng.random()))

    def _sample_near(self, c, s, rng):
        w = cmath.rect(math.tanh(s / 2.0), 2.0 * math.pi * rng.random())
        return self._xy(self._from_origin(self._z(c), w))

    def _reflect(self, c, p, rng):
        zc = self._z(c)
        return self._xy(self._from_origin(zc, -self._to_origin(zc, self._z(p))))


class TripodTree(SpaceModel):
    """Three half-lines (legs 0, 1, 2) glued at the origin.

    Coordinates are ``(leg, t)`` with ``t >= 0``.  Every point with ``t == 0``
    is the origin and is normalized to leg 0.
    """

    kind = "tripod"
    dimension = 2
    tol = 1e-9
    sample_radius = 5.0
    legs = (0, 1, 2)

    def _normalize(self, coords):
        leg, t = coords
        if t == 0.0:
            return (0.0, 0.0)
        return (float(leg), float(t))

    def _validate(self, coords):
        super()._validate(coords)
        leg, t = coords
        if leg not in self.legs or not t >= 0.0:
            raise ValueError(f"tripod: invalid point {coords}; need leg in {{0,1,2}}, t >= 0")

    def _distance(self, a, b):
        (la, ta), (lb, tb) = a, b
        if la == lb or ta == 0.0 or tb == 0.0:
            return abs(ta - tb)
        return ta + tb

    def _combine(self, a, b, lam):
        (la, ta), (lb, tb) = a, b
        if ta == 0.0:
            la = lb
        elif tb == 0.0:
            lb = la
        if la == lb:
            return self._normalize((la, (1.0 - lam) * ta + lam * tb))
        s = lam * (ta + tb)
        if s <= ta:
            return self._normalize((la, ta - s))
        return self._normalize((lb, s - ta))

    def _sample(self, rng, scale):
        return (float(rng.integers(3)), scale * rng.random())

    def _walk(self, leg, t, s, outward, rng):
        """Travel distance ``s`` from ``(leg, t)`` outward or toward the origin."""
        if outward:
            return (leg, t + s)
        if s <= t:
            return (leg, t - s)
        others = [l for l in self.legs if l != leg or t == 0.0]
        return (float(others[rng.integers(len(others))]), s - t)

    def _sample_near(self, c, s, rng):
        leg, t = c
        if t == 0.0:
            return (float(rng.integers(3)), s)
        return self._walk(leg, t, s, rng.random() < 0.5, rng)

    def _reflect(self, c, p, rng):
        (lc, tc), (lp, tp) = c, p
        d = self._distance(c, p)
        if tc == 0.0:
            others = [l for l in self.legs if l != lp]
            return (float(others[rng.integers(2)]), tp)
        outward_p = lp == lc and tp > tc
        return self._walk(lc, tc, d, not outward_p, rng)


def make_space(kind: str, dimension: int | None = None) -> SpaceModel:
    kind = kind.lower()
    if kind == "euclidean":
        return Euclidean(dimension or 2)
    if kind in ("poincare", "poincare_disk", "disk"):
        return PoincareDisk()
    if kind in ("tripod", "tripod_tree"):
        return TripodTree()
    raise ValueError(f"unknown space kind {kind!r}; expected euclidean, poincare or tripod")


# ---------------------------------------------------------------------------
# Sampling-based verification

AXIOMS = ("i", "ii", "iii", "iv", "symmetry", "triangle")


@dataclass
class AxiomReport:
    space: str
    n_samples: int
    seed: int
    tol: float
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> dict:
        return {name: v <= self.tol for name, v in self.worst.items()}

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tol": self.tol,
            "worst_violation": dict(self.worst),
            "passed": self.passed,
        }


def verify_axioms(space: SpaceModel, n_samples: int = 1000, seed: int = 0) -> AxiomReport:
    """Check the four hyperbolic-space axioms and the metric axioms by sampling.

    Each sample draws ``x1, x2, x3, x4, v`` from the space's sampling domain
    and ``a, b`` uniformly from ``[0, 1]``.  The report holds the worst
    violation per axiom (``max(LHS - RHS)``, or the absolute defect for the
    equalities (ii), (iii) and symmetry).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    d, C = space.distance, space.combine
    worst = {name: -math.inf for name in AXIOMS}
    for _ in range(n_samples):
        x1, x2, x3, x4, v = (space.sample(rng) for _ in range(5))
        a, b = rng.random(2)
        ca = C(x1, x2, a)
        checks = {
            "i": d(v, ca) - ((1 - a) * d(v, x1) + a * d(v, x2)),
            "ii": abs(d(ca, C(x1, x2, b)) - abs(a - b) * d(x1, x2)),
            "iii": d(ca, C(x2, x1, 1 - a)),
            "iv": d(ca, C(x3, x4, a)) - ((1 - a) * d(x1, x3) + a * d(x2, x4)),
            "symmetry": abs(d(x1, x2) - d(x2, x1)),
            "triangle": d(x1, x3) - (d(x1, x2) + d(x2, x3)),
        }
        for name, value in checks.items():
            worst[name] = max(worst[name], float(value))
    return AxiomReport(space.id, n_samples, seed, space.tol, worst)


class ModulusEstimationError(RuntimeError):
    """No admissible configuration was found while estimating the modulus."""


@dataclass(frozen=True)
class ModulusSample:
    r: float
    eps: float
    delta_hat: float
    n_admissible: int
    seed: int
    #: noise level within which sweeps over r are compared
    sampling_tol: float = 1e-3


def estimate_modulus(space: SpaceModel, r: float, eps: float, n_samples: int = 2000,
                     seed: int = 0, max_tries: int | None = None) -> ModulusSample:
    """Empirical modulus of uniform convexity at radius ``r`` and separation ``eps``.

    Draws triples with ``d(x1, x3) <= r``, ``d(x2, x3) <= r`` and
    ``d(x1, x2) >= eps * r`` and returns the infimum over them of
    ``1 - d(m, x3) / r`` where ``m`` is the midpoint of ``x1, x2``.  Being a
    sampled infimum, ``delta_hat`` over-estimates the true modulus.

    Half of the proposals put ``x1`` on the sphere of radius ``r`` and ``x2``
    at (or pulled in from) its reflection through ``x3``, so extreme
    separations such as ``eps = 2`` are reachable.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    if not 0 < eps <= 2:
        raise ValueError("eps must lie in (0, 2]")
    rng = np.random.default_rng(seed)
    max_tries = max_tries or 50 * n_samples
    slack = 1e-9
    d = space.distance
    best, found = math.inf, 0
    for _ in range(max_tries):
        if found >= n_samples:
            break
        x3 = space.sample(rng, scale=r)
        x1 = space.sample_near(x3, r, rng, on_sphere=rng.random() < 0.5)
        if rng.random() < 0.5:
            x2 = space.reflect(x3, x1, rng)
            if rng.random() < 0.5:
                x2 = space.combine(x3, x2, 0.5 + 0.5 * rng.random())
        else:
            x2 = space.sample_near(x3, r, rng, on_sphere=rng.random() < 0.5)
        if (d(x1, x3) > r * (1 + slack) or d(x2, x3) > r * (1 + slack)
                or d(x1, x2) < eps * r * (1 - slack)):
            continue
        found += 1
        best = min(best, 1.0 - d(space.combine(x1, x2, 0.5), x3) / r)
    if found == 0:
        raise ModulusEstimationError(
            f"no admissible sample for r={r}, eps={eps} after {max_tries} tries"
        )
    return ModulusSample(r, eps, min(best, 1.0), found, seed)
