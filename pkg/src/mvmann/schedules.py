"""Control sequences alpha_n in [0, 1] and r_n in [0, inf).

The inner weight used by the mean-value step is ``beta_n = 1 / (r_n + 1)``;
``from_beta`` builds an r-rule from a beta-rule, which is how the
Ishikawa scheme is recovered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

__all__ = [
    "R_MAX",
    "Constant",
    "HarmonicComplement",
    "Geometric",
    "Harmonic",
    "Explicit",
    "FromBeta",
    "Schedule",
    "rule_from_config",
]

R_MAX = 1e15


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, n: int) -> float:
        return float(self.value)


@dataclass(frozen=True)
class HarmonicComplement:
    """``1 - 1/(n + 2)``."""

    def __call__(self, n: int) -> float:
        return 1.0 - 1.0 / (n + 2)


@dataclass(frozen=True)
class Geometric:
    """``base ** n``."""

    base: float = 2.0

    def __call__(self, n: int) -> float:
        if self.base > 1 and n * math.log(self.base) > math.log(R_MAX):
            return math.inf
        return float(self.base) ** n


@dataclass(frozen=True)
class Harmonic:
    """``1 / (n + 1)``."""

    def __call__(self, n: int) -> float:
        return 1.0 / (n + 1)


@dataclass(frozen=True)
class Explicit:
    values: tuple

    def __init__(self, values: Sequence[float]):
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    def __call__(self, n: int) -> float:
        if n >= len(self.values):
            raise IndexError(f"explicit schedule has {len(self.values)} entries, asked for n={n}")
        return self.values[n]


@dataclass(frozen=True)
class FromBeta:
    """r-rule ``r_n = 1/beta_n - 1`` from a beta-rule with values in (0, 1]."""

    beta: Union[Constant, Explicit, Harmonic, HarmonicComplement]

    def __call__(self, n: int) -> float:
        b = self.beta(n)
        if not 0 < b <= 1:
            raise ValueError(f"beta_{n} = {b} is outside (0, 1]")
        return 1.0 / b - 1.0


AlphaRule = Union[Constant, HarmonicComplement, Explicit]
RRule = Union[Constant, Geometric, Harmonic, FromBeta, Explicit]


@dataclass(frozen=True)
class Schedule:
    alpha: AlphaRule = Constant(0.5)
    r: RRule = Constant(1.0)
    r_max: float = R_MAX

    def __post_init__(self):
        if isinstance(self.alpha, Constant) and not 0 <= self.alpha.value <= 1:
            raise ValueError(f"alpha out of [0,1]: {self.alpha.value}")
        if isinstance(self.alpha, Explicit) and not all(0 <= v <= 1 for v in self.alpha.values):
            raise ValueError("alpha out of [0,1] in explicit list")
        if isinstance(self.r, Constant) and not self.r.value >= 0:
            raise ValueError(f"r must be nonnegative: {self.r.value}")
        if isinstance(self.r, Explicit) and not all(v >= 0 for v in self.r.values):
            raise ValueError("r must be nonnegative in explicit list")
        if isinstance(self.r, Geometric) and not self.r.base >= 0:
            raise ValueError("geometric base must be nonnegative")
        if isinstance(self.r, FromBeta):
            b = self.r.beta
            if isinstance(b, Constant) and not 0 < b.value <= 1:
                raise ValueError(f"beta out of (0,1]: {b.value}")
            if isinstance(b, Explicit) and not all(0 < v <= 1 for v in b.values):
                raise ValueError("beta out of (0,1] in explicit list")

    def alpha_at(self, n: int) -> float:
        if n < 0:
            raise ValueError("n must be nonnegative")
        a = self.alpha(n)
        if not 0 <= a <= 1:
            raise ValueError(f"alpha_{n} = {a} out of [0,1]")
        return a

    def r_value(self, n: int) -> tuple[float, bool]:
        """``(r_n, saturated)``; values above ``r_max`` are clipped and flagged."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        r = self.r(n)
        if r < 0:
            raise ValueError(f"r_{n} = {r} is negative")
        if r > self.r_max:
            return self.r_max, True
        return r, False

    def r_at(self, n: int) -> float:
        return self.r_value(n)[0]

    def is_saturated(self, n: int) -> bool:
        return self.r_value(n)[1]

    def beta_at(self, n: int) -> float:
        return 1.0 / (self.r_at(n) + 1.0)


def rule_from_config(spec: dict, which: str):
    """Build a rule from a config table such as ``{kind = "constant", value = 0.5}``."""
    kind = spec.get("kind")
    if which == "alpha":
        if kind == "constant":
            return Constant(float(spec["value"]))
        if kind == "harmonic_complement":
            return HarmonicComplement()
        if kind == "explicit":
            return Explicit(spec["list"])
        raise ValueError(f"alpha: unknown kind {kind!r}; expected constant, harmonic_complement or explicit")
    if kind == "constant":
        return Constant(float(spec["value"]))
    if kind == "geometric":
        return Geometric(float(spec.get("base", 2.0)))
    if kind == "harmonic":
        return Harmonic()
    if kind == "explicit":
        return Explicit(spec["list"])
    if kind == "from_beta":
        if "list" in spec:
            return FromBeta(Explicit(spec["list"]))
        return FromBeta(Constant(float(spec["value"])))
    raise ValueError(f"r: unknown kind {kind!r}; expected constant, geometric, harmonic, explicit or from_beta")
