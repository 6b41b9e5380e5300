"""Experiment configuration."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple

from ..errors import ValidationError
from ..gaussian import WeightSequence


@dataclass(frozen=True)
class QuadratureConfig:
    radial_nodes: int = 24      # Gauss-Legendre nodes per radial panel
    angular_nodes: int = 64
    cutoff_radius: Fraction = Fraction(3, 4)


@dataclass(frozen=True)
class Tolerances:
    mc_sigma: float = 5.0
    lempert_rel_residual: float = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    weights: WeightSequence = field(default_factory=WeightSequence.default)
    n_range: Tuple[int, ...] = (1, 2, 3, 4)
    s: int = 2
    t: int = 2
    degree_cap: int = 4
    seed: int = 0
    case_count: int = 100
    samples: int = 100_000
    jobs: int = 1
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        errs = []
        nr = tuple(self.n_range)
        object.__setattr__(self, "n_range", nr)
        if not nr:
            errs.append(("experiment.n_range", 0, "must be nonempty"))
        elif any(b <= a for a, b in zip(nr, nr[1:])) or nr[0] < 1:
            errs.append(("experiment.n_range", 0, "must be positive and strictly increasing"))
        elif nr[-1] > self.weights.N:
            errs.append(("experiment.n_range", 0,
                         f"max n = {nr[-1]} exceeds the {self.weights.N} materialized weights"))
        for name in ("s", "t", "degree_cap", "case_count", "samples"):
            if getattr(self, name) < 0:
                errs.append((f"experiment.{name}", 0, "must be nonnegative"))
        if self.jobs < 1:
            errs.append(("experiment.jobs", 0, "must be >= 1"))
        r0 = Fraction(self.quadrature.cutoff_radius)
        if not Fraction(1, 2) < r0 < 1:
            errs.append(("quadrature.cutoff_radius", 0, "must lie in (1/2, 1)"))
        if self.quadrature.radial_nodes < 2 or self.quadrature.angular_nodes < 4:
            errs.append(("quadrature", 0, "need radial_nodes >= 2 and angular_nodes >= 4"))
        if self.tolerances.mc_sigma <= 0 or self.tolerances.lempert_rel_residual <= 0:
            errs.append(("tolerances", 0, "tolerances must be positive"))
        if errs:
            raise ValidationError(errs)
