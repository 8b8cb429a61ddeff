"""SiV- level structure, strain response, and inhomogeneous ensemble sampling.

Internal unit conventions: optical frequencies in THz, fine-structure
splittings in GHz, times in ps unless a field name says otherwise.  A strain
value is a dimensionless scalar; the strain model maps it linearly onto a
frequency shift and splitting perturbations, and algebraically onto a
quantum yield.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InvalidSpec, SplittingCollapse

GAUSSIAN_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# Default SiV- zero-phonon line quadruple: 406.654, 406.713, 406.915,
# 406.974 THz, solved back to center + doublet splittings.
DEFAULT_SCHEME_CENTER_THZ = 406.8140
DEFAULT_GROUND_SPLITTING_GHZ = 59.0
DEFAULT_EXCITED_SPLITTING_GHZ = 261.0


@dataclass(frozen=True)
class LevelScheme:
    """Doublet ground + doublet excited manifold giving four optical lines.

    ``center_thz`` is the mean transition frequency; the four lines sit at
    center +- (excited +- ground)/2.
    """

    center_thz: float
    ground_splitting_ghz: float
    excited_splitting_ghz: float

    def __post_init__(self):
        if self.center_thz <= 0:
            raise InvalidSpec(f"center frequency must be positive, got {self.center_thz}")
        if self.ground_splitting_ghz <= 0 or self.excited_splitting_ghz <= 0:
            raise SplittingCollapse(
                f"splittings must be positive, got "
                f"({self.ground_splitting_ghz}, {self.excited_splitting_ghz}) GHz"
            )
        if self.excited_splitting_ghz <= self.ground_splitting_ghz:
            raise SplittingCollapse(
                "excited splitting must exceed ground splitting for a strictly "
                f"increasing line quadruple, got ({self.ground_splitting_ghz}, "
                f"{self.excited_splitting_ghz}) GHz"
            )

    def transition_frequencies(self) -> np.ndarray:
        """Four line positions in THz, strictly ascending."""
        dg = self.ground_splitting_ghz * 1e-3
        de = self.excited_splitting_ghz * 1e-3
        c = self.center_thz
        return np.array([
            c - (de + dg) / 2.0,
            c - (de - dg) / 2.0,
            c + (de - dg) / 2.0,
            c + (de + dg) / 2.0,
        ])

    def transition_levels(self) -> tuple[tuple[int, int], ...]:
        """(ground sublevel, excited sublevel) for each line, same order as
        ``transition_frequencies``.  Index 0 is the lower sublevel."""
        return ((1, 0), (0, 0), (1, 1), (0, 1))

    @classmethod
    def from_transition_frequencies(cls, lines: Sequence[float]) -> "LevelScheme":
        """Solve (center, ground, excited splitting) from an ascending line
        quadruple.  Inverse of ``transition_frequencies``."""
        l0, l1, l2, l3 = [float(x) for x in lines]
        center = (l0 + l3) / 2.0
        de = ((l3 - l0) + (l2 - l1)) / 2.0 * 1e3
        dg = ((l3 - l0) - (l2 - l1)) / 2.0 * 1e3
        return cls(center, dg, de)


def default_scheme() -> LevelScheme:
    return LevelScheme(DEFAULT_SCHEME_CENTER_THZ,
                       DEFAULT_GROUND_SPLITTING_GHZ,
                       DEFAULT_EXCITED_SPLITTING_GHZ)


@dataclass(frozen=True)
class StrainModel:
    """Linear strain response of the level scheme plus an algebraic
    dark-state yield suppression Y(s) = Y0 / (1 + (|s|/s_c)^p)."""

    shift_thz_per_unit: float = 1.0
    ground_splitting_ghz_per_unit: float = 0.0
    excited_splitting_ghz_per_unit: float = 0.0
    yield_crossover: float = 1.0
    yield_steepness: float = 2.0
    bright_yield: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.bright_yield <= 1.0):
            raise InvalidSpec(f"bright yield must be in (0, 1], got {self.bright_yield}")
        if self.yield_crossover <= 0 or self.yield_steepness <= 0:
            raise InvalidSpec("yield crossover and steepness must be positive")


def quantum_yield(model: StrainModel, s: float) -> float:
    """Strain-dependent radiative quantum yield, in (0, Y0]."""
    return model.bright_yield / (1.0 + (abs(s) / model.yield_crossover) ** model.yield_steepness)


def strained_level_scheme(base: LevelScheme, model: StrainModel, s: float) -> LevelScheme:
    """Apply the linear strain perturbation to a level scheme.

    Raises SplittingCollapse when a perturbed splitting is driven to zero or
    below (or the line quadruple stops being strictly increasing).
    """
    return LevelScheme(
        base.center_thz + model.shift_thz_per_unit * s,
        base.ground_splitting_ghz + model.ground_splitting_ghz_per_unit * s,
        base.excited_splitting_ghz + model.excited_splitting_ghz_per_unit * s,
    )


@dataclass(frozen=True)
class LaserSpectrum:
    """Measured excitation spectrum, normalized to unit peak.

    The stored values are spectrometer-style (intensity) spectral weights;
    the field amplitude seen by one light-matter interaction is their square
    root.  Default shape is Gaussian; a tabulated spectrum may be supplied
    instead (strictly positive on its grid).
    """

    center_thz: float = 406.770
    fwhm_thz: float = 4.14
    table_freqs_thz: tuple[float, ...] | None = None
    table_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.table_values is not None:
            vals = np.asarray(self.table_values, dtype=float)
            freqs = np.asarray(self.table_freqs_thz, dtype=float)
            if freqs.shape != vals.shape or vals.ndim != 1 or vals.size < 2:
                raise InvalidSpec("tabulated laser spectrum needs matching 1-d grids")
            if np.any(vals <= 0):
                raise InvalidSpec("tabulated laser spectrum must be strictly positive")
            if np.any(np.diff(freqs) <= 0):
                raise InvalidSpec("tabulated laser frequency grid must be increasing")
            peak = vals.max()
            object.__setattr__(self, "table_values", tuple(vals / peak))
        elif self.fwhm_thz <= 0:
            raise InvalidSpec(f"laser FWHM must be positive, got {self.fwhm_thz}")

    def amplitude(self, freq_thz) -> np.ndarray:
        """Unit-peak spectral weight at the given absolute frequencies."""
        nu = np.asarray(freq_thz, dtype=float)
        if self.table_values is not None:
            return np.interp(nu, self.table_freqs_thz, self.table_values,
                             left=self.table_values[0], right=self.table_values[-1])
        sigma = self.fwhm_thz / GAUSSIAN_FWHM_PER_SIGMA
        return np.exp(-0.5 * ((nu - self.center_thz) / sigma) ** 2)


# --- ensemble specification ------------------------------------------------

STRAIN_SHAPES = ("gaussian", "lorentzian", "delta")


@dataclass(frozen=True)
class StrainDistribution:
    shape: str = "gaussian"
    center: float = 0.0
    fwhm: float = 0.0

    def __post_init__(self):
        if self.shape not in STRAIN_SHAPES:
            raise InvalidSpec(f"unknown strain distribution shape {self.shape!r}")
        if self.shape != "delta" and self.fwhm <= 0:
            raise InvalidSpec(f"strain FWHM must be positive, got {self.fwhm}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.shape == "delta":
            return np.full(n, self.center)
        if self.shape == "gaussian":
            return rng.normal(self.center, self.fwhm / GAUSSIAN_FWHM_PER_SIGMA, size=n)
        # Lorentzian: FWHM = 2 * scale
        return self.center + (self.fwhm / 2.0) * rng.standard_cauchy(size=n)


@dataclass(frozen=True)
class T2Rule:
    """Dephasing-time assignment: a constant, discrete sub-classes with
    weights, or a log-normal spread (median in ps, log-sigma)."""

    kind: str = "constant"
    values_ps: tuple[float, ...] = (122.0,)
    weights: tuple[float, ...] = (1.0,)
    log_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "classes", "lognormal"):
            raise InvalidSpec(f"unknown T2 rule kind {self.kind!r}")
        if any(v <= 0 for v in self.values_ps):
            raise InvalidSpec("T2 values must be positive")
        if self.kind == "classes":
            if len(self.values_ps) != len(self.weights):
                raise InvalidSpec("T2 class values and weights must pair up")
            if abs(sum(self.weights) - 1.0) > 1e-9:
                raise InvalidSpec("T2 class weights must sum to 1")
        if self.kind == "lognormal" and self.log_sigma <= 0:
            raise InvalidSpec("lognormal T2 rule needs a positive log-sigma")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(n, self.values_ps[0])
        if self.kind == "classes":
            idx = rng.choice(len(self.values_ps), size=n, p=self.weights)
            return np.asarray(self.values_ps)[idx]
        return self.values_ps[0] * np.exp(rng.normal(0.0, self.log_sigma, size=n))


@dataclass(frozen=True)
class PopulationComponent:
    weight: float = 1.0
    strain: StrainDistribution = field(default_factory=StrainDistribution)
    t2: T2Rule = field(default_factory=T2Rule)
    t1_ns: float = 1.7
    dipole: float = 1.0
    yield_rule: str | float = "strain"
    two_level: bool = False

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidSpec("component weight must be non-negative")
        if self.t1_ns <= 0 or self.dipole <= 0:
            raise InvalidSpec("T1 and dipole must be positive")
        if isinstance(self.yield_rule, str):
            if self.yield_rule != "strain":
                raise InvalidSpec(f"yield rule must be 'strain' or a number, got {self.yield_rule!r}")
        elif not (0.0 < float(self.yield_rule) <= 1.0):
            raise InvalidSpec("fixed quantum yield must be in (0, 1]")


@dataclass(frozen=True)
class EnsembleSpec:
    components: tuple[PopulationComponent, ...]

    def __post_init__(self):
        if not self.components:
            raise InvalidSpec("ensemble needs at least one component")
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpec(f"component weights must sum to 1, got {total}")


@dataclass(frozen=True)
class Emitter:
    """One sampled color center: strained level scheme plus local dynamics."""

    strain: float
    scheme: LevelScheme
    dipole: float
    t1_ps: float
    t2_ps: float
    quantum_yield: float
    two_level: bool = False

    def __post_init__(self):
        if self.dipole <= 0:
            raise InvalidSpec("dipole must be positive")
        if not (0.0 < self.quantum_yield <= 1.0):
            raise InvalidSpec(f"quantum yield must be in (0, 1], got {self.quantum_yield}")
        if self.t2_ps > 2.0 * self.t1_ps + 1e-9:
            raise InvalidSpec(
                f"T2 = {self.t2_ps} ps exceeds coherent limit 2*T1 = {2 * self.t1_ps} ps")

    def transition_frequencies(self) -> np.ndarray:
        if self.two_level:
            return np.array([self.scheme.center_thz])
        return self.scheme.transition_frequencies()

    def transition_levels(self) -> tuple[tuple[int, int], ...]:
        if self.two_level:
            return ((0, 0),)
        return self.scheme.transition_levels()


def sample_ensemble(spec: EnsembleSpec, base: LevelScheme, model: StrainModel,
                    n: int, seed: int) -> list[Emitter]:
    """Draw ``n`` emitters from the population mixture, deterministically in
    ``seed``.  Every emitter satisfies the Emitter invariants."""
    if n < 1:
        raise InvalidSpec(f"ensemble size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    weights = np.array([c.weight for c in spec.components])
    comp_idx = rng.choice(len(spec.components), size=n, p=weights)

    # Pre-draw per-component streams so the cost stays vectorized.
    strains = np.empty(n)
    t2s = np.empty(n)
    for ci, comp in enumerate(spec.components):
        mask = comp_idx == ci
        m = int(mask.sum())
        if m == 0:
            continue
        strains[mask] = comp.strain.sample(rng, m)
        t2s[mask] = comp.t2.sample(rng, m)

    emitters = []
    for i in range(n):
        comp = spec.components[comp_idx[i]]
        s = float(strains[i])
        if comp.two_level:
            scheme = replace(base, center_thz=base.center_thz + model.shift_thz_per_unit * s)
        else:
            scheme = strained_level_scheme(base, model, s)
        if comp.yield_rule == "strain":
            y = quantum_yield(model, s)
        else:
            y = float(comp.yield_rule)
        t1_ps = comp.t1_ns * 1e3
        t2 = min(float(t2s[i]), 2.0 * t1_ps)
        emitters.append(Emitter(strain=s, scheme=scheme, dipole=comp.dipole,
                                t1_ps=t1_ps, t2_ps=t2, quantum_yield=y,
                                two_level=comp.two_level))
    return emitters
