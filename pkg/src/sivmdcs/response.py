"""Time-domain third-order signal synthesis over an inhomogeneous ensemble.

Everything is computed in a rotating frame at ``grid.frame_thz`` so that
desk-scale grids resolve all detunings.  Each (emitter, pathway) pair
contributes a separable term

    sign * w_det * mu^4 * I(exc) * I(emit) * exp(-T/T1)
        * exp[(+2 pi i d_exc - 1/T2) tau] * exp[(-2 pi i d_emit - 1/T2) t]

where I is the unit-peak laser spectral weight (so the filter equals the
field amplitude to the fourth power for a direct peak), d_* are detunings
from the frame origin, and w_det is 1 for heterodyne detection or the
emitter quantum yield for PL detection.  The double sum is evaluated as a
chunked matrix product with a fixed reduction order, so results are
bit-identical regardless of thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .emitter import Emitter, LaserSpectrum
from .errors import EmptyEnsemble, GridTooCoarse, InvalidSpec
from .pathways import pathways_for

DETECTION_MODES = ("pl", "heterodyne")


@dataclass(frozen=True)
class Grid:
    """Rectangular (tau, t) delay grid plus the rotating-frame origin."""

    n_tau: int
    n_t: int
    tau_step_ps: float
    t_step_ps: float
    frame_thz: float

    def __post_init__(self):
        if self.n_tau < 1 or self.n_t < 1:
            raise InvalidSpec("grid must have at least one point per axis")
        if self.tau_step_ps <= 0 or self.t_step_ps <= 0:
            raise InvalidSpec("grid steps must be positive")

    @property
    def tau_ps(self) -> np.ndarray:
        return np.arange(self.n_tau) * self.tau_step_ps

    @property
    def t_ps(self) -> np.ndarray:
        return np.arange(self.n_t) * self.t_step_ps

    @property
    def is_square(self) -> bool:
        return self.n_tau == self.n_t and self.tau_step_ps == self.t_step_ps


@dataclass
class TimeDomainSignal:
    data: np.ndarray             # complex, shape (n_tau, n_t)
    grid: Grid
    waiting_time_ps: float
    detection_mode: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.data.shape != (self.grid.n_tau, self.grid.n_t):
            raise InvalidSpec("signal matrix does not match its grid")


def _pathway_terms(emitters: Sequence[Emitter], mode: str,
                   laser: LaserSpectrum | None, frame_thz: float,
                   waiting_time_ps: float):
    """Flatten the ensemble into per-term arrays (detunings, rates, weights)."""
    nu_exc, nu_emit, weight, t2 = [], [], [], []
    for em in emitters:
        freqs = em.transition_frequencies()
        if laser is None:
            filt = np.ones_like(freqs)
        else:
            filt = laser.amplitude(freqs)
        det_weight = em.quantum_yield if mode == "pl" else 1.0
        base = det_weight * em.dipole ** 4 * math.exp(-waiting_time_ps / em.t1_ps)
        for pw in pathways_for(em):
            nu_exc.append(freqs[pw.excitation] - frame_thz)
            nu_emit.append(freqs[pw.emission] - frame_thz)
            weight.append(pw.sign * base * filt[pw.excitation] * filt[pw.emission])
            t2.append(em.t2_ps)
    return (np.asarray(nu_exc), np.asarray(nu_emit),
            np.asarray(weight, dtype=complex), np.asarray(t2))


def _pairwise_sum(parts: list[np.ndarray]) -> np.ndarray:
    """Deterministic pairwise reduction (fixed tree, independent of threads)."""
    while len(parts) > 1:
        merged = []
        for i in range(0, len(parts) - 1, 2):
            merged.append(parts[i] + parts[i + 1])
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def synthesize_signal(emitters: Sequence[Emitter], grid: Grid,
                      waiting_time_ps: float, mode: str,
                      laser: LaserSpectrum | None = None,
                      noise_rms: float = 0.0, noise_seed: int = 0,
                      threads: int = 1) -> TimeDomainSignal:
    """Sum pathway responses over the ensemble on the (tau, t) grid."""
    if mode not in DETECTION_MODES:
        raise InvalidSpec(f"unknown detection mode {mode!r}")
    if not emitters:
        raise EmptyEnsemble("synthesize_signal needs at least one emitter")

    nu_exc, nu_emit, weight, t2 = _pathway_terms(
        emitters, mode, laser, grid.frame_thz, waiting_time_ps)

    nyq_tau = 0.5 / grid.tau_step_ps
    nyq_t = 0.5 / grid.t_step_ps
    max_det = max(np.abs(nu_exc).max(), np.abs(nu_emit).max())
    if max_det >= min(nyq_tau, nyq_t):
        raise GridTooCoarse(
            f"largest detuning {max_det:.4g} THz exceeds Nyquist "
            f"{min(nyq_tau, nyq_t):.4g} THz; shrink the grid step")

    tau = grid.tau_ps
    t = grid.t_ps
    z_exc = 2j * np.pi * nu_exc - 1.0 / t2
    z_emit = -2j * np.pi * nu_emit - 1.0 / t2

    # Fixed chunk size: depends only on the grid, never on thread count.
    longest = max(grid.n_tau, grid.n_t)
    chunk = max(64, int(4_000_000 / longest))
    n_terms = len(weight)
    ranges = [(k, min(k + chunk, n_terms)) for k in range(0, n_terms, chunk)]

    def partial(rng):
        lo, hi = rng
        u = np.exp(np.outer(z_exc[lo:hi], tau))
        v = np.exp(np.outer(z_emit[lo:hi], t))
        u *= weight[lo:hi, None]
        return u.T @ v

    # Partials are merged as they stream in, in chunk order, through a
    # binary-counter tree: deterministic for a given chunking and O(log n)
    # in held partials, so memory stays flat for long term lists.
    stack: list[tuple[int, np.ndarray]] = []

    def push(part):
        rank = 0
        while stack and stack[-1][0] == rank:
            _, left = stack.pop()
            part = left + part
            rank += 1
        stack.append((rank, part))

    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pending = []
            for rng_ in ranges:
                pending.append(pool.submit(partial, rng_))
                if len(pending) >= 2 * threads:
                    push(pending.pop(0).result())
            for fut in pending:
                push(fut.result())
    else:
        for rng_ in ranges:
            push(partial(rng_))
    data = stack.pop()[1]
    while stack:
        data = stack.pop()[1] + data

    if noise_rms > 0:
        rng = np.random.default_rng(noise_seed)
        scale = noise_rms / math.sqrt(2.0)
        data = data + (rng.normal(0.0, scale, data.shape)
                       + 1j * rng.normal(0.0, scale, data.shape))

    meta = {
        "detection_mode": mode,
        "noise_rms": noise_rms,
        "noise_seed": noise_seed,
        "n_emitters": len(emitters),
    }
    if laser is not None:
        meta["laser_center_thz"] = laser.center_thz
        meta["laser_fwhm_thz"] = laser.fwhm_thz
    return TimeDomainSignal(data, grid, waiting_time_ps, mode, meta)


def waiting_time_scan(emitters: Sequence[Emitter], tau0_ps: float, t0_ps: float,
                      waiting_times_ps: Sequence[float], mode: str,
                      laser: LaserSpectrum | None = None,
                      frame_thz: float = 406.770) -> list[tuple[float, complex]]:
    """Complex pathway-sum amplitude at a fixed (tau, t) point versus the
    waiting time.  For a uniform-T1 ensemble |amplitude| decays as exp(-T/T1)."""
    if len(waiting_times_ps) == 0:
        raise InvalidSpec("waiting-time list must be non-empty")
    if any(T < 0 for T in waiting_times_ps):
        raise InvalidSpec("waiting times must be non-negative")
    if not emitters:
        raise EmptyEnsemble("waiting_time_scan needs at least one emitter")

    nu_exc, nu_emit, weight, t2 = _pathway_terms(emitters, mode, laser, frame_thz, 0.0)
    t1 = np.repeat([em.t1_ps for em in emitters],
                   [len(pathways_for(em)) for em in emitters])
    point = np.exp((2j * np.pi * nu_exc - 1.0 / t2) * tau0_ps) \
        * np.exp((-2j * np.pi * nu_emit - 1.0 / t2) * t0_ps)
    out = []
    for T in waiting_times_ps:
        amp = complex(np.sum(weight * point * np.exp(-T / t1)))
        out.append((float(T), amp))
    return out
