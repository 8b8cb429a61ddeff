"""2D rephasing spectra and their derived 1D traces.

Axis convention: the first-order interaction is conjugate, so a transition
at absolute frequency nu produces a peak at (nu_tau, nu_t) = (-nu, +nu).
The transform peaks the tau axis at the positive rotating-frame detuning and
then relabels it with a negated absolute axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .emitter import LaserSpectrum
from .errors import InvalidSpec, NonSquareGrid
from .response import TimeDomainSignal


@dataclass
class Spectrum2D:
    data: np.ndarray             # complex, shape (len(nu_tau), len(nu_t))
    nu_tau_thz: np.ndarray       # ascending, negative absolute frequencies
    nu_t_thz: np.ndarray         # ascending, absolute frequencies
    pad_factor: int
    parseval_norm: float         # sum |F|^2 == norm * sum |S|^2
    metadata: dict = field(default_factory=dict)

    def bin_widths(self) -> tuple[float, float]:
        return (float(self.nu_tau_thz[1] - self.nu_tau_thz[0]) if len(self.nu_tau_thz) > 1 else 0.0,
                float(self.nu_t_thz[1] - self.nu_t_thz[0]) if len(self.nu_t_thz) > 1 else 0.0)


@dataclass
class Trace1D:
    freqs_thz: np.ndarray
    amplitude: np.ndarray        # real, non-negative
    provenance: str = "projection"   # "projection" | "deconvolved"
    valid: np.ndarray | None = None  # bool flags; None means all valid

    def valid_mask(self) -> np.ndarray:
        if self.valid is None:
            return np.ones(len(self.amplitude), dtype=bool)
        return self.valid


@dataclass
class DecayTrace:
    time_ps: np.ndarray          # t + tau along the diagonal, starts at 0
    amplitude: np.ndarray


def to_spectrum(signal: TimeDomainSignal, pad_factor: int = 1) -> Spectrum2D:
    """Discrete 2D transform of S(tau, t) with the rephasing axis convention."""
    if pad_factor < 1:
        raise InvalidSpec(f"pad factor must be >= 1, got {pad_factor}")
    grid = signal.grid
    n_tau = grid.n_tau * pad_factor
    n_t = grid.n_t * pad_factor

    # tau axis: forward kernel peaks exp(+2 pi i d tau) at +d.
    f = np.fft.fft(signal.data, n=n_tau, axis=0)
    # t axis: conjugate kernel peaks exp(-2 pi i d t) at +d.
    f = np.fft.ifft(f, n=n_t, axis=1) * n_t

    f = np.fft.fftshift(f, axes=(0, 1))
    f_tau = np.fft.fftshift(np.fft.fftfreq(n_tau, grid.tau_step_ps))
    f_t = np.fft.fftshift(np.fft.fftfreq(n_t, grid.t_step_ps))

    nu_t = f_t + grid.frame_thz
    nu_tau = -(f_tau + grid.frame_thz)
    # Negation reverses the axis; flip rows to keep it ascending.
    order = np.argsort(nu_tau)
    nu_tau = nu_tau[order]
    f = f[order, :]

    meta = dict(signal.metadata)
    meta["waiting_time_ps"] = signal.waiting_time_ps
    return Spectrum2D(f, nu_tau, nu_t, pad_factor,
                      parseval_norm=float(n_tau) * float(n_t), metadata=meta)


def project_nu_t(spectrum: Spectrum2D) -> Trace1D:
    """Amplitude projection onto the nu_t axis (per-column sum of |F|)."""
    return Trace1D(spectrum.nu_t_thz.copy(),
                   np.abs(spectrum.data).sum(axis=0),
                   provenance="projection")


def diagonal_lineout(signal: TimeDomainSignal) -> DecayTrace:
    """|S| sampled along tau = t, plotted against t + tau."""
    grid = signal.grid
    if not grid.is_square:
        raise NonSquareGrid(
            f"diagonal lineout needs a square grid with equal steps, got "
            f"{grid.n_tau}x{grid.n_t} at ({grid.tau_step_ps}, {grid.t_step_ps}) ps")
    k = np.arange(grid.n_tau)
    return DecayTrace(2.0 * k * grid.tau_step_ps,
                      np.abs(signal.data[k, k]))


def deconvolve_laser(trace: Trace1D, laser: LaserSpectrum,
                     floor: float = 0.05) -> Trace1D:
    """Divide out the squared laser spectrum, flagging wing bins.

    Bins where the squared spectrum falls below ``floor`` times its maximum
    are clipped to the floor and flagged invalid so downstream fits can skip
    them.
    """
    if not (0.0 < floor < 1.0):
        raise InvalidSpec(f"deconvolution floor must be in (0, 1), got {floor}")
    l2 = laser.amplitude(trace.freqs_thz) ** 2
    threshold = floor * l2.max()
    valid = l2 >= threshold
    out = trace.amplitude / np.maximum(l2, threshold)
    if trace.valid is not None:
        valid = valid & trace.valid
    return Trace1D(trace.freqs_thz.copy(), out, provenance="deconvolved", valid=valid)


def interpolated_fwhm(freqs: np.ndarray, amplitude: np.ndarray) -> float:
    """FWHM by linear interpolation of the half-maximum crossings.

    Uses the outermost crossings (scanning inward from each edge), which is
    stable against shot-to-shot spikes near the peak of sampled envelopes.
    """
    from .errors import NoHalfCrossing

    half = float(np.max(amplitude)) / 2.0
    above = np.nonzero(amplitude >= half)[0]
    il, ir = int(above[0]), int(above[-1])
    if il == 0 or ir == len(amplitude) - 1:
        raise NoHalfCrossing("peak is truncated within the trace")
    x_left = np.interp(half, [amplitude[il - 1], amplitude[il]],
                       [freqs[il - 1], freqs[il]])
    x_right = np.interp(half, [amplitude[ir + 1], amplitude[ir]],
                        [freqs[ir + 1], freqs[ir]])
    return float(x_right - x_left)
