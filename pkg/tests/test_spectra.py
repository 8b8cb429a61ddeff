import numpy as np
import pytest

from oracles import direct_spectrum_oracle
from sivmdcs.emitter import Emitter, LaserSpectrum, default_scheme
from sivmdcs.errors import InvalidSpec, NoHalfCrossing, NonSquareGrid
from sivmdcs.response import Grid, TimeDomainSignal, synthesize_signal
from sivmdcs.spectra import (Trace1D, deconvolve_laser, diagonal_lineout,
                             interpolated_fwhm, project_nu_t, to_spectrum)

FRAME = 406.770


def _random_signal(n_tau=16, n_t=16, seed=0, step=0.5):
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(n_tau, n_t)) + 1j * rng.normal(size=(n_tau, n_t))
    return TimeDomainSignal(data, Grid(n_tau, n_t, step, step, FRAME), 0.5, "pl")


def _two_level_signal(detuning_thz=0.25, n=64, step=0.25):
    scheme = default_scheme()
    scheme = type(scheme)(FRAME + detuning_thz, scheme.ground_splitting_ghz,
                          scheme.excited_splitting_ghz)
    emitter = Emitter(0.0, scheme, 1.0, 1700.0, 40.0, quantum_yield=1.0,
                      two_level=True)
    return synthesize_signal([emitter], Grid(n, n, step, step, FRAME), 0.5,
                             "heterodyne")


def test_transform_matches_direct_sums():
    signal = _random_signal()
    spec = to_spectrum(signal)
    expected = direct_spectrum_oracle(signal.data, 0.5, 0.5,
                                      spec.nu_tau_thz, spec.nu_t_thz, FRAME)
    assert np.max(np.abs(spec.data - expected)) <= 1e-9 * np.max(np.abs(expected))


def test_transform_matches_direct_sums_rectangular():
    signal = _random_signal(n_tau=8, n_t=24, seed=3)
    spec = to_spectrum(signal)
    expected = direct_spectrum_oracle(signal.data, 0.5, 0.5,
                                      spec.nu_tau_thz, spec.nu_t_thz, FRAME)
    assert np.max(np.abs(spec.data - expected)) <= 1e-9 * np.max(np.abs(expected))


def test_parseval_identity():
    signal = _random_signal(seed=11)
    spec = to_spectrum(signal)
    lhs = np.sum(np.abs(spec.data) ** 2)
    rhs = spec.parseval_norm * np.sum(np.abs(signal.data) ** 2)
    assert abs(lhs - rhs) <= 1e-10 * rhs


def test_peak_lands_at_negated_and_direct_frequency():
    d = 0.25
    spec = to_spectrum(_two_level_signal(d))
    idx = np.unravel_index(np.argmax(np.abs(spec.data)), spec.data.shape)
    bin_tau, bin_t = spec.bin_widths()
    assert abs(spec.nu_tau_thz[idx[0]] - (-(FRAME + d))) <= bin_tau / 2
    assert abs(spec.nu_t_thz[idx[1]] - (FRAME + d)) <= bin_t / 2


def test_axes_are_ascending_and_antidiagonal():
    spec = to_spectrum(_random_signal())
    assert np.all(np.diff(spec.nu_tau_thz) > 0)
    assert np.all(np.diff(spec.nu_t_thz) > 0)
    n = len(spec.nu_t_thz)
    for k in range(n):
        assert spec.nu_tau_thz[n - 1 - k] == pytest.approx(-spec.nu_t_thz[k])


def test_pad_factor_refines_bins():
    signal = _random_signal()
    coarse = to_spectrum(signal)
    fine = to_spectrum(signal, pad_factor=4)
    assert fine.data.shape == (64, 64)
    assert fine.bin_widths()[0] == pytest.approx(coarse.bin_widths()[0] / 4)
    with pytest.raises(InvalidSpec):
        to_spectrum(signal, pad_factor=0)


def test_projection_sums_columns():
    spec = to_spectrum(_random_signal())
    proj = project_nu_t(spec)
    assert np.allclose(proj.amplitude, np.abs(spec.data).sum(axis=0))
    assert np.array_equal(proj.freqs_thz, spec.nu_t_thz)
    assert proj.provenance == "projection"
    assert np.all(proj.valid_mask())


def test_diagonal_lineout_values_and_axis():
    signal = _random_signal(seed=2)
    decay = diagonal_lineout(signal)
    assert np.allclose(decay.amplitude,
                       np.abs(signal.data[np.arange(16), np.arange(16)]))
    assert np.allclose(decay.time_ps, np.arange(16) * 1.0)


def test_diagonal_lineout_requires_square_grid():
    with pytest.raises(NonSquareGrid):
        diagonal_lineout(_random_signal(n_tau=8, n_t=16))


def test_deconvolve_divides_and_flags_wings():
    laser = LaserSpectrum(FRAME, 1.0)
    freqs = FRAME + np.linspace(-3.0, 3.0, 201)
    trace = Trace1D(freqs, np.ones_like(freqs))
    out = deconvolve_laser(trace, laser, floor=0.05)
    assert out.provenance == "deconvolved"
    l2 = laser.amplitude(freqs) ** 2
    center = np.abs(freqs - FRAME) < 0.4
    assert np.allclose(out.amplitude[center], 1.0 / l2[center])
    assert np.all(out.valid_mask() == (l2 >= 0.05 * l2.max()))
    assert not np.all(out.valid_mask())


def test_deconvolve_respects_existing_validity_and_floor_bounds():
    laser = LaserSpectrum(FRAME, 1.0)
    freqs = FRAME + np.linspace(-0.1, 0.1, 11)
    trace = Trace1D(freqs, np.ones_like(freqs),
                    valid=np.arange(11) % 2 == 0)
    out = deconvolve_laser(trace, laser)
    assert np.array_equal(out.valid_mask(), trace.valid)
    with pytest.raises(InvalidSpec):
        deconvolve_laser(trace, laser, floor=0.0)
    with pytest.raises(InvalidSpec):
        deconvolve_laser(trace, laser, floor=1.0)


def test_interpolated_fwhm_gaussian():
    sigma = 0.3
    x = np.linspace(-3.0, 3.0, 2001)
    y = np.exp(-0.5 * (x / sigma) ** 2)
    width = interpolated_fwhm(x, y)
    assert width == pytest.approx(2.0 * np.sqrt(2.0 * np.log(2.0)) * sigma,
                                  rel=1e-4)


def test_interpolated_fwhm_uses_outermost_crossings():
    # a spiky envelope dips below half maximum between the true shoulders
    x = np.linspace(-2.0, 2.0, 401)
    y = np.exp(-0.5 * (x / 0.5) ** 2)
    y[195:206:2] *= 0.3
    assert interpolated_fwhm(x, y) == pytest.approx(1.177, abs=0.02)


def test_interpolated_fwhm_truncated_peak_raises():
    x = np.linspace(0.0, 1.0, 50)
    y = np.exp(-x)
    with pytest.raises(NoHalfCrossing):
        interpolated_fwhm(x, y)
