import math

import numpy as np
import pytest

from oracles import jacobian_fd_error
from sivmdcs.emitter import GAUSSIAN_FWHM_PER_SIGMA, LaserSpectrum
from sivmdcs.fitting import (bi_lorentzian, bi_lorentzian_jac,
                             finite_bandwidth_jac, finite_bandwidth_model,
                             fit_exponential, fit_finite_bandwidth, fwhm,
                             gaussian_peak, gaussian_peak_jac,
                             levenberg_marquardt, lorentzian_peak,
                             lorentzian_peak_jac, lorentzian_width_from_t2,
                             multi_exponential, multi_exponential_jac,
                             with_background)
from sivmdcs.spectra import DecayTrace, Trace1D

JACOBIAN_CASES = [
    ("mono-exponential", multi_exponential, multi_exponential_jac,
     np.linspace(0.0, 500.0, 60), [3.0, 122.0]),
    ("bi-exponential", multi_exponential, multi_exponential_jac,
     np.linspace(0.0, 3000.0, 80), [2.0, 120.0, 0.7, 990.0]),
    ("mono-exponential-floor",
     lambda x, p: multi_exponential(x, p, floor=0.05),
     lambda x, p: multi_exponential_jac(x, p, floor=0.05),
     np.linspace(0.0, 900.0, 70), [1.5, 122.0]),
    ("gaussian", gaussian_peak, gaussian_peak_jac,
     np.linspace(-2.0, 2.0, 50), [1.2, 0.1, 0.4]),
    ("lorentzian", lorentzian_peak, lorentzian_peak_jac,
     np.linspace(-2.0, 2.0, 50), [0.8, -0.2, 0.3]),
    ("bi-lorentzian", bi_lorentzian, bi_lorentzian_jac,
     np.linspace(-2.0, 2.0, 50), [1.0, 0.05, 0.4, 0.6, 0.1]),
    ("gaussian-background", *with_background(gaussian_peak, gaussian_peak_jac),
     np.linspace(-2.0, 2.0, 50), [1.2, 0.1, 0.4, 0.2]),
]

_LASER_SQ_X = np.linspace(404.0, 409.5, 48)
_LASER_SQ = LaserSpectrum(406.77, 4.14).amplitude(_LASER_SQ_X) ** 2
JACOBIAN_CASES += [
    ("finite-bandwidth",
     lambda x, p: finite_bandwidth_model(x, p, _LASER_SQ),
     lambda x, p: finite_bandwidth_jac(x, p, _LASER_SQ),
     _LASER_SQ_X, [2.0, 406.8, 0.8]),
    ("finite-bandwidth-background",
     *with_background(lambda x, p: finite_bandwidth_model(x, p, _LASER_SQ),
                      lambda x, p: finite_bandwidth_jac(x, p, _LASER_SQ)),
     _LASER_SQ_X, [2.0, 406.8, 0.8, 0.1]),
]


@pytest.mark.parametrize("name,fn,jac,x,params", JACOBIAN_CASES,
                         ids=[c[0] for c in JACOBIAN_CASES])
def test_analytic_jacobians_match_finite_differences(name, fn, jac, x, params):
    assert jacobian_fd_error(fn, jac, x, params) < 1e-6


def test_levenberg_marquardt_recovers_gaussian():
    x = np.linspace(-3.0, 3.0, 200)
    truth = np.array([2.5, 0.3, 0.7])
    y = gaussian_peak(x, truth)
    p, cov, cost, n_iter, converged = levenberg_marquardt(
        gaussian_peak, gaussian_peak_jac, x, y, [1.0, 0.0, 1.0],
        lower=[0.0, -np.inf, 1e-12])
    assert converged
    assert np.allclose(p, truth, rtol=1e-8)
    assert cost < 1e-16


def test_levenberg_marquardt_weights_shift_solution():
    x = np.linspace(0.0, 10.0, 40)
    y = np.where(x < 5.0, 1.0, 3.0)
    flat = lambda xx, pp: np.full_like(xx, pp[0])
    flat_jac = lambda xx, pp: np.ones((len(xx), 1))
    p_even, *_ = levenberg_marquardt(flat, flat_jac, x, y, [0.0])
    w = np.where(x < 5.0, 1.0, 0.0)
    p_left, *_ = levenberg_marquardt(flat, flat_jac, x, y, [0.0], weights=w)
    assert p_even[0] == pytest.approx(2.0, abs=0.1)
    assert p_left[0] == pytest.approx(1.0, abs=1e-8)


def test_fit_exponential_mono():
    x = np.linspace(0.0, 600.0, 120)
    trace = DecayTrace(x, 4.0 * np.exp(-x / 122.0))
    result = fit_exponential(trace, 1)
    assert result.converged
    assert result["A"] == pytest.approx(4.0, rel=1e-6)
    assert result["T2a_ps"] == pytest.approx(122.0, rel=1e-6)
    assert result.model == "mono-exponential"


def test_fit_exponential_bi_canonical_order():
    x = np.linspace(0.0, 4000.0, 400)
    trace = DecayTrace(x, 2.0 * np.exp(-x / 120.0) + 0.8 * np.exp(-x / 990.0))
    result = fit_exponential(trace, 2)
    assert result.model == "bi-exponential"
    assert result["T2a_ps"] == pytest.approx(120.0, rel=1e-4)
    assert result["T2b_ps"] == pytest.approx(990.0, rel=1e-4)
    assert result["T2a_ps"] < result["T2b_ps"]
    assert result["A"] == pytest.approx(2.0, rel=1e-4)
    assert result["B"] == pytest.approx(0.8, rel=1e-4)


def test_fit_exponential_degenerate_collapses_to_mono():
    x = np.linspace(0.0, 600.0, 150)
    trace = DecayTrace(x, 3.0 * np.exp(-x / 150.0))
    result = fit_exponential(trace, 2)
    assert "degenerate-fit" in result.warnings
    assert result.model == "mono-exponential"
    assert result["T2a_ps"] == pytest.approx(150.0, rel=1e-4)


def test_fit_exponential_noise_floor():
    rng = np.random.default_rng(0)
    x = np.linspace(0.0, 1500.0, 300)
    clean = 5.0 * np.exp(-x / 122.0)
    noisy = np.abs(clean + rng.normal(0.0, 0.05, x.shape))
    result = fit_exponential(DecayTrace(x, noisy), 1, floor=0.05)
    assert result["T2a_ps"] == pytest.approx(122.0, rel=0.05)


def test_fit_exponential_validation():
    x = np.linspace(0.0, 10.0, 30)
    trace = DecayTrace(x, np.exp(-x))
    with pytest.raises(ValueError):
        fit_exponential(trace, 3)
    with pytest.raises(ValueError):
        fit_exponential(DecayTrace(x[:5], np.exp(-x[:5])), 1)
    with pytest.raises(ValueError):
        fit_exponential(trace, 1, floor=-1.0)


def _gaussian_trace(fwhm_thz=0.028, center=406.654, background=0.0, n=301):
    sigma = fwhm_thz / GAUSSIAN_FWHM_PER_SIGMA
    x = center + np.linspace(-5 * fwhm_thz, 5 * fwhm_thz, n)
    return Trace1D(x, np.exp(-0.5 * ((x - center) / sigma) ** 2) + background)


def test_fwhm_models_on_clean_gaussian():
    trace = _gaussian_trace()
    for model in ("interpolated", "gaussian"):
        width, sigma = fwhm(trace, model=model)
        assert width == pytest.approx(0.028, rel=1e-3)
        assert sigma >= 0.0


def test_fwhm_gaussian_with_background_recovers_width():
    trace = _gaussian_trace(background=0.2)
    plain, _ = fwhm(trace, model="gaussian")
    corrected, _ = fwhm(trace, model="gaussian", background=True)
    assert abs(corrected - 0.028) < abs(plain - 0.028)
    assert corrected == pytest.approx(0.028, rel=1e-3)


def test_fwhm_lorentzian_model():
    hwhm = 0.1
    x = np.linspace(-3.0, 3.0, 601)
    trace = Trace1D(x, hwhm ** 2 / (x ** 2 + hwhm ** 2))
    width, _ = fwhm(trace, model="lorentzian")
    assert width == pytest.approx(2 * hwhm, rel=1e-6)


def test_fwhm_respects_validity_mask():
    trace = _gaussian_trace()
    # corrupt only bins flagged invalid; the fit must ignore them
    bad = np.zeros(len(trace.freqs_thz), dtype=bool)
    bad[:40] = True
    trace.amplitude[bad] = 5.0
    trace.valid = ~bad
    width, _ = fwhm(trace, model="gaussian")
    assert width == pytest.approx(0.028, rel=1e-3)


def test_fwhm_validation():
    trace = _gaussian_trace()
    with pytest.raises(ValueError):
        fwhm(trace, model="voigt")
    short = Trace1D(trace.freqs_thz[:3], trace.amplitude[:3])
    with pytest.raises(ValueError):
        fwhm(short)


def test_fit_finite_bandwidth_recovers_broad_width():
    laser = LaserSpectrum(406.77, 4.14)
    sigma = 1.84 / GAUSSIAN_FWHM_PER_SIGMA
    x = np.linspace(403.0, 410.5, 601)
    y = 3.0 * np.exp(-0.5 * ((x - 406.77) / sigma) ** 2) * laser.amplitude(x) ** 2
    result = fit_finite_bandwidth(Trace1D(x, y), laser)
    assert result.converged
    assert result.extras["fwhm_thz"] == pytest.approx(1.84, rel=1e-4)
    assert result["center_thz"] == pytest.approx(406.77, abs=1e-4)
    assert result.warnings == ()


def test_fit_finite_bandwidth_background_parameter():
    laser = LaserSpectrum(406.77, 4.14)
    sigma = 1.84 / GAUSSIAN_FWHM_PER_SIGMA
    x = np.linspace(403.0, 410.5, 601)
    y = 3.0 * np.exp(-0.5 * ((x - 406.77) / sigma) ** 2) * laser.amplitude(x) ** 2
    result = fit_finite_bandwidth(Trace1D(x, y + 0.25), laser, background=True)
    assert result["background"] == pytest.approx(0.25, rel=1e-3)
    assert result.extras["fwhm_thz"] == pytest.approx(1.84, rel=1e-3)


def test_fit_finite_bandwidth_flags_ill_conditioned_width():
    laser = LaserSpectrum(406.77, 1.0)
    sigma = 8.0 / GAUSSIAN_FWHM_PER_SIGMA
    x = np.linspace(403.0, 410.5, 301)
    y = np.exp(-0.5 * ((x - 406.77) / sigma) ** 2) * laser.amplitude(x) ** 2
    result = fit_finite_bandwidth(Trace1D(x, y), laser)
    assert "ill-conditioned" in result.warnings


def test_fit_result_text_and_csv():
    trace = _gaussian_trace()
    laser = LaserSpectrum(406.654, 4.14)
    result = fit_finite_bandwidth(trace, laser)
    text = result.as_text()
    assert "model = finite-bandwidth" in text
    assert "fwhm_thz" in text
    assert result.as_csv_row().startswith("finite-bandwidth,")
    assert result.sigma("sigma_thz") >= 0.0


def test_lorentzian_width_from_t2():
    assert lorentzian_width_from_t2(122.0) == pytest.approx(1.3045, abs=1e-3)
    assert lorentzian_width_from_t2(990.0) == pytest.approx(0.16077, abs=1e-4)
    with pytest.raises(ValueError):
        lorentzian_width_from_t2(0.0)
