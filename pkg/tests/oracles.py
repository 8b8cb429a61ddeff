"""Independent reference implementations used to validate the package.

Everything here is deliberately brute-force and shares no code with the
library: a phase-cycled two-level density-matrix propagator, a pathway
enumerator driven purely by level connectivity, direct discrete-Fourier
sums, and finite-difference Jacobians.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

TWO_PI = 2.0 * math.pi


# --- phase-cycled density-matrix propagation --------------------------------

def _pulse(rho, theta, phi):
    """Apply U rho U+ with U = cos(theta) I - i sin(theta)
    (sigma+ e^{-i phi} + sigma- e^{+i phi}), basis order (g, e)."""
    c = math.cos(theta)
    s = math.sin(theta)
    u = np.array([[c, -1j * s * np.exp(1j * phi)],
                  [-1j * s * np.exp(-1j * phi), c]])
    return u @ rho @ u.conj().T


def _evolve(rho, dt_ps, detuning_thz, t2_ps, t1_ps):
    """Free evolution: rho_ge gains e^{(+2 pi i d - 1/T2) dt}, the excited
    population relaxes to the ground state with T1."""
    decay = math.exp(-dt_ps / t1_ps)
    phase = np.exp((2j * np.pi * detuning_thz - 1.0 / t2_ps) * dt_ps)
    out = rho.copy()
    out[1, 1] = rho[1, 1] * decay
    out[0, 0] = rho[0, 0] + rho[1, 1] * (1.0 - decay)
    out[0, 1] = rho[0, 1] * phase
    out[1, 0] = rho[1, 0] * np.conj(phase)
    return out


def _cycled_emission(detuning_thz, t2_ps, t1_ps, tau_ps, wait_ps, t_ps, theta):
    """Emission coherence rho_eg after three pulses, phase-cycled (4 steps
    per pulse) to isolate the harmonic e^{+i(phi1 - phi2 - phi3)}."""
    total = 0.0 + 0.0j
    steps = [k * math.pi / 2.0 for k in range(4)]
    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    for p1, p2, p3 in itertools.product(steps, repeat=3):
        rho = _pulse(rho0, theta, p1)
        rho = _evolve(rho, tau_ps, detuning_thz, t2_ps, t1_ps)
        rho = _pulse(rho, theta, p2)
        rho = _evolve(rho, wait_ps, detuning_thz, t2_ps, t1_ps)
        rho = _pulse(rho, theta, p3)
        rho = _evolve(rho, t_ps, detuning_thz, t2_ps, t1_ps)
        total += rho[1, 0] * np.exp(-1j * (p1 - p2 - p3))
    return total / 64.0


def rephasing_response_oracle(detuning_thz, t2_ps, t1_ps, tau_ps, wait_ps,
                              t_ps, theta=0.02):
    """Third-order rephasing response of one two-level emitter.

    The perturbative amplitude is the isolated harmonic divided by
    i theta^3; a Richardson step in theta removes the leading theta^2
    correction, leaving a relative error of order theta^4.
    """
    def order3(th):
        return _cycled_emission(detuning_thz, t2_ps, t1_ps, tau_ps, wait_ps,
                                t_ps, th) / (1j * th ** 3)

    return (4.0 * order3(theta / 2.0) - order3(theta)) / 3.0


def rephasing_response_model(detuning_thz, t2_ps, t1_ps, tau_ps, wait_ps, t_ps):
    """Closed-form two-level rephasing term the simulator is built on
    (one bleach plus one stimulated-emission pathway, unit dipole)."""
    return 2.0 * math.exp(-wait_ps / t1_ps) \
        * np.exp((2j * np.pi * detuning_thz - 1.0 / t2_ps) * tau_ps) \
        * np.exp((-2j * np.pi * detuning_thz - 1.0 / t2_ps) * t_ps)


# --- pathway enumeration from level connectivity ----------------------------

def enumerate_pathways_oracle(levels):
    """Rephasing (kind, excitation, emission) triples from connectivity.

    Rules: the second interaction must close onto a population, and the
    final emission must return the bra to the starting ground sublevel.
    Stimulated emission therefore reuses the excitation transition; bleach
    pathways emit on any transition sharing the starting ground sublevel.
    """
    triples = []
    for i, (gi, _ei) in enumerate(levels):
        triples.append(("se", i, i))
        for j, (gj, _ej) in enumerate(levels):
            if gj == gi:
                triples.append(("gsb", i, j))
    return triples


# --- direct discrete-Fourier sums -------------------------------------------

def direct_spectrum_oracle(data, tau_step_ps, t_step_ps, nu_tau_thz, nu_t_thz,
                           frame_thz):
    """O(N^2 M^2) evaluation of the 2D transform on the given output axes.

    The tau axis uses the forward kernel e^{-2 pi i f m dtau} evaluated at
    f = -nu_tau - frame (the axis is the negated absolute frequency); the
    t axis uses the conjugate kernel e^{+2 pi i f n dt} at f = nu_t - frame.
    """
    m = np.arange(data.shape[0]) * tau_step_ps
    n = np.arange(data.shape[1]) * t_step_ps
    f_tau = -np.asarray(nu_tau_thz) - frame_thz
    f_t = np.asarray(nu_t_thz) - frame_thz
    k_tau = np.exp(-2j * np.pi * np.outer(f_tau, m))
    k_t = np.exp(2j * np.pi * np.outer(n, f_t))
    return k_tau @ data @ k_t


# --- finite-difference Jacobians --------------------------------------------

def jacobian_fd_error(model_fn, jac_fn, x, params, rel_step=1e-6):
    """Max deviation between the analytic Jacobian and central differences,
    normalized by the largest Jacobian entry."""
    params = np.asarray(params, dtype=float)
    analytic = np.asarray(jac_fn(x, params))
    numeric = np.empty_like(analytic)
    for k in range(len(params)):
        h = rel_step * max(abs(params[k]), 1.0)
        hi = params.copy()
        lo = params.copy()
        hi[k] += h
        lo[k] -= h
        numeric[:, k] = (np.asarray(model_fn(x, hi)) - np.asarray(model_fn(x, lo))) / (2.0 * h)
    scale = max(np.abs(analytic).max(), 1e-300)
    return float(np.abs(analytic - numeric).max() / scale)
