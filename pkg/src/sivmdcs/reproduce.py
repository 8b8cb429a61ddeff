"""One-command reproduction targets chaining simulate -> transform -> analyze.

Each target carries a default configuration, runs the full pipeline, writes
its datasets and CSV traces, and reports extracted quantities next to the
reference values with a pass/fail flag per tolerance.  All randomness is
seeded, so a fixed config reproduces every artifact bit-exactly.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .config import ExperimentConfig, config_hash, parse_config
from .emitter import sample_ensemble
from .fitting import (fit_exponential, fit_finite_bandwidth, fwhm,
                      lorentzian_width_from_t2)
from .io_utils import (signal_to_dataset, write_dataset, write_decay_csv,
                       write_trace_csv, write_tscan_csv)
from .response import synthesize_signal, waiting_time_scan
from .spectra import (DecayTrace, deconvolve_laser, diagonal_lineout,
                      interpolated_fwhm, project_nu_t, to_spectrum)

TARGETS = ("fig1c", "fig1d", "fig2", "fig3", "fig4", "t1scan")


@dataclass
class Check:
    name: str
    value: float
    reference: str
    passed: bool

    def line(self) -> str:
        flag = "pass" if self.passed else "FAIL"
        return f"check {self.name} = {self.value:.6g} ({self.reference}) -> {flag}"


@dataclass
class Report:
    target: str
    cfg: ExperimentConfig
    checks: list[Check] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)

    def add(self, name, value, reference, passed):
        self.checks.append(Check(name, float(value), reference, bool(passed)))

    def add_interval(self, name, value, lo, hi):
        self.add(name, value, f"expected in [{lo:.6g}, {hi:.6g}]", lo <= value <= hi)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_text(self) -> str:
        lines = [f"target = {self.target}",
                 f"tool_version = {__version__}",
                 f"config_sha256 = {config_hash(self.cfg)}",
                 f"seed = {self.cfg.seed}"]
        lines += [c.line() for c in self.checks]
        lines += [f"artifact = {a}" for a in self.artifacts]
        lines.append(f"status = {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


# --- default configurations -------------------------------------------------

_BASE = """
[laser]
center = 406.770 thz
fwhm = 4.14 thz

[tags]
nu1 = 80.000 mhz
nu2 = 80.107 mhz
nu3 = 80.214 mhz
nu4 = 80.300 mhz
"""

DEFAULT_CONFIGS = {
    "fig1c": _BASE + """
[grid]
tau_points = 1024
t_points = 1024
tau_step = 1.171875 ps
t_step = 1.171875 ps

[simulation]
waiting_time = 0.5 ps
mode = pl
noise = 0.0
seed = 7
ensemble_size = 2000

[component.bright]
weight = 1.0
strain_shape = gaussian
strain_fwhm = 0.028
t2 = 122 ps
t1 = 1.7 ns
yield = strain
""",
    "fig1d": _BASE + """
[strain]
yield_crossover = 0.02
yield_steepness = 4.0

[grid]
tau_points = 1024
t_points = 1024
tau_step = 0.1 ps
t_step = 0.1 ps

[simulation]
waiting_time = 0.5 ps
mode = heterodyne
noise = 0.0
seed = 7
ensemble_size = 1500

[component.bright]
weight = 0.005
strain_shape = gaussian
strain_fwhm = 0.028
t2 = 122 ps
t1 = 1.7 ns
yield = strain

[component.hidden]
weight = 0.995
strain_shape = gaussian
strain_fwhm = 1.84
t2 = 5 ps
t1 = 1.7 ns
yield = strain
two_level = true
""",
    "fig2": _BASE + """
[grid]
tau_points = 512
t_points = 512
tau_step = 1.171875 ps
t_step = 1.171875 ps

[simulation]
waiting_time = 0.5 ps
mode = pl
noise = 0.0
seed = 7
ensemble_size = 2000

[component.bright]
weight = 1.0
strain_shape = gaussian
strain_fwhm = 0.028
t2 = 122 ps
t1 = 1.7 ns
yield = strain
""",
    "fig3": _BASE + """
[strain]
yield_crossover = 0.02
yield_steepness = 4.0

[grid]
tau_points = 1024
t_points = 1024
tau_step = 0.1 ps
t_step = 0.1 ps

[simulation]
waiting_time = 0.5 ps
mode = heterodyne
noise = 0.0
seed = 13
ensemble_size = 6000

[component.bright]
weight = 0.005
strain_shape = gaussian
strain_fwhm = 0.028
t2 = 20 ps
t1 = 1.7 ns
yield = strain
two_level = true

[component.hidden]
weight = 0.995
strain_shape = gaussian
strain_fwhm = 1.84
t2 = 20 ps
t1 = 1.7 ns
yield = strain
two_level = true
""",
    "fig4": _BASE + """
[grid]
tau_points = 1024
t_points = 1024
tau_step = 1.0 ps
t_step = 1.0 ps

[simulation]
waiting_time = 0.5 ps
mode = pl
noise = 3.0
seed = 7
ensemble_size = 1500

[component.bright]
weight = 1.0
strain_shape = gaussian
strain_fwhm = 0.028
t2 = 122 ps
t1 = 1.7 ns
yield = strain
two_level = true
""",
    "t1scan": _BASE + """
[grid]
tau_points = 16
t_points = 16
tau_step = 1.0 ps
t_step = 1.0 ps

[simulation]
waiting_time = 0.0 ps
mode = heterodyne
noise = 0.0
seed = 7
ensemble_size = 50

[component.uniform]
weight = 1.0
strain_shape = delta
strain_fwhm = 0.0
t2 = 122 ps
t1 = 1.7 ns
yield = strain
two_level = true
""",
}

# Secondary config for the fig2 hidden-population measurement: a broad
# two-level ensemble observed in heterodyne detection on a fine grid.
FIG2_HIDDEN_CONFIG = _BASE + """
[grid]
tau_points = 256
t_points = 8192
tau_step = 0.125 ps
t_step = 0.125 ps

[simulation]
waiting_time = 0.5 ps
mode = heterodyne
noise = 0.0
seed = 11
ensemble_size = 32000

[component.hidden]
weight = 1.0
strain_shape = gaussian
strain_fwhm = 1.84
t2 = 990 ps
t1 = 1.7 ns
yield = strain
two_level = true
"""

# Heterodyne branch of the fig4 dephasing comparison.  The inhomogeneous
# width is kept modest so a 1 ps step grid resolves every detuning; the
# diagonal decay is independent of that width (photon-echo property).
FIG4_HET_CONFIG = _BASE + """
[grid]
tau_points = 1024
t_points = 1024
tau_step = 1.0 ps
t_step = 1.0 ps

[simulation]
waiting_time = 0.5 ps
mode = heterodyne
noise = 1.0
seed = 11
ensemble_size = 1500

[component.hidden]
weight = 1.0
strain_shape = gaussian
strain_fwhm = 0.2
t2 = 120 ps : 0.7, 990 ps : 0.3
t1 = 1.7 ns
yield = strain
two_level = true
"""


def build_ensemble(cfg: ExperimentConfig):
    return sample_ensemble(cfg.ensemble, cfg.scheme, cfg.strain,
                           cfg.ensemble_size, cfg.seed)


def run_simulation(cfg: ExperimentConfig, mode: str | None = None, threads: int = 1):
    emitters = build_ensemble(cfg)
    return synthesize_signal(emitters, cfg.grid, cfg.waiting_time_ps,
                             mode or cfg.mode, cfg.laser,
                             noise_rms=cfg.noise, noise_seed=cfg.seed + 1,
                             threads=threads)


def _window_stats(spectrum, nu_tau_center, nu_t_center, half_width):
    """(centroid_nu_tau, centroid_nu_t, integrated amplitude) in a box."""
    rows = np.abs(spectrum.nu_tau_thz - nu_tau_center) <= half_width
    cols = np.abs(spectrum.nu_t_thz - nu_t_center) <= half_width
    box = np.abs(spectrum.data[np.ix_(rows, cols)])
    total = box.sum()
    if total == 0:
        return nu_tau_center, nu_t_center, 0.0
    w_tau = box.sum(axis=1)
    w_t = box.sum(axis=0)
    return (float(np.sum(spectrum.nu_tau_thz[rows] * w_tau) / total),
            float(np.sum(spectrum.nu_t_thz[cols] * w_t) / total),
            float(total))


def _window_max(spectrum, nu_tau_center, nu_t_center, half_width):
    rows = np.abs(spectrum.nu_tau_thz - nu_tau_center) <= half_width
    cols = np.abs(spectrum.nu_t_thz - nu_t_center) <= half_width
    return float(np.abs(spectrum.data[np.ix_(rows, cols)]).max())


def _rebin_trace(trace, factor):
    """Block-average a trace to suppress per-bin sampling noise."""
    n = (len(trace.freqs_thz) // factor) * factor
    freqs = trace.freqs_thz[:n].reshape(-1, factor).mean(axis=1)
    amps = trace.amplitude[:n].reshape(-1, factor).mean(axis=1)
    valid = None if trace.valid is None \
        else trace.valid[:n].reshape(-1, factor).all(axis=1)
    return replace(trace, freqs_thz=freqs, amplitude=amps, valid=valid)


def _window_trace(trace, center, half_width):
    mask = np.abs(trace.freqs_thz - center) <= half_width
    return replace(trace, freqs_thz=trace.freqs_thz[mask],
                   amplitude=trace.amplitude[mask],
                   valid=None if trace.valid is None else trace.valid[mask])


def _peak_window_fwhm(trace, center, half_width, model="gaussian"):
    return fwhm(_window_trace(trace, center, half_width), model=model)


def _truncate_decay(trace: DecayTrace, t_max: float) -> DecayTrace:
    mask = trace.time_ps <= t_max
    return DecayTrace(trace.time_ps[mask], trace.amplitude[mask])


# --- targets ---------------------------------------------------------------

def _target_fig1c(cfg, out_dir, report, threads):
    signal = run_simulation(cfg, threads=threads)
    spectrum = to_spectrum(signal)
    _write_signal(out_dir, "fig1c_pl", signal, report)
    write_trace_csv(_art(out_dir, "fig1c_projection.csv", report),
                    project_nu_t(spectrum))

    lines = cfg.scheme.transition_frequencies()
    levels = cfg.scheme.transition_levels()
    bin_tau, bin_t = spectrum.bin_widths()
    half = 0.020
    for i, nu in enumerate(lines):
        c_tau, c_t, _ = _window_stats(spectrum, -nu, nu, half)
        report.add_interval(f"direct_peak_{i}_nu_t_thz", c_t, nu - bin_t, nu + bin_t)
        report.add_interval(f"direct_peak_{i}_nu_tau_thz", c_tau,
                            -nu - bin_tau, -nu + bin_tau)

    shared, unshared = [], []
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            amp = _window_max(spectrum, -lines[i], lines[j], 0.010)
            (shared if levels[i][0] == levels[j][0] else unshared).append(amp)
    ratio = min(shared) / max(max(unshared), 1e-300)
    report.add("cross_peak_contrast", ratio, "shared/unshared >= 5", ratio >= 5.0)


def _target_fig1d(cfg, out_dir, report, threads):
    signal = run_simulation(cfg, threads=threads)
    spectrum = to_spectrum(signal)
    _write_signal(out_dir, "fig1d_het", signal, report)
    projection = project_nu_t(spectrum)
    write_trace_csv(_art(out_dir, "fig1d_projection.csv", report), projection)

    width = interpolated_fwhm(projection.freqs_thz, projection.amplitude)
    report.add("projection_fwhm_thz", width, "expected > 1 THz", width > 1.0)

    # ridge on the nu_tau = -nu_t diagonal
    idx = np.unravel_index(np.argmax(np.abs(spectrum.data)), spectrum.data.shape)
    mismatch = abs(spectrum.nu_tau_thz[idx[0]] + spectrum.nu_t_thz[idx[1]])
    bin_tau, bin_t = spectrum.bin_widths()
    report.add("peak_diagonal_offset_thz", mismatch,
               f"expected <= {2 * max(bin_tau, bin_t):.4g}",
               mismatch <= 2 * max(bin_tau, bin_t))

    absdata = np.abs(spectrum.data)
    n = len(spectrum.nu_t_thz)
    diag = np.array([absdata[n - 1 - k, k] for k in range(n)])
    off = np.roll(absdata, n // 8, axis=0)
    off_diag = np.array([off[n - 1 - k, k] for k in range(n)])
    ratio = diag.mean() / max(off_diag.mean(), 1e-300)
    report.add("diagonal_ridge_contrast", ratio, "diag/off >= 10", ratio >= 10.0)


def _target_fig2(cfg, out_dir, report, threads):
    # bright branch (PL detection, coarse frequency grid)
    bright_signal = run_simulation(cfg, threads=threads)
    bright_proj = project_nu_t(to_spectrum(bright_signal))
    write_trace_csv(_art(out_dir, "fig2_bright_projection.csv", report), bright_proj)

    lowest = float(cfg.scheme.transition_frequencies()[0])
    width_ghz = 1e3 * fwhm(_window_trace(bright_proj, lowest, 0.042),
                           model="gaussian", background=True)[0]
    report.add_interval("bright_fwhm_ghz", width_ghz, 28.0 * 0.9, 28.0 * 1.1)

    # hidden branch (heterodyne, fine grid, broad two-level ensemble)
    hidden_cfg = parse_config(FIG2_HIDDEN_CONFIG)
    hidden_signal = run_simulation(hidden_cfg, threads=threads)
    hidden_proj = project_nu_t(to_spectrum(hidden_signal))
    write_trace_csv(_art(out_dir, "fig2_hidden_projection.csv", report), hidden_proj)

    # both width routes work on the central window; a constant-background
    # parameter absorbs the spectral-tail pedestal of the amplitude projection
    center = hidden_cfg.scheme.center_thz
    deconvolved = deconvolve_laser(hidden_proj, hidden_cfg.laser, floor=0.05)
    write_trace_csv(_art(out_dir, "fig2_hidden_deconvolved.csv", report), deconvolved)
    w_dec, u_dec = fwhm(_window_trace(_rebin_trace(deconvolved, 8), center, 1.1),
                        model="gaussian", background=True)
    report.add_interval("hidden_fwhm_deconvolved_thz", w_dec, 1.84 * 0.95, 1.84 * 1.05)

    fit = fit_finite_bandwidth(_window_trace(_rebin_trace(hidden_proj, 8), center, 1.1),
                               hidden_cfg.laser, background=True)
    w_fb = fit.extras["fwhm_thz"]
    u_fb = fit.extras["fwhm_sigma_thz"]
    report.add_interval("hidden_fwhm_lineshape_thz", w_fb, 1.84 * 0.95, 1.84 * 1.05)

    gap = abs(w_dec - w_fb)
    budget = u_dec + u_fb
    report.add("hidden_route_agreement_thz", gap,
               f"expected <= {budget:.4g}", gap <= budget)


def _target_fig3(cfg, out_dir, report, threads):
    emitters = build_ensemble(cfg)
    het = synthesize_signal(emitters, cfg.grid, cfg.waiting_time_ps,
                            "heterodyne", cfg.laser, threads=threads)
    pl = synthesize_signal(emitters, cfg.grid, cfg.waiting_time_ps,
                           "pl", cfg.laser, threads=threads)
    het_proj = project_nu_t(to_spectrum(het))
    pl_proj = project_nu_t(to_spectrum(pl))
    write_trace_csv(_art(out_dir, "fig3_het_projection.csv", report), het_proj)
    write_trace_csv(_art(out_dir, "fig3_pl_projection.csv", report), pl_proj)

    # (a) broad-component fraction, measured in the wings.  Power weights
    # (|amplitude|^2) keep the metric sensitive to the genuine broad feature
    # rather than to the slowly decaying tails every sampled line carries.
    center = cfg.scheme.center_thz
    wings = np.abs(het_proj.freqs_thz - center) > 0.15
    het_frac = (het_proj.amplitude[wings] ** 2).sum() / (het_proj.amplitude ** 2).sum()
    pl_frac = (pl_proj.amplitude[wings] ** 2).sum() / (pl_proj.amplitude ** 2).sum()
    report.add("pl_wing_fraction_ratio", pl_frac / het_frac,
               "expected < 0.1", pl_frac < 0.1 * het_frac)

    # (b) linewidth contrast
    w_het = interpolated_fwhm(het_proj.freqs_thz, het_proj.amplitude)
    w_pl = interpolated_fwhm(pl_proj.freqs_thz, pl_proj.amplitude)
    report.add("fwhm_ratio_het_over_pl", w_het / w_pl,
               "expected >= 20", w_het / w_pl >= 20.0)

    # (c) with yield suppression disabled, PL == Y0 * heterodyne
    flat = replace(cfg.ensemble, components=tuple(
        replace(c, yield_rule=0.8) for c in cfg.ensemble.components))
    flat_emitters = sample_ensemble(flat, cfg.scheme, cfg.strain,
                                    cfg.ensemble_size, cfg.seed)
    het_flat = synthesize_signal(flat_emitters, cfg.grid, cfg.waiting_time_ps,
                                 "heterodyne", cfg.laser, threads=threads)
    pl_flat = synthesize_signal(flat_emitters, cfg.grid, cfg.waiting_time_ps,
                                "pl", cfg.laser, threads=threads)
    dev = np.max(np.abs(pl_flat.data - 0.8 * het_flat.data)) \
        / np.max(np.abs(het_flat.data)) / 0.8
    report.add("yield_off_proportionality_dev", dev,
               "expected <= 1e-6", dev <= 1e-6)


def _target_fig4(cfg, out_dir, report, threads):
    # PL-detected bright diagonal: mono-exponential
    pl_signal = run_simulation(cfg, threads=threads)
    pl_decay = diagonal_lineout(pl_signal)
    write_decay_csv(_art(out_dir, "fig4_pl_diagonal.csv", report), pl_decay)
    mono = fit_exponential(_truncate_decay(pl_decay, 600.0), 1)
    report.add_interval("pl_t2a_ps", mono["T2a_ps"], 122 - 7, 122 + 7)

    # heterodyne hidden diagonal: bi-exponential
    het_cfg = parse_config(FIG4_HET_CONFIG)
    het_signal = run_simulation(het_cfg, threads=threads)
    het_decay = diagonal_lineout(het_signal)
    write_decay_csv(_art(out_dir, "fig4_het_diagonal.csv", report), het_decay)
    bi = fit_exponential(het_decay, 2)
    report.add_interval("het_t2a_ps", bi["T2a_ps"], 120 - 5, 120 + 5)
    report.add_interval("het_t2b_ps", bi["T2b_ps"], 990 - 180, 990 + 180)

    report.add_interval("het_width_a_ghz",
                        lorentzian_width_from_t2(bi["T2a_ps"]),
                        1.33 - 0.06, 1.33 + 0.06)
    report.add_interval("het_width_b_mhz",
                        1e3 * lorentzian_width_from_t2(bi["T2b_ps"]),
                        160 - 30, 160 + 30)

    with open(os.path.join(out_dir, "fig4_fits.txt"), "w") as fh:
        fh.write(mono.as_text() + "\n\n" + bi.as_text() + "\n")
    report.artifacts.append("fig4_fits.txt")


def _target_t1scan(cfg, out_dir, report, threads):
    emitters = build_ensemble(cfg)
    waits = np.arange(0.0, 4000.1, 250.0)
    scan = waiting_time_scan(emitters, 2.0, 2.0, waits, cfg.mode,
                             cfg.laser, cfg.grid.frame_thz)
    write_tscan_csv(_art(out_dir, "t1scan.csv", report), scan)
    amps = np.array([abs(a) for _, a in scan])
    slope, _ = np.polyfit(waits, np.log(amps), 1)
    t1_ps = -1.0 / slope
    report.add_interval("t1_ns", t1_ps * 1e-3, 1.7 * 0.95, 1.7 * 1.05)


_TARGET_FNS = {
    "fig1c": _target_fig1c,
    "fig1d": _target_fig1d,
    "fig2": _target_fig2,
    "fig3": _target_fig3,
    "fig4": _target_fig4,
    "t1scan": _target_t1scan,
}


def _art(out_dir, name, report):
    report.artifacts.append(name)
    return os.path.join(out_dir, name)


def _write_signal(out_dir, stem, signal, report):
    write_dataset(_art(out_dir, stem + ".mdcs", report), signal_to_dataset(signal))


def run_reproduction(target: str, config_text: str | None = None,
                     out_dir: str = ".", seed: int | None = None,
                     threads: int = 1) -> Report:
    """Run one reproduction target and write its artifacts and report."""
    if target not in TARGETS:
        raise ValueError(f"unknown reproduction target {target!r}; "
                         f"choose from {', '.join(TARGETS)}")
    cfg = parse_config(config_text if config_text is not None
                       else DEFAULT_CONFIGS[target])
    if seed is not None:
        object.__setattr__(cfg, "seed", seed)
    os.makedirs(out_dir, exist_ok=True)
    report = Report(target, cfg)
    _TARGET_FNS[target](cfg, out_dir, report, threads)
    with open(os.path.join(out_dir, f"{target}_report.txt"), "w") as fh:
        fh.write(report.to_text())
    report.artifacts.append(f"{target}_report.txt")
    return report
