"""Command-line interface.

Exit codes: 0 success, 1 a requested check failed, 2 usage error,
3 runtime or data error.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import config_hash, parse_config, serialize_config
from .errors import SivMdcsError
from .fitting import fit_exponential, fit_finite_bandwidth, fwhm
from .io_utils import (dataset_to_signal, dataset_to_spectrum, read_decay_csv,
                       read_trace_csv, signal_to_dataset, spectrum_to_dataset,
                       write_decay_csv, write_trace_csv, write_tscan_csv)
from .dataset import read_dataset, write_dataset
from .pulsetrain import demodulate, simulate_pulse_train
from .reproduce import (DEFAULT_CONFIGS, TARGETS, build_ensemble,
                        run_reproduction, run_simulation)
from .response import waiting_time_scan
from .spectra import deconvolve_laser, diagonal_lineout, project_nu_t, to_spectrum

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _load_config(args):
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    else:
        text = DEFAULT_CONFIGS["fig1c"]
    cfg = parse_config(text)
    if args.seed is not None:
        object.__setattr__(cfg, "seed", args.seed)
    return cfg


def _out_path(args, name):
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _cmd_simulate(args):
    cfg = _load_config(args)
    signal = run_simulation(cfg, mode=args.mode, threads=args.threads)
    path = _out_path(args, args.output or f"{cfg.basename}_signal.mdcs")
    write_dataset(path, signal_to_dataset(signal))
    if args.verbose:
        print(f"config sha256 {config_hash(cfg)}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_spectrum(args):
    signal = dataset_to_signal(read_dataset(args.input))
    spectrum = to_spectrum(signal, pad_factor=args.pad)
    path = _out_path(args, args.output or "spectrum.mdcs")
    write_dataset(path, spectrum_to_dataset(spectrum))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_project(args):
    spectrum = dataset_to_spectrum(read_dataset(args.input))
    trace = project_nu_t(spectrum)
    path = _out_path(args, args.output or "projection.csv")
    write_trace_csv(path, trace)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_deconvolve(args):
    cfg = _load_config(args)
    trace = read_trace_csv(args.input)
    out = deconvolve_laser(trace, cfg.laser, floor=args.floor)
    path = _out_path(args, args.output or "deconvolved.csv")
    write_trace_csv(path, out)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_lineout(args):
    signal = dataset_to_signal(read_dataset(args.input))
    decay = diagonal_lineout(signal)
    path = _out_path(args, args.output or "diagonal.csv")
    write_decay_csv(path, decay)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_fit_decay(args):
    decay = read_decay_csv(args.input)
    if args.t_max is not None:
        mask = decay.time_ps <= args.t_max
        decay = type(decay)(decay.time_ps[mask], decay.amplitude[mask])
    result = fit_exponential(decay, args.components, floor=args.floor)
    print(result.as_text())
    return EXIT_OK if result.converged else EXIT_CHECK_FAILED


def _cmd_fit_width(args):
    cfg = _load_config(args)
    trace = read_trace_csv(args.input)
    if args.model == "lineshape":
        result = fit_finite_bandwidth(trace, cfg.laser)
        print(result.as_text())
        print(f"fwhm_thz = {result.extras['fwhm_thz']:.6g} "
              f"+- {result.extras['fwhm_sigma_thz']:.2g}")
        return EXIT_OK if result.converged else EXIT_CHECK_FAILED
    width, sigma = fwhm(trace, model=args.model)
    print(f"fwhm_thz = {width:.6g} +- {sigma:.2g}")
    return EXIT_OK


def _cmd_tscan(args):
    cfg = _load_config(args)
    emitters = build_ensemble(cfg)
    waits = np.arange(args.start, args.stop + 0.5 * args.step, args.step)
    scan = waiting_time_scan(emitters, args.tau, args.t, waits, cfg.mode,
                             cfg.laser, cfg.grid.frame_thz)
    path = _out_path(args, args.output or "tscan.csv")
    write_tscan_csv(path, scan)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_demod(args):
    cfg = _load_config(args)
    amplitudes = {(-1, 1, 1, -1): complex(args.amplitude)}
    record = simulate_pulse_train(amplitudes, cfg.tags, args.duration,
                                  args.sample_rate)
    value = demodulate(record, args.reference, bandwidth_khz=args.bandwidth)
    print(f"demodulated = {value.real:.6g}{value.imag:+.6g}j "
          f"(|.| = {abs(value):.6g})")
    return EXIT_OK


def _cmd_reproduce(args):
    config_text = None
    if args.config:
        with open(args.config) as fh:
            config_text = fh.read()
    report = run_reproduction(args.target, config_text, args.out_dir,
                              args.seed, args.threads)
    print(report.to_text(), end="")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sivmdcs",
        description="Simulate and analyze collinear 2D coherent spectra of "
                    "color-center ensembles.")
    parser.add_argument("--version", action="version",
                        version=f"sivmdcs {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration file")
    common.add_argument("--seed", type=int, default=None,
                        help="override the configured random seed")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for signal synthesis")
    common.add_argument("--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="synthesize a time-domain 2D signal")
    p.add_argument("--mode", choices=("pl", "heterodyne"), default=None)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("spectrum", parents=[common],
                       help="Fourier-transform a signal dataset")
    p.add_argument("input")
    p.add_argument("--pad", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_spectrum)

    p = sub.add_parser("project", parents=[common],
                       help="project a 2D spectrum onto the emission axis")
    p.add_argument("input")
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_project)

    p = sub.add_parser("deconvolve", parents=[common],
                       help="remove the excitation bandwidth from a projection")
    p.add_argument("input")
    p.add_argument("--floor", type=float, default=0.05)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_deconvolve)

    p = sub.add_parser("lineout", parents=[common],
                       help="extract the tau = t diagonal decay")
    p.add_argument("input")
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_lineout)

    p = sub.add_parser("fit-decay", parents=[common],
                       help="fit exponentials to a diagonal decay CSV")
    p.add_argument("input")
    p.add_argument("--components", type=int, choices=(1, 2), default=1)
    p.add_argument("--floor", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=None)
    p.set_defaults(fn=_cmd_fit_decay)

    p = sub.add_parser("fit-width", parents=[common],
                       help="measure a linewidth from a projection CSV")
    p.add_argument("input")
    p.add_argument("--model", default="gaussian",
                   choices=("interpolated", "gaussian", "lorentzian",
                            "lineshape"))
    p.set_defaults(fn=_cmd_fit_width)

    p = sub.add_parser("tscan", parents=[common],
                       help="scan the waiting time at fixed tau and t")
    p.add_argument("--tau", type=float, default=2.0)
    p.add_argument("--t", type=float, default=2.0)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=4000.0)
    p.add_argument("--step", type=float, default=250.0)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_tscan)

    p = sub.add_parser("demod", parents=[common],
                       help="simulate lock-in demodulation of a tagged train")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=20000.0,
                   help="record length in microseconds")
    p.add_argument("--sample-rate", type=float, default=5.0,
                   help="samples per microsecond")
    p.add_argument("--reference", type=float, default=0.021,
                   help="demodulation frequency in MHz")
    p.add_argument("--bandwidth", type=float, default=1.0,
                   help="detection bandwidth in kHz")
    p.set_defaults(fn=_cmd_demod)

    p = sub.add_parser("reproduce", parents=[common],
                       help="run a complete reproduction target")
    p.add_argument("target", choices=TARGETS)
    p.set_defaults(fn=_cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except SivMdcsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
