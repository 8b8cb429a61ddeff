"""Frequency-tagged pulse-train intensity records and lock-in demodulation.

The four excitation pulses carry radio-frequency tag offsets, so every
fourth-order mixing product appears in the detected intensity as a beatnote
at a signed combination of the tags.  ``simulate_pulse_train`` builds the
real-valued detector record from a map of signature -> complex amplitude;
``demodulate`` recovers the complex amplitude at one reference beatnote with
a Hann-windowed software lock-in.

Time is handled in microseconds so that MHz tags and MS/s sample rates are
dimensionally consistent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import AliasError, InsufficientRecord
from .pathways import TagSet, signature_frequency

DEFAULT_REP_RATE_MHZ = 76.0


def fourth_order_signatures() -> list[tuple[int, int, int, int]]:
    """All 16 signed fourth-order tag combinations."""
    return [sig for sig in itertools.product((-1, 1), repeat=4)]


@dataclass
class RawTrainRecord:
    sample_rate_msps: float          # megasamples per second == samples/us
    series: np.ndarray               # real detector intensity
    rep_rate_mhz: float
    tags: TagSet
    metadata: dict = field(default_factory=dict)

    @property
    def duration_us(self) -> float:
        return len(self.series) / self.sample_rate_msps

    @property
    def times_us(self) -> np.ndarray:
        return np.arange(len(self.series)) / self.sample_rate_msps


def simulate_pulse_train(amplitudes: Mapping[tuple[int, int, int, int], complex],
                         tags: TagSet, duration_us: float,
                         sample_rate_msps: float,
                         rep_rate_mhz: float = DEFAULT_REP_RATE_MHZ,
                         dc_offset: float = 1.0) -> RawTrainRecord:
    """Detector intensity record containing one beat per signature.

    Each entry contributes Re[A exp(2 pi i nu_sig t)]; a DC pedestal stands
    in for the average photocurrent of the 76 MHz train (the train comb
    itself is far above the record's Nyquist frequency and is recorded as
    metadata only).
    """
    beats = {sig: signature_frequency(sig, tags) for sig in amplitudes}
    max_beat = max((abs(f) for f in beats.values()), default=0.0)
    if sample_rate_msps <= 4.0 * max_beat:
        raise AliasError(
            f"sample rate {sample_rate_msps} MS/s must exceed 4x the largest "
            f"beat frequency {max_beat} MHz")
    n = int(round(duration_us * sample_rate_msps))
    t = np.arange(n) / sample_rate_msps
    series = np.full(n, dc_offset)
    for sig, amp in amplitudes.items():
        if amp != 0:
            series = series + np.real(amp * np.exp(2j * np.pi * beats[sig] * t))
    return RawTrainRecord(sample_rate_msps, series, rep_rate_mhz, tags,
                          metadata={"dc_offset": dc_offset})


def demodulate(record: RawTrainRecord, reference_mhz: float,
               bandwidth_khz: float = 1.0) -> complex:
    """Complex amplitude of the record's component at the reference beat.

    Uses a Hann-windowed synchronous average over the full record, whose
    equivalent bandwidth is at most the requested one (leakage from a tone
    ``df`` away falls off as (df * duration)^-3).  Raises InsufficientRecord
    when the record is shorter than 10 / bandwidth.
    """
    bw_mhz = bandwidth_khz * 1e-3
    if bw_mhz <= 0:
        raise ValueError("bandwidth must be positive")
    if record.duration_us < 10.0 / bw_mhz:
        raise InsufficientRecord(
            f"record of {record.duration_us:.3g} us is shorter than "
            f"10/bandwidth = {10.0 / bw_mhz:.3g} us")
    if abs(reference_mhz) >= record.sample_rate_msps / 2.0:
        raise AliasError("reference frequency is beyond the record's Nyquist limit")
    t = record.times_us
    window = np.hanning(len(t))
    x = record.series - record.series.mean()
    mixed = x * np.exp(-2j * np.pi * reference_mhz * t) * window
    return complex(2.0 * mixed.sum() / window.sum())
