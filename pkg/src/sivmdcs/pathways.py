"""Third-order rephasing pathway enumeration and pulse-tag signatures.

Only the rephasing ordering is handled: the first interaction is conjugate,
so every pathway carries the phase signature (-1, +1, +1, -1) and shows up
at the radio-frequency beatnote -nu1 + nu2 + nu3 - nu4.

Model rules for a doublet-doublet scheme (fixed by design):
  * ground-state bleach (GSB) pathways connect any ordered pair of
    transitions sharing a ground sublevel (direct peaks when the pair is
    degenerate, cross peaks otherwise);
  * stimulated emission (SE) pathways are direct only -- shared-excited
    emission would require excited-state coherences that are out of scope;
  * excited-state absorption is excluded (no higher-lying manifold).
"""
from __future__ import annotations

from dataclasses import dataclass

from .emitter import Emitter, LevelScheme

REPHASING_SIGNATURE = (-1, 1, 1, -1)


@dataclass(frozen=True)
class Pathway:
    kind: str                    # "gsb" | "se"
    excitation: int              # index into the scheme's transition list
    emission: int
    sign: int = 1
    shares_ground: bool = True
    phase_signature: tuple[int, int, int, int] = REPHASING_SIGNATURE


@dataclass(frozen=True)
class TagSet:
    """Radio-frequency offsets applied to the four pulses, in MHz."""

    nu1_mhz: float = 80.000
    nu2_mhz: float = 80.107
    nu3_mhz: float = 80.214
    nu4_mhz: float = 80.300

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.nu1_mhz, self.nu2_mhz, self.nu3_mhz, self.nu4_mhz)


def signature_frequency(signature, tags: TagSet) -> float:
    """Signed beatnote frequency (MHz) for a pulse-phase signature."""
    if len(signature) != 4:
        raise ValueError(f"signature must have length 4, got {len(signature)}")
    return float(sum(s * nu for s, nu in zip(signature, tags.as_tuple())))


def rephasing_frequency(tags: TagSet) -> float:
    """Beatnote of the rephasing signal, -nu1 + nu2 + nu3 - nu4 (MHz)."""
    return signature_frequency(REPHASING_SIGNATURE, tags)


def _enumerate_for_levels(levels: tuple[tuple[int, int], ...]) -> tuple[Pathway, ...]:
    pathways = []
    n = len(levels)
    # SE first per transition, then GSB, ascending indices: a stable order.
    for i in range(n):
        pathways.append(Pathway("gsb", i, i, shares_ground=True))
        pathways.append(Pathway("se", i, i, shares_ground=True))
    for i in range(n):
        for j in range(n):
            if i != j and levels[i][0] == levels[j][0]:
                pathways.append(Pathway("gsb", i, j, shares_ground=True))
    return tuple(pathways)


_LEVEL_CACHE: dict[tuple, tuple[Pathway, ...]] = {}


def enumerate_rephasing_pathways(scheme: LevelScheme) -> list[Pathway]:
    """All GSB and SE rephasing pathways of a doublet-doublet scheme."""
    return list(_enumerate_cached(scheme.transition_levels()))


def pathways_for(emitter: Emitter) -> tuple[Pathway, ...]:
    """Pathways for a sampled emitter (two-level emitters get GSB + SE)."""
    return _enumerate_cached(emitter.transition_levels())


def _enumerate_cached(levels: tuple[tuple[int, int], ...]) -> tuple[Pathway, ...]:
    cached = _LEVEL_CACHE.get(levels)
    if cached is None:
        cached = _enumerate_for_levels(levels)
        _LEVEL_CACHE[levels] = cached
    return cached
