"""Central numeric tolerances. Every cutoff used by the library lives here."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances shared across all modules.

    rank_cut is the global spectral cutoff: eigenvalues at or below it are
    treated as exact zeros, which keeps purification dimensions minimal and
    logarithms finite.
    """

    hermiticity: float = 1e-10
    density_eigenvalue_floor: float = -1e-10
    trace_one: float = 1e-9
    unit_norm: float = 1e-9
    rank_cut: float = 1e-12
    gram_psd: float = 1e-9
    witness: float = 1e-8
    profile_match: float = 1e-7
    ascent_value: float = 1e-10
    ascent_max_iter: int = 4000
    ascent_restarts: int = 10


TOL = Tolerances()

SCHEMA_VERSION = "0.1.0"
