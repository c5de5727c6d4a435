"""Shared tolerance / RNG configuration.

Every approximate comparison in the library routes through a single
ToleranceConfig so that reruns with the same seed are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SEED = 74



@dataclass(frozen=True)
class ToleranceConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    rng_seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")
        if not (-(2**63) <= int(self.rng_seed) < 2**64):
            raise ValueError("rng_seed must fit in 64 bits")

    @property
    def cluster_tol(self) -> float:
        # eigenvalues closer than this are treated as one spectral cluster
        return 10.0 * self.abs_tol

    @property
    def rank_tol(self) -> float:
        # pivot / numerical-rank threshold; well above float noise, well
        # below genuine structure constants (smallest seen is 1/dim)
        return 100.0 * self.abs_tol

    @property
    def int_tol(self) -> float:
        # |x - round(x)| bound for validated integer rounding
        return 100.0 * self.abs_tol


class WkaError(Exception):
    """Base class for structural failures (hard assertions)."""


class DimensionMismatch(WkaError):
    pass


class NotStarAlgebra(WkaError):
    pass


class NotWeakKac(WkaError):
    pass


class DecompositionError(WkaError):
    pass


class SolveError(WkaError):
    """A linear solve that the theory promises to be consistent was not."""


class ParseError(WkaError):
    """Malformed serialized input; the message carries a document position."""
