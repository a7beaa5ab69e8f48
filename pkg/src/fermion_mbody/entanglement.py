"""Majorization and trace-form entropies over M-body spectra."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fock import PureState, binom
from .mbody import rho_m

__all__ = [
    "CLAMP_TOL",
    "MAJORIZATION_TOL",
    "Verdict",
    "MajorizationVerdict",
    "EntropyFunctional",
    "VON_NEUMANN",
    "BOSONIC",
    "LINEAR",
    "ENTROPIES",
    "get_entropy",
    "as_spectrum",
    "pad",
    "prefix_sums",
    "majorizes",
    "majorize_compare",
    "entropy",
    "mbody_entropy",
    "normalized_entropy",
    "formation_upper_bound",
    "concurrence_d4",
    "two_fermion_lambdas",
]

CLAMP_TOL = 1e-10
MAJORIZATION_TOL = 1e-9


def as_spectrum(values, clamp_tol: float = CLAMP_TOL) -> np.ndarray:
    """Sorted (nonincreasing) copy with tiny negative entries set to zero."""
    v = np.sort(np.real_if_close(np.asarray(values, dtype=float)).ravel())[::-1]
    if v.size and v[-1] < -clamp_tol * max(1.0, float(np.abs(v).max())):
        raise ValueError(f"spectrum has a negative entry {v[-1]:.3e}")
    return np.clip(v, 0.0, None)


def pad(a: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate([a, np.zeros(n - len(a))]) if len(a) < n else a


def prefix_sums(a, b):
    """Zero-padded prefix sums of two sorted spectra."""
    a, b = as_spectrum(a), as_spectrum(b)
    n = max(len(a), len(b))
    return np.cumsum(pad(a, n)), np.cumsum(pad(b, n))


class Verdict(enum.Enum):
    FIRST_MORE_MIXED = "FirstMoreMixed"
    SECOND_MORE_MIXED = "SecondMoreMixed"
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class MajorizationVerdict:
    """Outcome of comparing two spectra.

    ``first_violation`` is the first prefix index where ``a`` fails to be
    majorized by ``b`` (None if ``a < b`` holds); ``second_violation`` likewise
    for ``b < a``. Indices count prefix lengths from 1.
    """

    verdict: Verdict
    first_violation: int | None
    second_violation: int | None
    prefix_a: np.ndarray
    prefix_b: np.ndarray

    def __str__(self) -> str:
        return self.verdict.value


def majorizes(b, a, tol: float = MAJORIZATION_TOL) -> bool:
    """True when ``a`` is majorized by ``b`` (``a`` more mixed), traces assumed equal."""
    pa, pb = prefix_sums(a, b)
    return bool(np.all(pa <= pb + tol))


def majorize_compare(a, b, tol: float = MAJORIZATION_TOL) -> MajorizationVerdict:
    pa, pb = prefix_sums(a, b)
    if abs(pa[-1] - pb[-1]) > tol:
        raise ValueError(f"traces differ: {pa[-1]} vs {pb[-1]}; normalize first")
    bad_ab = np.nonzero(pa > pb + tol)[0]
    bad_ba = np.nonzero(pb > pa + tol)[0]
    first = int(bad_ab[0]) + 1 if bad_ab.size else None
    second = int(bad_ba[0]) + 1 if bad_ba.size else None
    if first is None and second is None:
        verdict = Verdict.EQUIVALENT
    elif first is None:
        verdict = Verdict.FIRST_MORE_MIXED
    elif second is None:
        verdict = Verdict.SECOND_MORE_MIXED
    else:
        verdict = Verdict.INCOMPARABLE
    return MajorizationVerdict(verdict, first, second, pa, pb)


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyFunctional:
    """Concave ``f`` with ``f(0) = 0``; the entropy of a spectrum is ``sum f(lambda)``."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    log_base: float | None = None

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def is_concave_on(self, grid, tol: float = 1e-12) -> bool:
        """Midpoint concavity spot check on consecutive grid triples."""
        x = np.asarray(grid, dtype=float)
        lo, hi = x[:-1], x[1:]
        return bool(np.all(self((lo + hi) / 2) >= (self(lo) + self(hi)) / 2 - tol))


def _xlogx(x: np.ndarray, base: float) -> np.ndarray:
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos]) / np.log(base)
    return out


VON_NEUMANN = EntropyFunctional("von-neumann", lambda x: -_xlogx(x, 2.0), 2.0)
BOSONIC = EntropyFunctional(
    "bosonic", lambda x: -_xlogx(x, np.e) + _xlogx(1.0 + x, np.e), np.e
)
LINEAR = EntropyFunctional("linear", lambda x: x * (1.0 - x), None)

ENTROPIES = {e.name: e for e in (VON_NEUMANN, BOSONIC, LINEAR)}


def get_entropy(name: str) -> EntropyFunctional:
    try:
        return ENTROPIES[name]
    except KeyError:
        raise ValueError(f"unknown entropy {name!r}; choose from {sorted(ENTROPIES)}") from None


def entropy(spectrum, functional: EntropyFunctional = VON_NEUMANN) -> float:
    """``sum_nu f(lambda_nu)``; entries in ``[-1e-10, 0)`` count as zero."""
    return float(np.sum(functional(as_spectrum(spectrum))))


def mbody_entropy(state: PureState, M: int, functional: EntropyFunctional = VON_NEUMANN) -> float:
    """Entropy of the raw (trace binom(N, M)) M-body spectrum."""
    return entropy(rho_m(state, M).spectrum(), functional)


def normalized_entropy(state: PureState, M: int,
                       functional: EntropyFunctional = VON_NEUMANN) -> float:
    """Entropy of the M-body spectrum divided by binom(N, M); needs 1 <= M <= N-1."""
    if not 1 <= M <= state.N - 1:
        raise ValueError(f"normalized M-body entropy needs 1 <= M <= N-1, got M={M}")
    return entropy(rho_m(state, M).spectrum() / binom(state.N, M), functional)


def formation_upper_bound(states, weights, M: int,
                          functional: EntropyFunctional = VON_NEUMANN) -> float:
    """``sum q_i E(Psi_i)`` for one given pure-state decomposition.

    Any decomposition bounds the convex-roof entanglement from above; no
    minimization over decompositions is attempted.
    """
    w = np.asarray(weights, dtype=float)
    if len(states) != len(w) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError("weights must be a probability vector matching the states")
    return float(sum(q * normalized_entropy(s.normalize(), M, functional)
                     for q, s in zip(w, states)))


# ---------------------------------------------------------------------------
# two fermions in four modes
# ---------------------------------------------------------------------------

def concurrence_d4(state: PureState) -> float:
    """Fermionic concurrence ``2 |G01 G23 - G02 G13 + G03 G12|``."""
    if state.N != 2:
        raise ValueError("concurrence needs a two-fermion state")
    if any(m >> 4 for m in state.amplitudes):
        raise ValueError("concurrence needs support within modes 0..3")

    def g(i, j):
        return state.amplitudes.get((1 << i) | (1 << j), 0.0)

    return float(2 * abs(g(0, 1) * g(2, 3) - g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2)))


def two_fermion_lambdas(C: float) -> tuple[float, float]:
    """Doubly degenerate one-body eigenvalues ``(1 +- sqrt(1 - C^2)) / 2``."""
    r = np.sqrt(max(0.0, 1.0 - C * C))
    return (1 + r) / 2, (1 - r) / 2
