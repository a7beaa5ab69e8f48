"""
Closed-form M-body spectra for pair condensates, GHZ-like states and Slater
determinants, the occupancy-measurement counterexample, and the data behind
the lambda_max versus pair-number curves.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "AnalyticSpectrum",
    "pair_condensate_spectrum",
    "lambda_2m_max",
    "ghz_spectrum",
    "slater_spectrum",
    "appendix_b_report",
    "OccupancyReport",
    "figure1_data",
    "figure1_csv",
    "cluster_spectrum",
]


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Distinct eigenvalues with multiplicities; zero eigenvalues are listed too."""

    D: int
    N: int
    M: int
    entries: tuple[tuple[float, int], ...]

    @property
    def total(self) -> float:
        return sum(v * m for v, m in self.entries)

    @property
    def dimension(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def max(self) -> float:
        return max(v for v, m in self.entries if m > 0)

    def expanded(self) -> np.ndarray:
        """Full nonincreasing eigenvalue list."""
        vals = np.concatenate([np.full(m, v, dtype=float) for v, m in self.entries if m > 0])
        return np.sort(vals)[::-1]

    def merged(self, tol: float = 1e-8) -> list[tuple[float, int]]:
        """Entries with coinciding values merged, nonincreasing."""
        return cluster_spectrum(self.expanded(), tol)


def cluster_spectrum(values, tol: float = 1e-8) -> list[tuple[float, int]]:
    """Group a spectrum into (value, multiplicity), splitting at gaps larger than ``tol``."""
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    out = []
    start = 0
    for i in range(1, len(v) + 1):
        if i == len(v) or v[i - 1] - v[i] > tol:
            out.append((float(v[start:i].mean()), i - start))
            start = i
    return out


def _check_pair_params(D: int, k: int) -> None:
    if D % 2 or D < 2:
        raise ValueError(f"D must be even and positive, got {D}")
    if not 0 <= k <= D // 2:
        raise ValueError(f"k={k} outside [0, {D // 2}]")


def pair_condensate_spectrum(D: int, k: int, M: int) -> AnalyticSpectrum:
    """Exact spectrum of the M-body matrix (M = 1, 2, 3) of the k-pair condensate."""
    _check_pair_params(D, k)
    N = 2 * k
    if M == 1:
        entries = ((2 * k / D, D),)
    elif M == 2:
        top = k * (1 - 2 * (k - 1) / D)
        rest = 4 * k * (k - 1) / (D * (D - 2)) if D > 2 else 0.0
        entries = ((top, 1), (rest, comb(D, 2) - 1))
    elif M == 3:
        if D <= 4:
            raise ValueError("three-body closed form needs D > 4")
        top = 2 * k * (k - 1) * (1 - 2 * (k - 1) / D) / (D - 2)
        rest = 8 * k * (k - 1) * (k - 2) / (D * (D - 2) * (D - 4))
        entries = ((top, D), (rest, comb(D, 3) - D))
    else:
        raise ValueError(f"closed-form spectra exist for M in (1, 2, 3), got M={M}")
    return AnalyticSpectrum(D, N, M, entries)


def lambda_2m_max(D: int, k: int, m: int) -> float:
    """Largest eigenvalue of the 2m-body matrix of the k-pair condensate.

    ``binom(k, m) binom(D/2 - k + m, m) / binom(D/2, m)``. The odd state with
    one extra fermion has the same largest (2m+1)-body eigenvalue.
    """
    _check_pair_params(D, k)
    if not 0 <= m <= k:
        raise ValueError(f"need 0 <= m <= k, got m={m}, k={k}")
    h = D // 2
    return comb(k, m) * comb(h - k + m, m) / comb(h, m)


def ghz_spectrum(D: int, M: int) -> AnalyticSpectrum:
    """GHZ-like state with N = D/2: eigenvalue 1/2 with multiplicity 2 binom(N, M)."""
    if D % 2 or D < 2:
        raise ValueError(f"GHZ-like state needs even D, got {D}")
    N = D // 2
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside [0, {N}]")
    dim = comb(D, M)
    if M in (0, N):
        return AnalyticSpectrum(D, N, M, ((1.0, 1), (0.0, dim - 1)))
    nz = 2 * comb(N, M)
    return AnalyticSpectrum(D, N, M, ((0.5, nz), (0.0, dim - nz)))


def slater_spectrum(N: int, M: int, D: int | None = None) -> AnalyticSpectrum:
    """Slater determinant: binom(N, M) unit eigenvalues (plus zeros when D is given)."""
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside [0, {N}]")
    nz = comb(N, M)
    zeros = comb(D, M) - nz if D is not None else 0
    return AnalyticSpectrum(D if D is not None else N, N, M, ((1.0, nz), (0.0, zeros)))


@dataclass(frozen=True)
class OccupancyReport:
    D: int
    N: int
    lambda_max: float
    occupied_max: float
    empty_max: float
    p_occupied: float
    average_max: float
    violation: bool
    apc_lhs: float
    apc_rhs: float
    apc_holds: bool


def appendix_b_report(D: int, k: int) -> OccupancyReport:
    """Largest two-body eigenvalues before and after an occupancy measurement.

    The occupied branch freezes one pair and leaves k-1 pairs in D-2 modes; the
    frozen pair itself contributes a unit eigenvalue, which only matters for k = 1.
    The empty branch leaves k pairs in D-2 modes. ``violation`` is the strict
    inequality ``lambda_max > p lambda_occ + (1-p) lambda_empty``. ``apc_*``
    compare the normalized averaged top eigenvalue after single-fermion
    removal (lhs) against the initial one (rhs).
    """
    _check_pair_params(D, k)
    if k < 1 or D < 4:
        raise ValueError("needs at least one pair and D >= 4")
    N = 2 * k
    lam = N * (D + 2 - N) / (2 * D)
    occ = max(1.0, (N - 2) * (D + 2 - N) / (2 * (D - 2)))
    emp = N * (D - N) / (2 * (D - 2))
    p = N / D
    avg = p * occ + (1 - p) * emp
    if N > 1:
        apc_lhs = (D + 2 - N) / ((D - 2) * (N - 1))
        apc_rhs = (D + 2 - N) / (D * (N - 1))
    else:
        apc_lhs = apc_rhs = float("nan")
    return OccupancyReport(D, N, lam, occ, emp, p, avg, lam > avg + 1e-12,
                           apc_lhs, apc_rhs, apc_lhs >= apc_rhs)


def _lambda_max(D: int, k: int, M: int) -> float:
    N = 2 * k
    if M > N:
        return 0.0
    if M == 1:
        return 2 * k / D
    if M in (2, 3):
        return pair_condensate_spectrum(D, k, M).max
    if M == 4:
        return lambda_2m_max(D, k, 2)
    raise ValueError(f"lambda_max curves available for M in 1..4, got M={M}")


def figure1_data(D: int, Ms=(1, 2, 3, 4), ks=None) -> list[tuple[int, int, float]]:
    """Rows ``(k, M, lambda_max)`` for k = 1 .. D/2 - 1 (or the given ``ks``)."""
    _check_pair_params(D, 0)
    for M in Ms:
        if M not in (1, 2, 3, 4):
            raise ValueError(f"unsupported M={M}")
    if ks is None:
        ks = range(1, D // 2)
    return [(k, M, _lambda_max(D, k, M)) for M in Ms for k in ks]


def figure1_csv(D: int, Ms=(1, 2, 3, 4)) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "M", "lambda_max"])
    for k, M, v in figure1_data(D, Ms):
        w.writerow([k, M, f"{v:.15g}"])
    return buf.getvalue()
