"""Constructors for the state families used throughout the package."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import sqrt

import numpy as np

from .fock import PureState, apply_create, binom, mask_from_modes, subset_masks

__all__ = [
    "StateFamilySpec",
    "make_slater",
    "make_pair_condensate",
    "make_ghz",
    "make_odd_pair_condensate",
    "make_two_fermion",
    "make_random",
    "pair_creation_terms",
    "adjoint_terms",
    "build_state",
    "FAMILIES",
]


def make_slater(D: int, occupied) -> PureState:
    """Single Slater determinant ``c†_{i1} ... c†_{iN} |0>`` with unit amplitude."""
    occupied = list(occupied)
    mask = mask_from_modes(occupied, D)
    return PureState(D, len(occupied), {mask: 1.0})


def _check_pairs(D: int, k: int) -> None:
    if D % 2:
        raise ValueError(f"pair states need an even mode count, got D={D}")
    if not 0 <= k <= D // 2:
        raise ValueError(f"pair count k={k} outside [0, {D // 2}]")


def make_pair_condensate(D: int, k: int) -> PureState:
    """Uniform superposition of all ways to fill k of the D/2 pairs (2i, 2i+1)."""
    _check_pairs(D, k)
    amp = 1.0 / sqrt(binom(D // 2, k))
    amps = {}
    for pairs in combinations(range(D // 2), k):
        amps[sum(3 << (2 * i) for i in pairs)] = amp
    return PureState(D, 2 * k, amps)


def pair_creation_terms(D: int):
    """Operator sum for the normalized collective pair creator ``A†``.

    Usable with :func:`fermion_mbody.fock.apply_operator_sum`; the adjoint
    ``A`` is obtained by :func:`adjoint_terms`.
    """
    if D % 2:
        raise ValueError("pair operator needs even D")
    c = 1.0 / sqrt(D / 2)
    return [(c, [("+", 2 * i), ("+", 2 * i + 1)]) for i in range(D // 2)]


def adjoint_terms(terms):
    flip = {"+": "-", "-": "+"}
    return [(np.conj(c), [(flip[k], i) for k, i in reversed(ops)]) for c, ops in terms]


def make_ghz(D: int) -> PureState:
    """(c†_0 ... c†_{D/2-1} + c†_{D/2} ... c†_{D-1}) |0> / sqrt 2."""
    if D % 2:
        raise ValueError(f"GHZ-like state needs even D, got D={D}")
    half = D // 2
    low = (1 << half) - 1
    amp = 1.0 / sqrt(2.0)
    return PureState(D, half, {low: amp, low << half: amp})


def make_odd_pair_condensate(D: int, k: int) -> PureState:
    """``c†_D`` applied to the pair condensate embedded in D + 1 modes."""
    even = make_pair_condensate(D, k)
    amps = {}
    for mask, amp in even.amplitudes.items():
        new_mask, sign = apply_create(D, mask, D + 1)
        amps[new_mask] = sign * amp
    return PureState(D + 1, 2 * k + 1, amps)


def make_two_fermion(D: int, gamma, tol: float = 1e-10) -> PureState:
    """Two-fermion state with amplitudes ``gamma[i, j]`` (i < j) of an antisymmetric matrix."""
    g = np.asarray(gamma, dtype=complex)
    if g.shape != (D, D):
        raise ValueError(f"coefficient matrix must be {D}x{D}")
    if not np.allclose(g, -g.T, atol=tol):
        raise ValueError("coefficient matrix is not antisymmetric")
    norm2 = 0.5 * float(np.sum(np.abs(g) ** 2))
    if norm2 <= tol:
        raise ValueError("coefficient matrix has zero norm")
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"coefficients not normalized: (1/2) sum |G_ij|^2 = {norm2}")
    amps = {(1 << i) | (1 << j): g[i, j] for i in range(D) for j in range(i + 1, D)}
    return PureState(D, 2, amps)


def make_random(D: int, N: int, seed=None) -> PureState:
    """Normalized complex-Gaussian state over the whole (D, N) sector."""
    if not 0 <= N <= D:
        raise ValueError(f"N={N} outside [0, {D}]")
    rng = np.random.default_rng(seed)
    n = len(subset_masks(D, N))
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState.from_vector(D, N, vec / np.linalg.norm(vec))


@dataclass
class StateFamilySpec:
    """Named family plus its parameters, as used by the command line."""

    family: str
    D: int
    occupied: list[int] = field(default_factory=list)
    k: int = 0
    N: int = 0
    gamma: list | None = None
    seed: int | None = None


FAMILIES = ("slater", "pair-condensate", "ghz", "odd-pair-condensate", "two-fermion", "random")


def build_state(spec: StateFamilySpec) -> PureState:
    if spec.family == "slater":
        return make_slater(spec.D, spec.occupied)
    if spec.family == "pair-condensate":
        return make_pair_condensate(spec.D, spec.k)
    if spec.family == "ghz":
        return make_ghz(spec.D)
    if spec.family == "odd-pair-condensate":
        return make_odd_pair_condensate(spec.D, spec.k)
    if spec.family == "two-fermion":
        if spec.gamma is None:
            raise ValueError("two-fermion family needs a coefficient matrix")
        return make_two_fermion(spec.D, np.asarray(spec.gamma, dtype=complex))
    if spec.family == "random":
        return make_random(spec.D, spec.N, spec.seed)
    raise ValueError(f"unknown state family {spec.family!r}; choose from {FAMILIES}")
