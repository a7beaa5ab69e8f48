"""
Occupation-number basis arithmetic for a fermionic Fock space with D modes.

Conventions
-----------
- A basis state is an integer bit mask; bit ``i`` set means mode ``i`` is occupied.
- The stored amplitude of a mask belongs to the ascending creation string
  ``c†_{i1} c†_{i2} ... c†_{iN} |0>`` with ``i1 < i2 < ... < iN``.
- M-element subsets of ``{0, ..., D-1}`` are ordered lexicographically as sorted
  tuples. This order labels rows and columns of every matrix in the package.
- ``C_alpha`` denotes ``(c†_{i1} ... c†_{iM})† = c_{iM} ... c_{i1}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_MODES = 63
PRUNE_EPS = 1e-14
MAX_DIM = 50_000

__all__ = [
    "MAX_MODES",
    "PRUNE_EPS",
    "binom",
    "popcount",
    "mask_from_modes",
    "modes_of",
    "subset_rank",
    "subset_unrank",
    "subset_masks",
    "subset_index",
    "apply_create",
    "apply_annihilate",
    "split_sign",
    "PureState",
    "NSectorDensityOperator",
    "inner_product",
    "apply_operator_string",
    "apply_operator_sum",
    "annihilate_set",
    "create_set",
]


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient; zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    value = comb(n, k)
    if value >= 1 << 63:
        raise OverflowError(f"binom({n}, {k}) does not fit in 64 bits")
    return value


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def _check_D(D: int) -> None:
    if not 1 <= D <= MAX_MODES:
        raise ValueError(f"mode count D={D} outside [1, {MAX_MODES}]")


def _check_mask(mask: int, D: int) -> None:
    if mask < 0 or mask >> D:
        raise ValueError(f"mask {mask:#b} has bits outside {D} modes")


def mask_from_modes(modes: Iterable[int], D: int | None = None) -> int:
    mask = 0
    for i in modes:
        if i < 0 or (D is not None and i >= D):
            raise ValueError(f"mode {i} out of range")
        if mask >> i & 1:
            raise ValueError(f"mode {i} listed twice")
        mask |= 1 << i
    return mask


def modes_of(mask: int) -> tuple[int, ...]:
    """Occupied modes of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# subset ranking
# ---------------------------------------------------------------------------

def subset_rank(subset: Sequence[int], D: int, M: int | None = None) -> int:
    """Lexicographic rank of a strictly increasing tuple among all M-subsets of range(D)."""
    subset = tuple(int(i) for i in subset)
    if M is None:
        M = len(subset)
    if len(subset) != M:
        raise ValueError(f"subset {subset} does not have {M} elements")
    prev = -1
    rank = 0
    for pos, i in enumerate(subset):
        if not 0 <= i < D:
            raise ValueError(f"entry {i} out of range [0, {D})")
        if i <= prev:
            raise ValueError(f"subset {subset} is not strictly increasing")
        # skip all subsets that place a smaller value at this position
        for j in range(prev + 1, i):
            rank += comb(D - 1 - j, M - 1 - pos)
        prev = i
    return rank


def subset_unrank(index: int, D: int, M: int) -> tuple[int, ...]:
    """Inverse of :func:`subset_rank`."""
    total = binom(D, M)
    if not 0 <= index < total:
        raise ValueError(f"index {index} out of range [0, {total})")
    out = []
    j = 0
    for pos in range(M):
        while True:
            block = comb(D - 1 - j, M - 1 - pos)
            if index < block:
                break
            index -= block
            j += 1
        out.append(j)
        j += 1
    return tuple(out)


@lru_cache(maxsize=None)
def subset_masks(D: int, M: int) -> tuple[int, ...]:
    """Masks of all M-subsets of range(D) in canonical (lexicographic) order."""
    _check_D(D)
    if binom(D, M) > MAX_DIM:
        raise MemoryError(f"binom({D}, {M}) = {binom(D, M)} exceeds the {MAX_DIM} row guard")
    return tuple(sum(1 << i for i in c) for c in combinations(range(D), M))


@lru_cache(maxsize=None)
def subset_index(D: int, M: int) -> dict[int, int]:
    """Map mask -> canonical index for M-subsets of range(D)."""
    return {m: k for k, m in enumerate(subset_masks(D, M))}


# ---------------------------------------------------------------------------
# single-mode action and signs
# ---------------------------------------------------------------------------

def _parity_below(mask: int, i: int) -> int:
    return -1 if popcount(mask & ((1 << i) - 1)) & 1 else 1


def apply_create(i: int, mask: int, D: int = MAX_MODES) -> tuple[int, int] | None:
    """``c†_i`` on a basis mask; returns ``(new_mask, sign)`` or None (Pauli blocked)."""
    if not 0 <= i < D:
        raise ValueError(f"mode {i} out of range [0, {D})")
    if mask >> i & 1:
        return None
    return mask | (1 << i), _parity_below(mask, i)


def apply_annihilate(i: int, mask: int, D: int = MAX_MODES) -> tuple[int, int] | None:
    """``c_i`` on a basis mask; returns ``(new_mask, sign)`` or None if mode i is empty."""
    if not 0 <= i < D:
        raise ValueError(f"mode {i} out of range [0, {D})")
    if not mask >> i & 1:
        return None
    return mask & ~(1 << i), _parity_below(mask, i)


def split_sign(union: int, alpha: int) -> int:
    """Parity of reordering the sorted ``union`` into (sorted alpha, sorted beta).

    ``beta = union \\ alpha``. Equals ``(-1)**K`` with K the number of pairs
    ``(a, b)``, ``a`` in alpha, ``b`` in beta, ``b < a``.
    """
    if alpha & ~union:
        raise ValueError("alpha is not a subset of union")
    beta = union & ~alpha
    k = 0
    for a in modes_of(alpha):
        k += popcount(beta & ((1 << a) - 1))
    return -1 if k & 1 else 1


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PureState:
    """Sparse N-fermion state: mask -> complex amplitude."""

    D: int
    N: int
    amplitudes: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        _check_D(self.D)
        if not 0 <= self.N <= self.D:
            raise ValueError(f"fermion number N={self.N} outside [0, {self.D}]")
        clean = {}
        for mask, amp in self.amplitudes.items():
            mask = int(mask)
            _check_mask(mask, self.D)
            if popcount(mask) != self.N:
                raise ValueError(f"mask {mask:#b} does not hold {self.N} fermions")
            amp = complex(amp)
            if abs(amp) >= PRUNE_EPS:
                clean[mask] = amp
        object.__setattr__(self, "amplitudes", clean)

    # construction ---------------------------------------------------------
    @classmethod
    def from_vector(cls, D: int, N: int, vec) -> "PureState":
        """Build from a dense vector over the canonical N-subset order."""
        masks = subset_masks(D, N)
        vec = np.asarray(vec, dtype=complex).ravel()
        if vec.size != len(masks):
            raise ValueError(f"vector length {vec.size} != binom({D}, {N})")
        return cls(D, N, {m: a for m, a in zip(masks, vec) if abs(a) >= PRUNE_EPS})

    @classmethod
    def vacuum(cls, D: int) -> "PureState":
        return cls(D, 0, {0: 1.0})

    def to_vector(self) -> np.ndarray:
        index = subset_index(self.D, self.N)
        vec = np.zeros(len(index), dtype=complex)
        for mask, amp in self.amplitudes.items():
            vec[index[mask]] = amp
        return vec

    # algebra --------------------------------------------------------------
    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    def normalize(self) -> "PureState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return self.scale(1.0 / n)

    def scale(self, factor: complex) -> "PureState":
        return PureState(self.D, self.N, {m: factor * a for m, a in self.amplitudes.items()})

    def __add__(self, other: "PureState") -> "PureState":
        _check_same_sector(self, other)
        out = dict(self.amplitudes)
        for m, a in other.amplitudes.items():
            out[m] = out.get(m, 0) + a
        return PureState(self.D, self.N, out)

    def __sub__(self, other: "PureState") -> "PureState":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.amplitudes

    def embed(self, D_new: int) -> "PureState":
        """Same state viewed in a larger mode space (extra modes empty)."""
        if D_new < self.D:
            raise ValueError("cannot embed into fewer modes")
        return PureState(D_new, self.N, self.amplitudes)

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "N": self.N,
            "amplitudes": [
                {"mask": m, "re": float(a.real), "im": float(a.imag)}
                for m, a in sorted(self.amplitudes.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PureState":
        amps = {int(e["mask"]): complex(e["re"], e.get("im", 0.0)) for e in data["amplitudes"]}
        return cls(int(data["D"]), int(data["N"]), amps)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        return cls.from_dict(json.loads(text))


def _check_same_sector(a: PureState, b: PureState) -> None:
    if (a.D, a.N) != (b.D, b.N):
        raise ValueError(f"sector mismatch: (D={a.D}, N={a.N}) vs (D={b.D}, N={b.N})")


def inner_product(bra: PureState, ket: PureState) -> complex:
    """<bra|ket>, conjugate-linear in ``bra``."""
    _check_same_sector(bra, ket)
    if len(bra.amplitudes) > len(ket.amplitudes):
        return sum(a * bra.amplitudes[m].conjugate()
                   for m, a in ket.amplitudes.items() if m in bra.amplitudes) + 0j
    return sum(a.conjugate() * ket.amplitudes[m]
               for m, a in bra.amplitudes.items() if m in ket.amplitudes) + 0j


def apply_operator_string(ops: Sequence[tuple[str, int]], state: PureState) -> PureState:
    """Apply a product of creation/annihilation operators.

    ``ops`` is written as the operator product reads, e.g. ``[("+", 1), ("-", 0)]``
    is ``c†_1 c_0``; the rightmost factor acts first. The result is not normalized
    and may be the zero state.
    """
    D = state.D
    n_change = sum(1 if kind == "+" else -1 for kind, _ in ops)
    N_out = state.N + n_change
    if not 0 <= N_out <= D:
        raise ValueError(f"operator string maps N={state.N} to invalid sector N={N_out}")
    out: dict[int, complex] = {}
    for mask, amp in state.amplitudes.items():
        sign = 1
        for kind, i in reversed(ops):
            if kind == "+":
                res = apply_create(i, mask, D)
            elif kind == "-":
                res = apply_annihilate(i, mask, D)
            else:
                raise ValueError(f"unknown operator kind {kind!r}")
            if res is None:
                break
            mask, s = res
            sign *= s
        else:
            out[mask] = out.get(mask, 0) + sign * amp
    return PureState(D, N_out, out)


def apply_operator_sum(terms: Sequence[tuple[complex, Sequence[tuple[str, int]]]],
                       state: PureState) -> PureState:
    """Apply ``sum_k coef_k * string_k``; all strings must change N by the same amount."""
    result = None
    for coef, ops in terms:
        part = apply_operator_string(ops, state).scale(coef)
        result = part if result is None else result + part
    if result is None:
        raise ValueError("empty operator sum")
    return result


def create_set(modes: Sequence[int], state: PureState) -> PureState:
    """``C†_alpha = c†_{i1} ... c†_{iM}`` for increasing modes."""
    return apply_operator_string([("+", i) for i in sorted(modes)], state)


def annihilate_set(modes: Sequence[int], state: PureState) -> PureState:
    """``C_alpha = c_{iM} ... c_{i1}``, the adjoint of :func:`create_set`."""
    return apply_operator_string([("-", i) for i in sorted(modes, reverse=True)], state)


# ---------------------------------------------------------------------------
# mixed states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NSectorDensityOperator:
    """Density operator on the N-fermion sector, expressed over ``basis`` masks.

    The trace is not forced to one: contraction maps produce unnormalized
    operators. Use :meth:`normalized` where a state is needed.
    """

    D: int
    N: int
    basis: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        _check_D(self.D)
        basis = tuple(int(m) for m in self.basis)
        for m in basis:
            _check_mask(m, self.D)
            if popcount(m) != self.N:
                raise ValueError(f"basis mask {m:#b} does not hold {self.N} fermions")
        if len(set(basis)) != len(basis):
            raise ValueError("repeated basis mask")
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (len(basis), len(basis)):
            raise ValueError(f"matrix shape {mat.shape} does not match basis size {len(basis)}")
        scale = max(1.0, float(np.abs(mat).max(initial=0.0)))
        if not np.allclose(mat, mat.conj().T, atol=1e-10 * scale):
            raise ValueError("density operator is not hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pure(cls, state: PureState) -> "NSectorDensityOperator":
        vec = state.to_vector()
        return cls(state.D, state.N, subset_masks(state.D, state.N), np.outer(vec, vec.conj()))

    @classmethod
    def mixture(cls, states: Sequence[PureState], weights: Sequence[float]) -> "NSectorDensityOperator":
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
            raise ValueError("mixture weights must be nonnegative and sum to 1")
        ops = [cls.from_pure(s.normalize()) for s in states]
        first = ops[0]
        mat = sum(w * op.matrix for w, op in zip(weights, ops))
        return cls(first.D, first.N, first.basis, mat)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "NSectorDensityOperator":
        t = self.trace
        if t <= 0:
            raise ValueError("cannot normalize a zero-trace operator")
        return NSectorDensityOperator(self.D, self.N, self.basis, self.matrix / t)

    def eigvalsh(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.matrix))[::-1]

    def full_matrix(self) -> np.ndarray:
        """Matrix re-expressed over the full canonical N-sector basis."""
        index = subset_index(self.D, self.N)
        pos = np.array([index[m] for m in self.basis], dtype=int)
        out = np.zeros((len(index), len(index)), dtype=complex)
        out[np.ix_(pos, pos)] = self.matrix
        return out

    def is_valid_state(self, tol: float = 1e-10) -> bool:
        ev = np.linalg.eigvalsh(self.matrix)
        return abs(self.trace - 1.0) < tol and ev.min(initial=0.0) > -tol
