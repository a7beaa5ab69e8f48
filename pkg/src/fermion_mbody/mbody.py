"""
(M, N-M) coefficient matrices, M-body density matrices and their Schmidt form.

For an N-fermion state the coefficient matrix has entries

    G[alpha, beta] = <0| C_beta C_alpha |Psi>,

rows over M-subsets and columns over (N-M)-subsets, both in canonical order.
The M-body density matrix is ``rho[alpha, alpha'] = <C†_alpha' C_alpha> = (G G†)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .fock import (
    NSectorDensityOperator,
    PureState,
    binom,
    create_set,
    modes_of,
    split_sign,
    subset_index,
    subset_masks,
)

__all__ = [
    "GammaMatrix",
    "MBodyDM",
    "SchmidtDecomposition",
    "gamma_matrix",
    "rho_m",
    "rho_m_mixed",
    "mbody_dm",
    "schmidt_decompose",
    "partner_spectrum_check",
    "mbody_density_operator",
    "contract",
    "collective_average",
    "sorted_eigvalsh",
]

MIXED_MAX_MODES = 10


def sorted_eigvalsh(matrix) -> np.ndarray:
    """Eigenvalues of a hermitian matrix, nonincreasing."""
    return np.sort(np.linalg.eigvalsh(matrix))[::-1]


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    D: int
    N: int
    M: int
    matrix: np.ndarray

    @property
    def row_masks(self):
        return subset_masks(self.D, self.M)

    @property
    def col_masks(self):
        return subset_masks(self.D, self.N - self.M)


@dataclass(frozen=True, eq=False)
class MBodyDM:
    """M-body density matrix; trace binom(N, M), or 1 when ``normalized``."""

    D: int
    N: int
    M: int
    matrix: np.ndarray
    normalized: bool = False

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def spectrum(self) -> np.ndarray:
        return sorted_eigvalsh(self.matrix)

    def normalize(self) -> "MBodyDM":
        if self.normalized:
            return self
        return MBodyDM(self.D, self.N, self.M, self.matrix / binom(self.N, self.M), True)

    def eigh(self):
        """Eigenpairs sorted by nonincreasing eigenvalue."""
        w, v = np.linalg.eigh(self.matrix)
        order = np.argsort(w)[::-1]
        return w[order], v[:, order]


def _check_M(N: int, M: int) -> None:
    if not 0 <= M <= N:
        raise ValueError(f"M={M} outside [0, N={N}]")


def gamma_matrix(state: PureState, M: int) -> GammaMatrix:
    """Coefficient matrix of the (M, N-M) representation of ``state``."""
    D, N = state.D, state.N
    _check_M(N, M)
    rows = subset_index(D, M)
    cols = subset_index(D, N - M)
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    for mask, amp in state.amplitudes.items():
        for alpha in combinations(modes_of(mask), M):
            a = sum(1 << i for i in alpha)
            out[rows[a], cols[mask ^ a]] += split_sign(mask, a) * amp
    return GammaMatrix(D, N, M, out)


def rho_m(state: PureState, M: int) -> MBodyDM:
    """M-body density matrix of a pure state, built as G G†."""
    g = gamma_matrix(state, M).matrix
    return MBodyDM(state.D, state.N, M, g @ g.conj().T)


def _removal_groups(op: NSectorDensityOperator, L: int):
    """Index every (basis state, removed L-subset) pair two ways.

    ``by_rest[leftover]`` and ``by_removed[subset]`` hold tuples
    ``(other_mask, basis_position, sign)`` where sign is that of
    ``C_subset |mask> = sign |leftover>``.
    """
    by_rest = defaultdict(list)
    by_removed = defaultdict(list)
    for pos, mask in enumerate(op.basis):
        for sub in combinations(modes_of(mask), L):
            b = sum(1 << i for i in sub)
            s = split_sign(mask, b)
            by_rest[mask ^ b].append((b, pos, s))
            by_removed[b].append((mask ^ b, pos, s))
    return by_rest, by_removed


def _guard_mixed(op: NSectorDensityOperator) -> None:
    if op.D > MIXED_MAX_MODES:
        raise ValueError(f"mixed-state paths support D <= {MIXED_MAX_MODES}, got D={op.D}")


def rho_m_mixed(op: NSectorDensityOperator, M: int) -> MBodyDM:
    """M-body density matrix ``Tr[rho C†_alpha' C_alpha]`` of a sector density operator."""
    _guard_mixed(op)
    _check_M(op.N, M)
    rows = subset_index(op.D, M)
    out = np.zeros((len(rows), len(rows)), dtype=complex)
    # C_alpha |a> = s |a \ alpha>, so entries pair basis states sharing the leftover
    by_rest, _ = _removal_groups(op, M)
    rho = op.matrix
    for entries in by_rest.values():
        alpha = np.array([rows[b] for b, _, _ in entries])
        pos = np.array([p for _, p, _ in entries])
        sgn = np.array([s for _, _, s in entries], dtype=float)
        out[np.ix_(alpha, alpha)] += np.outer(sgn, sgn) * rho[np.ix_(pos, pos)]
    return MBodyDM(op.D, op.N, M, out)


def mbody_dm(state, M: int) -> MBodyDM:
    """Dispatch to :func:`rho_m` or :func:`rho_m_mixed`."""
    if isinstance(state, NSectorDensityOperator):
        return rho_m_mixed(state, M)
    return rho_m(state, M)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """SVD of the coefficient matrix, ``G = U diag(sqrt(spectrum)) V†``.

    Column ``nu`` of ``U`` holds the coefficients of the natural M-fermion
    creator over M-subsets; column ``nu`` of ``V.conj()`` those of its
    (N-M)-fermion partner.
    """

    D: int
    N: int
    M: int
    spectrum: np.ndarray
    U: np.ndarray
    V: np.ndarray
    rank: int
    gamma: np.ndarray

    def singular_values(self) -> np.ndarray:
        return np.sqrt(self.spectrum)

    def reconstruct_gamma(self) -> np.ndarray:
        r, c = self.U.shape[0], self.V.shape[0]
        d = np.zeros((r, c))
        k = len(self.spectrum)
        d[:k, :k] = np.diag(np.sqrt(self.spectrum))
        return self.U @ d @ self.V.conj().T

    def cross_terms(self) -> np.ndarray:
        """Matrix of ``<0| B_nu' A_nu |Psi>``; diagonal ``sqrt(lambda)`` in exact arithmetic."""
        return self.U.conj().T @ self.gamma @ self.V

    def partner_state(self, nu: int) -> PureState:
        """``B†_nu |0>`` as an (N-M)-fermion state."""
        return PureState.from_vector(self.D, self.N - self.M, self.V[:, nu].conj())

    def natural_state(self, nu: int) -> PureState:
        """``A†_nu |0>`` as an M-fermion state."""
        return PureState.from_vector(self.D, self.M, self.U[:, nu])

    def reconstruct(self) -> PureState:
        """Rebuild the state from the Schmidt form by operator application.

        Computes ``binom(N, M)^-1 sum_nu sqrt(lambda_nu) A†_nu B†_nu |0>``.
        """
        masks = subset_masks(self.D, self.M)
        total = None
        for nu in range(self.rank):
            b_state = self.partner_state(nu)
            weight = np.sqrt(self.spectrum[nu])
            for a_idx, a_mask in enumerate(masks):
                coef = self.U[a_idx, nu]
                if abs(coef) < 1e-15:
                    continue
                part = create_set(modes_of(a_mask), b_state).scale(weight * coef)
                total = part if total is None else total + part
        if total is None:
            return PureState(self.D, self.N)
        return total.scale(1.0 / binom(self.N, self.M))


def schmidt_decompose(state: PureState, M: int, tol: float = 1e-12) -> SchmidtDecomposition:
    """Schmidt-like (M, N-M) decomposition; requires ``1 <= M <= N-1``."""
    if not 1 <= M <= state.N - 1:
        raise ValueError(f"Schmidt form needs 1 <= M <= N-1, got M={M}, N={state.N}")
    g = gamma_matrix(state, M).matrix
    u, s, vh = np.linalg.svd(g, full_matrices=True)
    spectrum = s ** 2
    rank = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
    return SchmidtDecomposition(state.D, state.N, M, spectrum, u, vh.conj().T, rank, g)


def partner_spectrum_check(state: PureState, M: int, tol: float = 1e-10):
    """Compare the nonzero spectra of the M- and (N-M)-body matrices.

    Returns ``(agree, max_deviation)``. Both spectra come from independent
    eigensolves; the longer one must vanish beyond the shorter one's length.
    """
    _check_M(state.N, M)
    a = rho_m(state, M).spectrum()
    b = rho_m(state, state.N - M).spectrum()
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    dev = float(np.max(np.abs(a - b), initial=0.0))
    return dev < tol, dev


def mbody_density_operator(dm: MBodyDM, normalized: bool = False) -> NSectorDensityOperator:
    """M-fermion density operator ``sum rho[a, a'] C†_a |0><0| C_a'``."""
    mat = dm.matrix
    if normalized and not dm.normalized:
        mat = mat / binom(dm.N, dm.M)
    elif dm.normalized and not normalized:
        mat = mat * binom(dm.N, dm.M)
    return NSectorDensityOperator(dm.D, dm.M, subset_masks(dm.D, dm.M), mat)


def contract(op: NSectorDensityOperator, L: int) -> NSectorDensityOperator:
    """``sum_beta C_beta rho C†_beta`` over all L-subsets beta (unnormalized).

    The result lives on the full (N-L)-fermion sector in canonical order and
    has trace ``binom(N, L) * Tr rho``.
    """
    _guard_mixed(op)
    if not 0 <= L <= op.N:
        raise ValueError(f"L={L} outside [0, N={op.N}]")
    out_index = subset_index(op.D, op.N - L)
    out = np.zeros((len(out_index), len(out_index)), dtype=complex)
    _, by_removed = _removal_groups(op, L)
    rho = op.matrix
    for entries in by_removed.values():
        rest = np.array([out_index[r] for r, _, _ in entries])
        pos = np.array([p for _, p, _ in entries])
        sgn = np.array([s for _, _, s in entries], dtype=float)
        out[np.ix_(rest, rest)] += np.outer(sgn, sgn) * rho[np.ix_(pos, pos)]
    return NSectorDensityOperator(op.D, op.N - L, subset_masks(op.D, op.N - L), out)


def collective_average(state: PureState, gamma, M: int, tol: float = 1e-10) -> float:
    """``<Psi| A† A |Psi>`` for ``A† = sum_alpha gamma_alpha C†_alpha`` (normalized gamma)."""
    gamma = np.asarray(gamma, dtype=complex).ravel()
    if gamma.size != binom(state.D, M):
        raise ValueError(f"coefficient vector needs binom({state.D}, {M}) entries")
    if abs(np.vdot(gamma, gamma).real - 1.0) > tol:
        raise ValueError("collective operator coefficients are not normalized")
    rho = rho_m(state, M).matrix
    # <C†_a C_a'> = rho[a', a], hence <A† A> = gamma† rho gamma
    return float(np.real(np.vdot(gamma, rho @ gamma)))
