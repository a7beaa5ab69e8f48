"""
Quantum operations on N-fermion states: one-body unitaries, fermion-removal
measurements, single-mode occupancy measurements, and transfer maps that move
M fermions into an orthogonal register. Each family comes with a checker for
the majorization and entropy relations it is expected to satisfy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .entanglement import (
    BOSONIC,
    MAJORIZATION_TOL,
    VON_NEUMANN,
    EntropyFunctional,
    Verdict,
    as_spectrum,
    entropy,
    majorize_compare,
    pad,
)
from .fock import (
    NSectorDensityOperator,
    PureState,
    annihilate_set,
    apply_operator_string,
    binom,
    modes_of,
    popcount,
    split_sign,
    subset_index,
    subset_masks,
)
from .mbody import MBodyDM, _guard_mixed, gamma_matrix, mbody_dm, sorted_eigvalsh

__all__ = [
    "DROP_PROB",
    "MeasurementOutcome",
    "ChannelCheck",
    "compound_matrix",
    "one_body_unitary",
    "random_unitary",
    "measure_single_fermion",
    "measure_l_body",
    "measure_occupancy",
    "check_channel",
    "TransferMap",
    "BipartiteState",
    "TransferReport",
    "uniform_map",
    "mode_tagged_map",
    "random_transfer_map",
    "apply_transfer_map",
    "apply_kraus_direct",
    "reduced_state_A",
    "reduced_state_B",
    "verify_transfer_majorization",
    "conversion_condition",
    "matrix_mixture_majorization",
]

DROP_PROB = 1e-14

State = Union[PureState, NSectorDensityOperator]


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    label: object
    probability: float
    post_state: object


# ---------------------------------------------------------------------------
# one-body unitaries
# ---------------------------------------------------------------------------

def compound_matrix(U, M: int, block: int = 64) -> np.ndarray:
    """M-th compound of U: entry (beta, alpha) is ``det U[beta, alpha]``.

    This is the matrix by which a one-body rotation acts on M-fermion
    coefficient vectors in canonical subset order.
    """
    U = np.asarray(U, dtype=complex)
    D = U.shape[0]
    if M == 0:
        return np.ones((1, 1), dtype=complex)
    idx = np.array([modes_of(m) for m in subset_masks(D, M)], dtype=int)
    n = len(idx)
    out = np.empty((n, n), dtype=complex)
    for start in range(0, n, block):
        rows = idx[start:start + block]
        sub = U[rows[:, None, :, None], idx[None, :, None, :]]
        out[start:start + block] = np.linalg.det(sub)
    return out


def _check_unitary(U, D: int, tol: float = 1e-10) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (D, D):
        raise ValueError(f"unitary must be {D}x{D}, got {U.shape}")
    if not np.allclose(U.conj().T @ U, np.eye(D), atol=tol):
        raise ValueError("matrix is not unitary")
    return U


def one_body_unitary(state: State, U) -> State:
    """Apply the Fock-space rotation with ``c†_i -> sum_j U[j, i] c†_j``.

    Under this map the M-body matrix transforms as ``C_M(U) rho C_M(U)†``
    with ``C_M`` the M-th compound matrix; the one-body matrix as ``U rho U†``.
    """
    U = _check_unitary(U, state.D)
    W = compound_matrix(U, state.N)
    if isinstance(state, NSectorDensityOperator):
        rho = W @ state.full_matrix() @ W.conj().T
        return NSectorDensityOperator(state.D, state.N, subset_masks(state.D, state.N), rho)
    return PureState.from_vector(state.D, state.N, W @ state.to_vector())


def random_unitary(D: int, seed=None) -> np.ndarray:
    """Haar-random unitary (QR of a complex Gaussian matrix with phase fix)."""
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# ---------------------------------------------------------------------------
# measurements
# ---------------------------------------------------------------------------

def _annihilator(D: int, N: int, beta: int) -> np.ndarray:
    """Matrix of ``C_beta`` from the full N-sector to the full (N-L)-sector."""
    rows = subset_index(D, N - popcount(beta))
    cols = subset_masks(D, N)
    K = np.zeros((len(rows), len(cols)))
    for c, mask in enumerate(cols):
        if mask & beta == beta:
            K[rows[mask ^ beta], c] = split_sign(mask, beta)
    return K


def _sandwich(op: NSectorDensityOperator, K: np.ndarray, N_out: int) -> NSectorDensityOperator:
    rho = K @ op.full_matrix() @ K.conj().T
    return NSectorDensityOperator(op.D, N_out, subset_masks(op.D, N_out), rho)


def _removal_outcomes(state: State, L: int) -> list[MeasurementOutcome]:
    N, D = state.N, state.D
    if not 1 <= L <= N:
        raise ValueError(f"L={L} outside [1, N={N}]")
    norm = binom(N, L)
    out = []
    if isinstance(state, NSectorDensityOperator):
        _guard_mixed(state)
    for beta in subset_masks(D, L):
        modes = modes_of(beta)
        if isinstance(state, NSectorDensityOperator):
            post = _sandwich(state, _annihilator(D, N, beta), N - L)
            weight = post.trace
        else:
            post = annihilate_set(modes, state)
            weight = post.norm() ** 2
        p = weight / norm
        if p < DROP_PROB:
            continue
        post = post.normalized() if isinstance(post, NSectorDensityOperator) else post.normalize()
        label = modes[0] if L == 1 else modes
        out.append(MeasurementOutcome(label, p, post))
    return out


def measure_single_fermion(state: State) -> list[MeasurementOutcome]:
    """Kraus operators ``c_j / sqrt(N)``: outcome j with probability ``<n_j>/N``."""
    if state.N < 1:
        raise ValueError("cannot remove a fermion from the vacuum")
    return _removal_outcomes(state, 1)


def measure_l_body(state: State, L: int) -> list[MeasurementOutcome]:
    """Kraus operators ``C_beta / sqrt(binom(N, L))`` over all L-subsets beta."""
    return _removal_outcomes(state, L)


def measure_occupancy(state: State, j: int) -> list[MeasurementOutcome]:
    """Projective measurement of ``n_j``; labels 1 (occupied) and 0 (empty)."""
    if not 0 <= j < state.D:
        raise ValueError(f"mode {j} out of range [0, {state.D})")
    bit = 1 << j
    out = []
    if isinstance(state, NSectorDensityOperator):
        _guard_mixed(state)
        occ = np.array([1.0 if m & bit else 0.0 for m in subset_masks(state.D, state.N)])
        for label, diag in ((1, occ), (0, 1.0 - occ)):
            post = _sandwich(state, np.diag(diag), state.N)
            if post.trace >= DROP_PROB:
                out.append(MeasurementOutcome(label, post.trace, post.normalized()))
        return out
    for label, keep in ((1, True), (0, False)):
        amps = {m: a for m, a in state.amplitudes.items() if bool(m & bit) == keep}
        post = PureState(state.D, state.N, amps)
        p = post.norm() ** 2
        if p >= DROP_PROB:
            out.append(MeasurementOutcome(label, p, post.normalize()))
    return out


@dataclass
class ChannelCheck:
    """Relations between the initial and post-measurement M-body spectra.

    Spectra are normalized to unit trace. ``holds`` is the majorization of the
    initial spectrum by the probability-averaged post spectra.
    """

    M: int
    removed: int
    probability_sum: float
    mixture_deviation: float | None
    initial: np.ndarray
    averaged: np.ndarray
    verdict: Verdict
    first_violation: int | None
    holds: bool
    entropies: dict = field(default_factory=dict)

    @property
    def entropy_holds(self) -> bool:
        return all(ok for _, _, ok in self.entropies.values())

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "removed": self.removed,
            "probability_sum": self.probability_sum,
            "mixture_deviation": self.mixture_deviation,
            "verdict": self.verdict.value,
            "first_violation": self.first_violation,
            "holds": self.holds,
            "initial_spectrum": self.initial.tolist(),
            "averaged_spectrum": self.averaged.tolist(),
            "entropies": {k: {"initial": a, "average": b, "holds": ok}
                          for k, (a, b, ok) in self.entropies.items()},
        }


def check_channel(state: State, outcomes: Sequence[MeasurementOutcome], M: int,
                  functionals: Sequence[EntropyFunctional] = (VON_NEUMANN, BOSONIC),
                  tol: float = MAJORIZATION_TOL) -> ChannelCheck:
    """Compare initial and averaged post-measurement normalized M-body spectra."""
    N = state.N
    N_post = outcomes[0].post_state.N
    removed = N - N_post
    if not 1 <= M <= N_post:
        raise ValueError(f"M={M} must lie in [1, {N_post}]")
    rho0 = mbody_dm(state, M).matrix / binom(N, M)
    dim = rho0.shape[0]
    avg_matrix = np.zeros_like(rho0)
    averaged = np.zeros(dim)
    post_entropy = {f.name: 0.0 for f in functionals}
    for o in outcomes:
        rho = mbody_dm(o.post_state, M).matrix / binom(N_post, M)
        avg_matrix += o.probability * rho
        spec = as_spectrum(sorted_eigvalsh(rho))
        averaged += o.probability * pad(spec, dim)
        for f in functionals:
            post_entropy[f.name] += o.probability * entropy(spec, f)
    initial = as_spectrum(sorted_eigvalsh(rho0))
    cmp = majorize_compare(initial, averaged, tol)
    holds = cmp.first_violation is None
    # the linear mixture identity only holds for fermion-removal channels
    dev = float(np.max(np.abs(avg_matrix - rho0))) if removed > 0 else None
    ent = {}
    for f in functionals:
        s0 = entropy(initial, f)
        ent[f.name] = (s0, post_entropy[f.name], s0 >= post_entropy[f.name] - 1e-10)
    return ChannelCheck(M, removed, float(sum(o.probability for o in outcomes)), dev,
                        initial, averaged, cmp.verdict, cmp.first_violation, holds, ent)


def matrix_mixture_majorization(mats: Sequence[np.ndarray], tol: float = MAJORIZATION_TOL) -> bool:
    """``lambda(sum A_i)`` is majorized by ``sum lambda(A_i)`` for hermitian A_i."""
    total = sum(mats)
    lhs = sorted_eigvalsh(total)
    rhs = sum(sorted_eigvalsh(a) for a in mats)
    return bool(np.all(np.cumsum(lhs) <= np.cumsum(rhs) + tol)) and abs(lhs.sum() - rhs.sum()) < tol


# ---------------------------------------------------------------------------
# transfer maps to a bipartite register
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TransferMap:
    """Kraus blocks ``T^r`` of shape ``binom(D_A, M) x binom(D, M)``.

    The register A occupies modes ``D .. D + D_A - 1`` of the joint system.
    """

    D: int
    D_A: int
    M: int
    kraus: tuple

    def __post_init__(self):
        if self.D_A < self.M:
            raise ValueError(f"register needs D_A >= M, got D_A={self.D_A}, M={self.M}")
        shape = (binom(self.D_A, self.M), binom(self.D, self.M))
        blocks = []
        for T in self.kraus:
            T = np.array(T, dtype=complex)
            if T.shape != shape:
                raise ValueError(f"Kraus block shape {T.shape} != {shape}")
            T.setflags(write=False)
            blocks.append(T)
        if not blocks:
            raise ValueError("transfer map needs at least one Kraus block")
        object.__setattr__(self, "kraus", tuple(blocks))

    def completeness_deviation(self) -> float:
        s = sum(T.conj().T @ T for T in self.kraus)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))

    def is_complete(self, tol: float = 1e-10) -> bool:
        return self.completeness_deviation() < tol

    def to_dict(self) -> dict:
        return {
            "D": self.D, "D_A": self.D_A, "M": self.M,
            "kraus": [{"re": T.real.tolist(), "im": T.imag.tolist()} for T in self.kraus],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransferMap":
        blocks = [np.asarray(b["re"], float) + 1j * np.asarray(b.get("im", 0.0), float)
                  for b in data["kraus"]]
        return cls(int(data["D"]), int(data["D_A"]), int(data["M"]), tuple(blocks))

    @classmethod
    def from_json(cls, text: str) -> "TransferMap":
        return cls.from_dict(json.loads(text))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def uniform_map(D: int, M: int = 1) -> TransferMap:
    """Single Kraus operator moving each M-subset to its copy in a D-mode register."""
    return TransferMap(D, D, M, (np.eye(binom(D, M)),))


def mode_tagged_map(D: int, M: int = 1) -> TransferMap:
    """One Kraus operator per M-subset, each sending it to the single M-subset of an M-mode register."""
    n = binom(D, M)
    return TransferMap(D, M, M, tuple(np.eye(n)[i:i + 1] for i in range(n)))


def random_transfer_map(D: int, D_A: int, M: int, n_kraus: int = 1, seed=None) -> TransferMap:
    """Kraus blocks cut from a random isometry (orthonormal columns via QR)."""
    rows, cols = binom(D_A, M), binom(D, M)
    if n_kraus * rows < cols:
        raise ValueError("not enough Kraus rows to form an isometry")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n_kraus * rows, cols)) + 1j * rng.normal(size=(n_kraus * rows, cols))
    q, _ = np.linalg.qr(z)
    return TransferMap(D, D_A, M, tuple(q[r * rows:(r + 1) * rows] for r in range(n_kraus)))


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Joint state on D + D_A modes with exactly M fermions in the A register."""

    state: PureState
    D: int
    D_A: int
    M: int

    def __post_init__(self):
        if self.state.D != self.D + self.D_A:
            raise ValueError("joint state has the wrong number of modes")
        for mask in self.state.amplitudes:
            if popcount(mask >> self.D) != self.M:
                raise ValueError(f"mask {mask:#b} does not hold {self.M} fermions in register A")

    def coefficient_matrix(self) -> np.ndarray:
        """``G[mu, beta]``: amplitude with A-subset mu and B-subset beta (up to a global sign)."""
        rows = subset_index(self.D_A, self.M)
        cols = subset_index(self.D, self.state.N - self.M)
        low = (1 << self.D) - 1
        G = np.zeros((len(rows), len(cols)), dtype=complex)
        for mask, amp in self.state.amplitudes.items():
            G[rows[mask >> self.D], cols[mask & low]] = amp
        return G


def _coefficient_to_joint(G: np.ndarray, D: int, D_A: int, M: int, N: int) -> PureState:
    # C†_mu C†_beta |0> with A modes above B modes: moving M operators past N-M
    sign = -1 if (M * (N - M)) % 2 else 1
    a_masks = subset_masks(D_A, M)
    b_masks = subset_masks(D, N - M)
    amps = {}
    for i, j in zip(*np.nonzero(np.abs(G) > 0)):
        amps[b_masks[j] | (a_masks[i] << D)] = sign * G[i, j]
    return PureState(D + D_A, N, amps)


def apply_transfer_map(state: PureState, tmap: TransferMap,
                       tol: float = 1e-10) -> list[MeasurementOutcome]:
    """Outcomes ``r`` with probability ``||T^r G / sqrt(binom(N, M))||_F^2``."""
    if state.D != tmap.D:
        raise ValueError(f"state has D={state.D}, map expects D={tmap.D}")
    if state.N < tmap.M:
        raise ValueError("state holds fewer fermions than the map transfers")
    dev = tmap.completeness_deviation()
    if dev > tol:
        raise ValueError(f"Kraus blocks violate completeness by {dev:.3e}")
    N, M = state.N, tmap.M
    G = gamma_matrix(state, M).matrix / np.sqrt(binom(N, M))
    out = []
    for r, T in enumerate(tmap.kraus):
        Gr = T @ G
        p = float(np.sum(np.abs(Gr) ** 2))
        if p < DROP_PROB:
            continue
        joint = _coefficient_to_joint(Gr / np.sqrt(p), tmap.D, tmap.D_A, M, N)
        out.append(MeasurementOutcome(r, p, BipartiteState(joint, tmap.D, tmap.D_A, M)))
    return out


def apply_kraus_direct(state: PureState, tmap: TransferMap, r: int) -> PureState:
    """Unnormalized ``T^r |Psi>`` by explicit operator strings ``C†_mu C_alpha``."""
    D, M = tmap.D, tmap.M
    joint = state.embed(D + tmap.D_A)
    T = tmap.kraus[r] / np.sqrt(binom(state.N, M))
    total = PureState(D + tmap.D_A, state.N)
    for i, mu in enumerate(subset_masks(tmap.D_A, M)):
        create = [("+", D + m) for m in modes_of(mu)]
        for j, alpha in enumerate(subset_masks(D, M)):
            if T[i, j] == 0:
                continue
            destroy = [("-", a) for a in reversed(modes_of(alpha))]
            total = total + apply_operator_string(create + destroy, joint).scale(T[i, j])
    return total


def reduced_state_A(bip: BipartiteState) -> MBodyDM:
    """Unit-trace reduced state of register A over its M-subsets."""
    G = bip.coefficient_matrix()
    p = float(np.sum(np.abs(G) ** 2))
    if p < DROP_PROB:
        raise ValueError("zero-probability branch")
    return MBodyDM(bip.D_A, bip.state.N, bip.M, G @ G.conj().T / p, normalized=True)


def reduced_state_B(bip: BipartiteState) -> MBodyDM:
    G = bip.coefficient_matrix()
    p = float(np.sum(np.abs(G) ** 2))
    if p < DROP_PROB:
        raise ValueError("zero-probability branch")
    return MBodyDM(bip.D, bip.state.N, bip.state.N - bip.M, G.T @ G.conj() / p, normalized=True)


@dataclass
class TransferReport:
    M: int
    probability_sum: float
    initial: np.ndarray
    averaged: np.ndarray
    verdict: Verdict
    first_violation: int | None
    holds: bool
    saturated: bool
    entropies: dict = field(default_factory=dict)

    @property
    def entropy_holds(self) -> bool:
        return all(ok for _, _, ok in self.entropies.values())

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "probability_sum": self.probability_sum,
            "verdict": self.verdict.value,
            "first_violation": self.first_violation,
            "holds": self.holds,
            "saturated": self.saturated,
            "initial_spectrum": self.initial.tolist(),
            "averaged_spectrum": self.averaged.tolist(),
            "entropies": {k: {"mbody": a, "average_bipartite": b, "holds": ok}
                          for k, (a, b, ok) in self.entropies.items()},
        }


def verify_transfer_majorization(state: PureState, tmap: TransferMap,
                                 functionals: Sequence[EntropyFunctional] = (VON_NEUMANN, BOSONIC),
                                 tol: float = MAJORIZATION_TOL) -> TransferReport:
    """Check that the normalized M-body spectrum is majorized by the averaged register spectra."""
    M = tmap.M
    outcomes = apply_transfer_map(state, tmap)
    initial = as_spectrum(mbody_dm(state, M).spectrum() / binom(state.N, M))
    spectra = [(o.probability, as_spectrum(reduced_state_A(o.post_state).spectrum()))
               for o in outcomes]
    n = max([len(initial)] + [len(s) for _, s in spectra])
    initial = pad(initial, n)
    averaged = sum(p * pad(s, n) for p, s in spectra)
    cmp = majorize_compare(initial, averaged, tol)
    ent = {}
    for f in functionals:
        s0 = entropy(initial, f)
        s1 = sum(p * entropy(s, f) for p, s in spectra)
        ent[f.name] = (s0, s1, s0 >= s1 - 1e-10)
    return TransferReport(M, float(sum(p for p, _ in spectra)), initial, averaged, cmp.verdict,
                          cmp.first_violation, cmp.first_violation is None,
                          bool(np.allclose(initial, averaged, atol=1e-10)), ent)


def conversion_condition(state: PureState, M: int, rho_A, tol: float = MAJORIZATION_TOL) -> bool:
    """Necessary condition for converting ``state`` into a bipartite state with register state ``rho_A``."""
    initial = as_spectrum(mbody_dm(state, M).spectrum() / binom(state.N, M))
    target = as_spectrum(np.linalg.eigvalsh(np.asarray(rho_A)))
    return majorize_compare(initial, target, tol).first_violation is None
