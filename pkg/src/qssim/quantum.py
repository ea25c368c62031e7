"""Exact pure-state engine for small labeled qubit registers.

Photons are addressed by string labels rather than wire indices, because the
protocol moves them between parties and splices fresh ancillas into the
register mid-round.  Amplitudes are stored as a dense complex vector indexed
by computational basis strings with ``labels[0]`` as the most significant
bit.  All operations return fresh states; nothing mutates in place.

Supported measurements: single-qubit Z and X, two-qubit Bell, and the
four-qubit product-Bell measurement used for two-qubit teleportation
(outcome = Bell result on (a,c) paired with Bell result on (b,d)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-10
MAX_QUBITS = 10

_SQRT2_INV = 1.0 / math.sqrt(2.0)


class LocalOp(Enum):
    """The five single-photon operations agents may apply or announce."""

    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"

    @property
    def matrix(self) -> np.ndarray:
        return _OP_MATRICES[self]

    def __repr__(self) -> str:
        return self.value


_OP_MATRICES = {
    LocalOp.I: np.eye(2, dtype=complex),
    LocalOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    LocalOp.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    LocalOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    LocalOp.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
}

PAULIS = (LocalOp.I, LocalOp.X, LocalOp.Y, LocalOp.Z)

# An ordered sequence of LocalOp; application order = sequence order.
OpWord = tuple[LocalOp, ...]


class BellKind(Enum):
    PhiPlus = "PhiPlus"
    PhiMinus = "PhiMinus"
    PsiPlus = "PsiPlus"
    PsiMinus = "PsiMinus"

    @property
    def vector(self) -> np.ndarray:
        """Amplitudes over |00>,|01>,|10>,|11>."""
        return _BELL_VECTORS[self]

    def __repr__(self) -> str:
        return self.value


_BELL_VECTORS = {
    BellKind.PhiPlus: np.array([1, 0, 0, 1], dtype=complex) * _SQRT2_INV,
    BellKind.PhiMinus: np.array([1, 0, 0, -1], dtype=complex) * _SQRT2_INV,
    BellKind.PsiPlus: np.array([0, 1, 1, 0], dtype=complex) * _SQRT2_INV,
    BellKind.PsiMinus: np.array([0, 1, -1, 0], dtype=complex) * _SQRT2_INV,
}

BELL_ORDER = (BellKind.PhiPlus, BellKind.PhiMinus, BellKind.PsiPlus, BellKind.PsiMinus)


class GOutcome(NamedTuple):
    """Outcome of the four-qubit measurement: Bell on (a,c), Bell on (b,d)."""

    first: BellKind
    second: BellKind


G_ORDER = tuple(GOutcome(f, s) for f in BELL_ORDER for s in BELL_ORDER)

_Z_VECTORS = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))
_X_VECTORS = (
    np.array([1, 1], dtype=complex) * _SQRT2_INV,
    np.array([1, -1], dtype=complex) * _SQRT2_INV,
)


class MeasBasis(Enum):
    Z = "Z"
    X = "X"
    Bell = "Bell"
    G = "G"


_BASIS_ARITY = {MeasBasis.Z: 1, MeasBasis.X: 1, MeasBasis.Bell: 2, MeasBasis.G: 4}


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitudes over the labeled register.

    ``labels[0]`` is the most significant bit of the amplitude index, so a
    two-qubit state over (a, b) lists amplitudes in the order
    |00>, |01>, |10>, |11> with the first bit belonging to ``a``.
    """

    labels: tuple[str, ...]
    amps: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"register size {n} outside 1..{MAX_QUBITS}")
        if len(set(self.labels)) != n:
            raise ValueError(f"duplicate labels in {self.labels}")
        if self.amps.shape != (2**n,):
            raise ValueError(
                f"amplitude count {self.amps.shape} does not match {n} labels"
            )
        norm = math.sqrt(float(np.vdot(self.amps, self.amps).real))
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state norm {norm} too far from 1")

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"label {label!r} not in register {self.labels}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape([2] * self.n_qubits)


def prepare_bell(kind: BellKind, a: str, b: str) -> PureState:
    """Fresh two-qubit Bell state over labels (a, b)."""
    if a == b:
        raise ValueError(f"duplicate labels ({a!r}, {b!r})")
    return PureState((a, b), kind.vector.copy())


def prepare_basis(label: str, bit: int = 0) -> PureState:
    """Single qubit in a computational basis state."""
    return PureState((label,), _Z_VECTORS[bit].copy())


def tensor(s1: PureState, s2: PureState) -> PureState:
    """Joint state of two disjoint registers; s1's labels stay most significant."""
    overlap = set(s1.labels) & set(s2.labels)
    if overlap:
        raise ValueError(f"label collision: {sorted(overlap)}")
    return PureState(s1.labels + s2.labels, np.kron(s1.amps, s2.amps))


def apply(state: PureState, op: LocalOp, q: str) -> PureState:
    """Apply a single-photon operation to qubit q."""
    return _apply_matrix(state, op.matrix, q)


def apply_word(state: PureState, word: Iterable[LocalOp], q: str) -> PureState:
    """Apply ops to qubit q in sequence order (first element acts first)."""
    ops = list(word)
    if not ops:
        state.axis(q)  # still validate the label
        return state
    mat = ops[0].matrix
    for op in ops[1:]:
        mat = op.matrix @ mat
    return _apply_matrix(state, mat, q)


def word_matrix(word: Iterable[LocalOp]) -> np.ndarray:
    """2x2 matrix of an op word (identity for the empty word)."""
    mat = np.eye(2, dtype=complex)
    for op in word:
        mat = op.matrix @ mat
    return mat


def _apply_matrix(state: PureState, mat: np.ndarray, q: str) -> PureState:
    ax = state.axis(q)
    a = state.amps.reshape(1 << ax, 2, -1)
    a0, a1 = a[:, 0, :], a[:, 1, :]
    out = np.empty_like(a)
    out[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    out[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1
    return PureState(state.labels, out.reshape(-1))


def _outcomes(basis: MeasBasis) -> Sequence:
    if basis is MeasBasis.Bell:
        return BELL_ORDER
    if basis is MeasBasis.G:
        return G_ORDER
    return (0, 1)


def _build_outcome_tensor(basis: MeasBasis, outcome) -> np.ndarray:
    """Eigenvector of an outcome reshaped to one axis per measured qubit."""
    if basis is MeasBasis.Z:
        return _Z_VECTORS[outcome]
    if basis is MeasBasis.X:
        return _X_VECTORS[outcome]
    if basis is MeasBasis.Bell:
        return outcome.vector.reshape(2, 2)
    vec = np.kron(outcome.first.vector, outcome.second.vector)
    # kron ordering is (a, c, b, d); measured qubits arrive as (a, b, c, d)
    return np.ascontiguousarray(vec.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3))


_OUTCOME_TENSORS: dict[MeasBasis, dict] = {
    basis: {o: _build_outcome_tensor(basis, o) for o in _outcomes(basis)}
    for basis in MeasBasis
}


def _outcome_tensor(basis: MeasBasis, outcome) -> tuple[np.ndarray, int]:
    proj = _OUTCOME_TENSORS[basis][outcome]
    return proj, proj.ndim


def _check_qs(state: PureState, basis: MeasBasis, qs: Sequence[str]) -> list[int]:
    if len(qs) != _BASIS_ARITY[basis]:
        raise ValueError(
            f"{basis.value} basis takes {_BASIS_ARITY[basis]} qubit(s), got {len(qs)}"
        )
    if len(set(qs)) != len(qs):
        raise ValueError(f"duplicate labels in {qs}")
    return [state.axis(q) for q in qs]


def _residual(state: PureState, axes: list[int], proj: np.ndarray) -> np.ndarray:
    """Contract the measured axes with conj(outcome eigenvector).

    Returns a flat vector over the remaining qubits, which keep their
    original relative order.
    """
    n = state.n_qubits
    k = proj.ndim
    order = axes + [i for i in range(n) if i not in axes]
    t = np.transpose(state.tensor_view(), order)
    return proj.conj().ravel() @ np.ascontiguousarray(t).reshape(1 << k, -1)


def distribution(state: PureState, basis: MeasBasis, qs: Sequence[str]) -> dict:
    """Exact outcome probabilities; the state is not changed."""
    axes = _check_qs(state, basis, qs)
    probs = {}
    for outcome in _outcomes(basis):
        proj, _ = _outcome_tensor(basis, outcome)
        r = _residual(state, axes, proj)
        probs[outcome] = float(np.vdot(r, r).real)
    return probs


def project(state: PureState, basis: MeasBasis, qs: Sequence[str], outcome) -> tuple[float, PureState]:
    """Probability of an outcome and the normalized post-measurement state.

    The measured qubits stay in the register, collapsed to the outcome
    eigenstate; the probability is 0.0 (with state unchanged) for an
    unreachable outcome.
    """
    axes = _check_qs(state, basis, qs)
    proj, k = _outcome_tensor(basis, outcome)
    r = _residual(state, axes, proj)
    p = float(np.vdot(r, r).real)
    if p <= 1e-14:
        return 0.0, state
    return p, _rebuild(state, axes, proj, r / math.sqrt(p))


def _rebuild(state: PureState, axes: list[int], proj: np.ndarray, r: np.ndarray) -> PureState:
    """Outcome eigenstate on the measured axes, normalized residual on the rest."""
    post = np.multiply.outer(proj, r).reshape([2] * state.n_qubits)
    post = np.moveaxis(post, range(proj.ndim), axes)
    return PureState(state.labels, post.ravel())


def _sample_outcome(state: PureState, basis: MeasBasis, axes: list[int], u: float):
    """Pick (outcome, residual, prob) by scanning outcomes in canonical order."""
    acc = 0.0
    picked = None
    for outcome in _outcomes(basis):
        proj = _OUTCOME_TENSORS[basis][outcome]
        r = _residual(state, axes, proj)
        p = float(np.vdot(r, r).real)
        acc += p
        if p > 1e-14:
            picked = (outcome, r, p)  # rounding slack falls to the last reachable one
        if u < acc and p > 1e-14:
            return outcome, r, p
    if picked is None:
        raise ValueError("no outcome has positive probability; state corrupt")
    return picked


def measure(state: PureState, basis: MeasBasis, qs: Sequence[str], u: float) -> tuple[object, PureState]:
    """Sample an outcome with the uniform draw u in [0,1) and collapse.

    Outcomes are scanned in a fixed canonical order, so identical draws give
    identical results.  The measured qubits stay in the register, left in
    the outcome eigenstate.
    """
    axes = _check_qs(state, basis, qs)
    outcome, r, p = _sample_outcome(state, basis, axes, u)
    proj = _OUTCOME_TENSORS[basis][outcome]
    return outcome, _rebuild(state, axes, proj, r / math.sqrt(p))


def measure_remove(state: PureState, basis: MeasBasis, qs: Sequence[str], u: float) -> tuple[object, PureState]:
    """Like measure(), but drops the collapsed qubits from the register.

    Valid because a Bell/G/Z/X projection leaves the measured qubits in a
    known product eigenstate, unentangled from the rest.  The register must
    keep at least one qubit.
    """
    if len(qs) >= state.n_qubits:
        raise ValueError("cannot remove every qubit from the register")
    axes = _check_qs(state, basis, qs)
    outcome, r, p = _sample_outcome(state, basis, axes, u)
    keep = tuple(l for i, l in enumerate(state.labels) if i not in axes)
    return outcome, PureState(keep, r.ravel() / math.sqrt(p))


def discard(state: PureState, qs: Sequence[str], expected: PureState) -> PureState:
    """Remove qubits known to be in a product state `expected`.

    Raises if the register does not actually factor that way (contraction
    would lose norm).
    """
    axes = [state.axis(q) for q in qs]
    if tuple(qs) != expected.labels:
        raise ValueError("expected-state labels must match qs order")
    proj = expected.tensor_view()
    r = np.tensordot(proj.conj(), state.tensor_view(), axes=(range(proj.ndim), axes))
    p = float(np.vdot(r, r).real)
    if abs(p - 1.0) > 1e-9:
        raise ValueError(f"qubits {qs} are not in the expected product state (p={p})")
    keep = tuple(l for i, l in enumerate(state.labels) if i not in axes)
    return PureState(keep, np.ascontiguousarray(r).reshape(-1) / math.sqrt(p))


def fidelity_up_to_phase(s1: PureState, s2: PureState) -> float:
    """|<s1|s2>| after aligning s2's label order to s1's."""
    if set(s1.labels) != set(s2.labels):
        raise ValueError(f"label mismatch: {s1.labels} vs {s2.labels}")
    t2 = s2.tensor_view()
    order = [s2.labels.index(l) for l in s1.labels]
    aligned = np.transpose(t2, order).reshape(-1)
    return float(abs(np.vdot(s1.amps, aligned)))
