"""Dense state-vector primitives for few-qubit systems.

States are plain complex amplitude vectors over the computational basis in
big-endian order: qubit 0 is the leftmost character of a ket label and the
most significant bit of the basis index ("0110" -> index 6).  Mixed states
are represented as weighted ensembles of pure states; nothing here builds a
density matrix.

All containers are immutable after construction (arrays are write-protected),
so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .defaults import ALGEBRA_TOL

__all__ = [
    "PureState",
    "StateEnsemble",
    "basis_state",
    "bits_to_index",
    "index_to_bits",
    "is_unitary",
    "apply_local",
    "apply_local_ensemble",
    "outcome_probabilities",
    "ensemble_probabilities",
    "inner",
    "basis_rotation",
]


def bits_to_index(bits: str) -> int:
    """Basis index for a ket label like "0110" (qubit 0 = leftmost = MSB)."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, n: int) -> str:
    if not 0 <= index < 2**n:
        raise ValueError(f"index {index} out of range for {n} qubits")
    return format(index, f"0{n}b")


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over the computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        n = amps.size.bit_length() - 1
        if amps.ndim != 1 or amps.size < 2 or amps.size != 2**n:
            raise ValueError("amplitude vector length must be 2**n with n >= 1")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > ALGEBRA_TOL * 100:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1


def basis_state(n: int, label: int | str) -> PureState:
    """Computational basis ket, by index or by bitstring label."""
    index = bits_to_index(label) if isinstance(label, str) else int(label)
    if not 0 <= index < 2**n:
        raise ValueError(f"basis label {label!r} out of range for {n} qubits")
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return PureState(amps)


@dataclass(frozen=True)
class StateEnsemble:
    """Probability-weighted mixture of pure states on a common register."""

    weights: np.ndarray
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        states = tuple(self.states)
        if w.ndim != 1 or w.size != len(states) or w.size == 0:
            raise ValueError("weights and states must be non-empty and match in length")
        if np.any(w < -ALGEBRA_TOL):
            raise ValueError("ensemble weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > ALGEBRA_TOL * 100:
            raise ValueError(f"ensemble weights must sum to 1, got {w.sum()!r}")
        n = states[0].n
        if any(s.n != n for s in states):
            raise ValueError("all ensemble members must have the same qubit count")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.states[0].n

    @classmethod
    def pure(cls, state: PureState) -> "StateEnsemble":
        return cls(np.array([1.0]), (state,))


def is_unitary(m: np.ndarray, tol: float = ALGEBRA_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(2))) <= tol * 100)


def _check_ops(ops: Sequence[np.ndarray], n: int, tol: float) -> list[np.ndarray]:
    if len(ops) != n:
        raise ValueError(f"need one operator per qubit ({n}), got {len(ops)}")
    checked = []
    for q, op in enumerate(ops):
        op = np.asarray(op, dtype=complex)
        if op.shape != (2, 2) or not is_unitary(op, tol):
            raise ValueError(f"operator for qubit {q} is not a 2x2 unitary")
        checked.append(op)
    return checked


def apply_local(state: PureState, ops: Sequence[np.ndarray], tol: float = ALGEBRA_TOL) -> PureState:
    """Apply one single-qubit unitary per qubit (qubit q gets ops[q])."""
    n = state.n
    ops = _check_ops(ops, n, tol)
    psi = state.amplitudes.reshape([2] * n)
    for q, op in enumerate(ops):
        psi = np.moveaxis(np.tensordot(op, psi, axes=([1], [q])), 0, q)
    return PureState(psi.reshape(-1))


def apply_local_ensemble(ens: StateEnsemble, ops: Sequence[np.ndarray], tol: float = ALGEBRA_TOL) -> StateEnsemble:
    """Apply the same per-qubit unitaries to every ensemble member."""
    return StateEnsemble(ens.weights, tuple(apply_local(s, ops, tol) for s in ens.states))


def outcome_probabilities(state: PureState) -> np.ndarray:
    """Computational-basis probabilities p_i = |a_i|^2."""
    return np.abs(state.amplitudes) ** 2


def ensemble_probabilities(ens: StateEnsemble) -> np.ndarray:
    """Weighted computational-basis probabilities of an ensemble."""
    probs = np.stack([outcome_probabilities(s) for s in ens.states])
    return ens.weights @ probs


def inner(a: PureState, b: PureState) -> complex:
    """Hermitian inner product <a|b>."""
    if a.n != b.n:
        raise ValueError("states live on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


_SQ2 = np.sqrt(2.0)
# Rows are the +1/-1 eigenbras of the named Pauli, so each matrix maps the
# eigenbasis onto |0>/|1> (outcome bit 0 <-> eigenvalue +1).
_BASIS_ROTATIONS = {
    "Z": np.eye(2, dtype=complex),
    "X": np.array([[1, 1], [1, -1]], dtype=complex) / _SQ2,
    "Y": np.array([[1, -1j], [1, 1j]], dtype=complex) / _SQ2,
}
for _m in _BASIS_ROTATIONS.values():
    _m.setflags(write=False)


def basis_rotation(axis: str) -> np.ndarray:
    """Rotation mapping the given Pauli eigenbasis to the computational one."""
    try:
        return _BASIS_ROTATIONS[axis]
    except KeyError:
        raise ValueError(f"unknown measurement axis {axis!r} (expected Z, X, or Y)") from None
