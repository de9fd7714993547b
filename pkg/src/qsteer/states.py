"""Quantum state types and state-level observables.

PureState and DensityOperator validate their physicality invariants at
construction; promotion from vector to operator is always explicit via
``PureState.density()``.
"""

from __future__ import annotations

import numpy as np

from . import linalg as la

NORM_TOL = 1e-10
FIDELITY_SLACK = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class PureState:
    """Unit-norm complex state vector."""

    __slots__ = ("vector",)

    def __init__(self, amplitudes):
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if v.size == 0:
            raise ValueError("state vector is empty")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("state vector contains NaN or Inf entries")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector has norm {norm:.12g}, expected 1")
        v = v.copy()
        v.flags.writeable = False
        self.vector = v

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        """Build from an unnormalised, nonzero vector."""
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return cls(v / norm)

    @classmethod
    def basis(cls, index: int, dim: int) -> "PureState":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return self.vector.size

    def projector(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def density(self) -> "DensityOperator":
        return DensityOperator(self.projector())

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite operator."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = la.as_operator(matrix)
        if la.hermiticity_defect(m) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix has trace {tr:.12g}, expected 1")
        w = np.linalg.eigvalsh(la.hermitian_part(m))
        if w.min() < -NORM_TOL:
            raise ValueError(
                f"density matrix is not positive (min eigenvalue {w.min():.3e})"
            )
        m = m.copy()
        m.flags.writeable = False
        self.matrix = m

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


def _clamp_unit_interval(x: float, what: str) -> float:
    if -FIDELITY_SLACK <= x < 0.0:
        return 0.0
    if 1.0 < x <= 1.0 + FIDELITY_SLACK:
        return 1.0
    if 0.0 <= x <= 1.0:
        return float(x)
    raise ValueError(f"{what} {x:.12g} outside [0, 1] beyond round-off")


def target_fidelity(rho: DensityOperator, target: PureState) -> float:
    """Overlap <T|rho|T> of a state with a pure target, clamped to [0, 1]."""
    if rho.dim != target.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, target {target.dim}")
    t = target.vector
    value = np.vdot(t, rho.matrix @ t).real
    return _clamp_unit_interval(value, "fidelity")


def bloch_vector(rho: DensityOperator) -> tuple[float, float, float]:
    """(tr(rho X), tr(rho Y), tr(rho Z)) for a qubit state."""
    if rho.dim != 2:
        raise ValueError(f"Bloch vector requires a qubit state, got dimension {rho.dim}")
    m = rho.matrix
    return (
        float(np.trace(m @ PAULI_X).real),
        float(np.trace(m @ PAULI_Y).real),
        float(np.trace(m @ PAULI_Z).real),
    )


def concurrence(rho: DensityOperator) -> float:
    """Two-qubit entanglement monotone max(0, mu1 - mu2 - mu3 - mu4).

    The mu_i are the decreasing square roots of the eigenvalues of
    rho (Y x Y) rho* (Y x Y), with rho* conjugated entrywise in the
    computational basis.
    """
    if rho.dim != 4:
        raise ValueError(f"concurrence requires two qubits (dimension 4), got {rho.dim}")
    yy = la.kron(PAULI_Y, PAULI_Y)
    m = rho.matrix @ yy @ rho.matrix.conj() @ yy
    w = np.linalg.eigvals(m)
    mu = np.sort(np.sqrt(np.clip(w.real, 0.0, None)))[::-1]
    return _clamp_unit_interval(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]), "concurrence")
