"""Kraus-channel engine: application, construction from a joint unitary,
convergence verification, iteration, and channel comparison.

A channel drives states toward a pure target when (a) every Kraus operator
holds the target fixed up to a scalar, and (b) the adjoint images of the
target span the whole space. ``verify_channel`` measures both conditions and
reports the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .states import DensityOperator, PureState, bloch_vector, concurrence, target_fidelity

DEFAULT_TOL = 1e-9


class KrausChannel:
    """Trace-preserving map given by Kraus operators on one fixed dimension.

    Completeness (sum of M†M equal to the identity within ``tol``) is checked
    at construction; operators are frozen afterwards and the value is safe to
    share across threads.
    """

    __slots__ = ("dim", "operators", "tol")

    def __init__(self, operators, tol: float = DEFAULT_TOL):
        ops = [la.as_operator(m) for m in operators]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(m.shape != (dim, dim) for m in ops):
            raise ValueError("Kraus operators must all share one square dimension")
        defect = _completeness_defect(ops)
        if defect > tol:
            raise ValueError(
                f"Kraus operators violate completeness (defect {defect:.3e} > tol {tol:.1e})"
            )
        frozen = []
        for m in ops:
            m = m.copy()
            m.flags.writeable = False
            frozen.append(m)
        self.dim = dim
        self.operators = tuple(frozen)
        self.tol = float(tol)

    def __len__(self) -> int:
        return len(self.operators)

    def __repr__(self) -> str:
        return f"KrausChannel(dim={self.dim}, n_operators={len(self.operators)})"


def _completeness_defect(ops) -> float:
    dim = ops[0].shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    for m in ops:
        acc += m.conj().T @ m
    return la.operator_norm(acc - np.eye(dim))


@dataclass(frozen=True)
class ChannelReport:
    """Verification result for one (channel, target) pair."""

    completeness_defect: float
    fixed_point_defect: float
    eigenvalues_z: tuple[complex, ...]
    z_norm_defect: float
    span_rank: int
    gamma_estimate: float
    converging: bool


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    fidelity: float
    bloch: tuple[float, float, float] | None = None
    concurrence: float | None = None
    state: DensityOperator | None = None


@dataclass(frozen=True)
class Trajectory:
    """Per-step snapshots of an iterated channel, starting at step 0."""

    records: tuple[TrajectoryRecord, ...]

    def __post_init__(self):
        steps = [r.step for r in self.records]
        if steps != list(range(len(steps))):
            raise ValueError("trajectory steps must increase strictly from 0")

    def __len__(self) -> int:
        return len(self.records)

    def fidelities(self) -> np.ndarray:
        return np.array([r.fidelity for r in self.records])

    def final(self) -> TrajectoryRecord:
        return self.records[-1]


def apply(channel: KrausChannel, rho: DensityOperator) -> DensityOperator:
    """One application of the channel; output is re-Hermitised."""
    if rho.dim != channel.dim:
        raise ValueError(f"dimension mismatch: channel {channel.dim}, state {rho.dim}")
    out = np.zeros((channel.dim, channel.dim), dtype=complex)
    m = rho.matrix
    for k in channel.operators:
        out += k @ m @ k.conj().T
    return DensityOperator(la.hermitian_part(out))


def kraus_from_unitary(
    u,
    controller_state: PureState,
    controller_basis: list[PureState] | None = None,
    tol: float = DEFAULT_TOL,
) -> KrausChannel:
    """Reduce a system-controller unitary to the system's Kraus operators.

    ``u`` acts on system (x) controller with the system as the leftmost
    Kronecker factor; operator i is the controller-basis-i block of
    u applied to the controller prepared in ``controller_state``.
    """
    u = la.as_operator(u)
    n = controller_state.dim
    total = u.shape[0]
    if total % n != 0:
        raise ValueError(
            f"unitary dimension {total} not divisible by controller dimension {n}"
        )
    d = total // n
    if la.unitarity_defect(u) > tol:
        raise ValueError("matrix on the joint space is not unitary")
    if controller_basis is None:
        basis = np.eye(n, dtype=complex)
    else:
        if len(controller_basis) != n:
            raise ValueError(
                f"controller basis has {len(controller_basis)} vectors, expected {n}"
            )
        basis = np.array([b.vector for b in controller_basis])
        if la.operator_norm(basis @ basis.conj().T - np.eye(n)) > tol:
            raise ValueError("controller basis is not orthonormal")
    blocks = u.reshape(d, n, d, n)
    psi0 = controller_state.vector
    ops = [np.einsum("c,acbe,e->ab", row.conj(), blocks, psi0) for row in basis]
    return KrausChannel(ops, tol=tol)


def _z_and_defect(channel: KrausChannel, target: PureState):
    t = target.vector
    zs = []
    defect = 0.0
    for m in channel.operators:
        mt = m @ t
        z = complex(np.vdot(t, mt))
        zs.append(z)
        defect = max(defect, float(np.linalg.norm(mt - z * t)))
    return zs, defect


def verify_channel(channel: KrausChannel, target: PureState) -> ChannelReport:
    """Measure the convergence conditions for ``target``; never raises on defects."""
    if target.dim != channel.dim:
        raise ValueError(f"dimension mismatch: channel {channel.dim}, target {target.dim}")
    completeness = _completeness_defect(list(channel.operators))
    zs, fp_defect = _z_and_defect(channel, target)
    z_norm_defect = abs(sum(abs(z) ** 2 for z in zs) - 1.0)
    adjoint_images = [m.conj().T @ target.vector for m in channel.operators]
    span_rank = la.numerical_rank(adjoint_images)
    converging = (
        completeness <= channel.tol
        and fp_defect <= channel.tol
        and span_rank == channel.dim
    )
    return ChannelReport(
        completeness_defect=completeness,
        fixed_point_defect=fp_defect,
        eigenvalues_z=tuple(zs),
        z_norm_defect=z_norm_defect,
        span_rank=span_rank,
        gamma_estimate=estimate_gain(channel, target),
        converging=converging,
    )


def estimate_gain(channel: KrausChannel, target: PureState) -> float:
    """Per-step fractional fidelity gain measured on the maximally mixed state."""
    rho = DensityOperator.maximally_mixed(channel.dim)
    f0 = target_fidelity(rho, target)
    f1 = target_fidelity(apply(channel, rho), target)
    return float((f1 - f0) / (1.0 - f0))


def delta_fidelity(
    channel: KrausChannel, rho: DensityOperator, target: PureState
) -> tuple[float, float]:
    """Fidelity gain of one application, computed two independent ways.

    Returns (direct, sum_of_norms): the direct difference of fidelities, and
    the sum over operators of ||sqrt(rho)(I - |T><T|) M† |T>||². The identity
    of the two requires the fixed-point condition, which is checked first.
    """
    if rho.dim != channel.dim or target.dim != channel.dim:
        raise ValueError("dimension mismatch between channel, state and target")
    _, fp_defect = _z_and_defect(channel, target)
    if fp_defect > channel.tol:
        raise ValueError(
            f"channel does not hold the target fixed (defect {fp_defect:.3e}); "
            "the norm-sum identity does not apply"
        )
    t = target.vector
    direct = target_fidelity(apply(channel, rho), target) - target_fidelity(rho, target)
    sqrt_rho = la.psd_sqrt(rho.matrix)
    complement = np.eye(channel.dim) - np.outer(t, t.conj())
    total = 0.0
    for m in channel.operators:
        vec = sqrt_rho @ (complement @ (m.conj().T @ t))
        total += float(np.vdot(vec, vec).real)
    return float(direct), total


def zero_gain_state(channel: KrausChannel, target: PureState) -> PureState | None:
    """A unit vector orthogonal to every adjoint image of the target.

    Exists exactly when the span condition fails; such a state gains no
    fidelity from the channel. Returns None when the span is full.
    """
    vs = np.array([m.conj().T @ target.vector for m in channel.operators]).T
    u, s, _ = np.linalg.svd(vs)
    rank = int(np.sum(s > la.RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    if rank >= channel.dim:
        return None
    return PureState(u[:, -1])


def iterate(
    channel: KrausChannel,
    rho0: DensityOperator,
    target: PureState,
    steps: int,
    with_bloch: bool | None = None,
    with_concurrence: bool | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Apply the channel ``steps`` times, recording per-step observables.

    Record 0 is the initial state. Bloch components are recorded for
    dimension 2 and the concurrence for dimension 4 unless overridden;
    full states are stored only on request.
    """
    if steps < 0:
        raise ValueError("step count must be nonnegative")
    record_bloch = channel.dim == 2 if with_bloch is None else with_bloch
    record_conc = channel.dim == 4 if with_concurrence is None else with_concurrence

    def snapshot(step: int, rho: DensityOperator) -> TrajectoryRecord:
        return TrajectoryRecord(
            step=step,
            fidelity=target_fidelity(rho, target),
            bloch=bloch_vector(rho) if record_bloch else None,
            concurrence=concurrence(rho) if record_conc else None,
            state=rho if keep_states else None,
        )

    rho = rho0
    records = [snapshot(0, rho)]
    for step in range(1, steps + 1):
        rho = apply(channel, rho)
        records.append(snapshot(step, rho))
    return Trajectory(records=tuple(records))


def choi_matrix(channel: KrausChannel) -> np.ndarray:
    """Channel image of the unnormalised maximally entangled state.

    Entry block (j, k) holds the channel applied to |j><k|; two channels are
    the same map exactly when these matrices coincide.
    """
    d = channel.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for m in channel.operators:
        v = m.T.reshape(-1)  # v[j*d + a] = m[a, j]
        out += np.outer(v, v.conj())
    return out


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return la.operator_norm(choi_matrix(a) - choi_matrix(b))


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = 1e-10) -> bool:
    """True when the two Kraus sets represent the same map within ``tol``."""
    return choi_distance(a, b) <= tol


def conjugate_channel(channel: KrausChannel, u, tol: float | None = None) -> KrausChannel:
    """Channel with every Kraus operator conjugated by the unitary ``u``.

    Steers toward u|T> whenever the original steers toward |T>.
    """
    u = la.as_operator(u)
    if u.shape[0] != channel.dim:
        raise ValueError(f"dimension mismatch: channel {channel.dim}, unitary {u.shape[0]}")
    if la.unitarity_defect(u) > channel.tol:
        raise ValueError("conjugating matrix is not unitary")
    ud = u.conj().T
    return KrausChannel(
        [u @ m @ ud for m in channel.operators],
        tol=channel.tol if tol is None else tol,
    )
