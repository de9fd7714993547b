"""Random-unitary noise models and alternating control/noise trajectories.

Noise acts between control interactions as a random rotation
exp(-i theta sigma_axis) with theta drawn from N(0, sigma²). Dephasing keeps
the axis fixed to z; depolarising picks the axis uniformly from {x, y, z}.
Reproducibility comes from SeededStream: a (master seed, stream index) pair
names one platform-independent sample sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .channels import KrausChannel, Trajectory, TrajectoryRecord, apply
from .states import PAULI_X, PAULI_Y, PAULI_Z, DensityOperator, PureState, target_fidelity

KINDS = ("dephasing", "depolarising")

_AXES = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; known: {', '.join(KINDS)}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"sigma must be finite and nonnegative, got {self.sigma}")


@dataclass(frozen=True)
class SeededStream:
    """Deterministic random stream addressed by (master_seed, stream_index)."""

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.default_rng(seq)


def _as_generator(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, SeededStream):
        return stream.generator()
    raise TypeError(f"expected SeededStream or numpy Generator, got {type(stream)!r}")


def sample_noise_unitary(model: NoiseModel, stream) -> np.ndarray:
    """One random qubit rotation; pass a Generator to draw a sequence."""
    rng = _as_generator(stream)
    if model.kind == "dephasing":
        axis = PAULI_Z
    else:
        axis = _AXES[rng.integers(0, 3)]
    theta = rng.normal(0.0, model.sigma)
    return np.cos(theta) * np.eye(2, dtype=complex) - 1j * np.sin(theta) * axis


def noisy_trajectory(
    channel: KrausChannel,
    model: NoiseModel,
    rho0: DensityOperator,
    target: PureState,
    steps: int,
    stream: SeededStream,
) -> Trajectory:
    """Alternate channel and sampled noise; fidelities are recorded after noise."""
    if channel.dim != 2:
        raise ValueError("noise models are defined on single qubits (dimension 2)")
    if rho0.dim != 2 or target.dim != 2:
        raise ValueError("state and target must be qubits")
    if steps < 0:
        raise ValueError("step count must be nonnegative")
    rng = _as_generator(stream)
    rho = rho0
    records = [TrajectoryRecord(step=0, fidelity=target_fidelity(rho, target))]
    for step in range(1, steps + 1):
        rho = apply(channel, rho)
        r = sample_noise_unitary(model, rng)
        rho = DensityOperator(la.hermitian_part(r @ rho.matrix @ r.conj().T))
        records.append(TrajectoryRecord(step=step, fidelity=target_fidelity(rho, target)))
    return Trajectory(records=tuple(records))


def mean_fidelity(traj: Trajectory) -> float:
    """Arithmetic mean of the fidelities after step 0."""
    values = [r.fidelity for r in traj.records[1:]]
    if not values:
        raise ValueError("trajectory has no records beyond the initial state")
    return float(np.mean(values))
