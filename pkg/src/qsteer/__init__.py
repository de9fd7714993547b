"""Simulation and verification of control channels that steer quantum states
toward a pure target through repeated identical interactions."""

from .channels import (
    ChannelReport,
    KrausChannel,
    Trajectory,
    TrajectoryRecord,
    apply,
    channels_equal,
    choi_distance,
    choi_matrix,
    conjugate_channel,
    delta_fidelity,
    estimate_gain,
    iterate,
    kraus_from_unitary,
    verify_channel,
    zero_gain_state,
)
from .constructors import (
    ControlSetup,
    Povm,
    REGISTRY_NAMES,
    SpanConditionError,
    bell_channel,
    build_method1,
    build_method2,
    build_named_channel,
    example1_kraus,
    example1_setup,
    pairwise_channel,
    pairwise_swap_unitary,
    rotation_onto,
    swap_operator,
    weak_swap_channel,
)
from .noise import NoiseModel, SeededStream, mean_fidelity, noisy_trajectory, sample_noise_unitary
from .states import DensityOperator, PureState, bloch_vector, concurrence, target_fidelity

__all__ = [
    "ChannelReport",
    "ControlSetup",
    "DensityOperator",
    "KrausChannel",
    "NoiseModel",
    "Povm",
    "PureState",
    "REGISTRY_NAMES",
    "SeededStream",
    "SpanConditionError",
    "Trajectory",
    "TrajectoryRecord",
    "apply",
    "bell_channel",
    "bloch_vector",
    "build_method1",
    "build_method2",
    "build_named_channel",
    "channels_equal",
    "choi_distance",
    "choi_matrix",
    "concurrence",
    "conjugate_channel",
    "delta_fidelity",
    "estimate_gain",
    "example1_kraus",
    "example1_setup",
    "iterate",
    "kraus_from_unitary",
    "mean_fidelity",
    "noisy_trajectory",
    "pairwise_channel",
    "pairwise_swap_unitary",
    "rotation_onto",
    "sample_noise_unitary",
    "swap_operator",
    "target_fidelity",
    "verify_channel",
    "weak_swap_channel",
    "zero_gain_state",
]
