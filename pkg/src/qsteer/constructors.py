"""Builders for channels that provably steer states to a chosen target.

Two general constructions start from a POVM: method 1 rotates every effect
image of the target back onto the target and needs those images to span the
space; method 2 covers commuting POVMs whose images fail to span, by
extending the target with nonzero weights on the unsupported eigenvectors.

Alongside the general methods, this module builds the concrete families used
throughout the test and experiment suites: a one-parameter qubit channel and
its two-spin unitary realisation, partial-swap channels in any dimension, a
pairwise-interaction approximation for two qubit pairs, and an entangling
channel with a Bell-state target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .channels import DEFAULT_TOL, KrausChannel, kraus_from_unitary
from .states import PAULI_X, PAULI_Y, PAULI_Z, PureState

ZERO_EFFECT_TOL = 1e-10

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": PAULI_X,
    "y": PAULI_Y,
    "z": PAULI_Z,
}


def pauli_string(spec: str) -> np.ndarray:
    """Kronecker product of single-qubit Paulis, e.g. ``"xyiz"``."""
    out = np.array([[1.0 + 0j]])
    for ch in spec.lower():
        if ch not in _PAULI:
            raise ValueError(f"unknown Pauli letter {ch!r} in {spec!r}")
        out = np.kron(out, _PAULI[ch])
    return out


class SpanConditionError(ValueError):
    """The effect images of the target do not span the space."""


class Povm:
    """Positive effects summing to the identity."""

    __slots__ = ("effects", "dim")

    def __init__(self, effects, tol: float = 1e-10):
        ops = [la.as_operator(e) for e in effects]
        if not ops:
            raise ValueError("a POVM needs at least one effect")
        dim = ops[0].shape[0]
        if any(e.shape != (dim, dim) for e in ops):
            raise ValueError("effects must all share one square dimension")
        total = np.zeros((dim, dim), dtype=complex)
        for k, e in enumerate(ops):
            if la.hermiticity_defect(e) > tol:
                raise ValueError(f"effect {k} is not Hermitian")
            w = np.linalg.eigvalsh(la.hermitian_part(e))
            if w.min() < -tol:
                raise ValueError(
                    f"effect {k} is not positive (min eigenvalue {w.min():.3e})"
                )
            total += e
        if la.operator_norm(total - np.eye(dim)) > tol:
            raise ValueError("effects do not sum to the identity")
        frozen = []
        for e in ops:
            e = e.copy()
            e.flags.writeable = False
            frozen.append(e)
        self.effects = tuple(frozen)
        self.dim = dim

    def __len__(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class ControlSetup:
    """A joint unitary with controller preparation, readout basis and target."""

    unitary: np.ndarray
    controller_state: PureState
    controller_basis: tuple[PureState, ...]
    target: PureState

    def __post_init__(self):
        if la.unitarity_defect(self.unitary) > 1e-10:
            raise ValueError("setup matrix is not unitary")
        basis = np.array([b.vector for b in self.controller_basis])
        if la.operator_norm(basis @ basis.conj().T - np.eye(len(basis))) > 1e-10:
            raise ValueError("controller basis is not orthonormal")

    def channel(self, tol: float = DEFAULT_TOL) -> KrausChannel:
        return kraus_from_unitary(
            self.unitary, self.controller_state, list(self.controller_basis), tol=tol
        )


def rotation_onto(u: PureState, v: PureState) -> np.ndarray:
    """Unitary mapping u to v exactly, identity on the complement of span{u, v}."""
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    uu, vv = u.vector, v.vector
    alpha = np.vdot(uu, vv)
    resid = vv - alpha * uu
    beta = np.linalg.norm(resid)
    eye = np.eye(u.dim, dtype=complex)
    if beta <= 1e-12:
        phase = alpha / abs(alpha)
        return eye + (phase - 1.0) * np.outer(uu, uu.conj())
    w = resid / beta
    # {u, w} and {v, v_perp} are orthonormal pairs spanning the same plane;
    # this sign choice reduces to the plain transposition for orthogonal u, v
    v_perp = beta * uu - np.conj(alpha) * w
    return (
        eye
        - np.outer(uu, uu.conj())
        - np.outer(w, w.conj())
        + np.outer(vv, uu.conj())
        + np.outer(v_perp, w.conj())
    )


def method1_operators(povm: Povm, target: PureState) -> list[np.ndarray]:
    """Kraus operators W_i sqrt(E_i) with each nonzero sqrt(E_i)|T> rotated onto |T>.

    No span check is performed: with a spanning POVM the result is a
    converging channel, otherwise it is a valid channel that merely holds the
    target fixed.
    """
    if povm.dim != target.dim:
        raise ValueError(f"dimension mismatch: POVM {povm.dim}, target {target.dim}")
    t = target.vector
    ops = []
    for e in povm.effects:
        root = la.psd_sqrt(e)
        if np.linalg.norm(e @ t) <= ZERO_EFFECT_TOL:
            ops.append(root)
            continue
        image = PureState.normalized(root @ t)
        ops.append(rotation_onto(image, target) @ root)
    return ops


def build_method1(povm: Povm, target: PureState, tol: float = DEFAULT_TOL) -> KrausChannel:
    """Converging channel from a POVM whose effect images of the target span."""
    rank = la.numerical_rank([e @ target.vector for e in povm.effects])
    if rank < povm.dim:
        raise SpanConditionError(
            f"effect images of the target span only {rank} of {povm.dim} dimensions; "
            "for commuting effects, build_method2 with a target extension applies"
        )
    return KrausChannel(method1_operators(povm, target), tol=tol)


def _common_eigenbasis(effects, tol: float) -> np.ndarray:
    """Columns forming a shared eigenbasis of pairwise-commuting Hermitian effects."""
    d = effects[0].shape[0]
    v = np.eye(d, dtype=complex)
    groups = [list(range(d))]
    for e in effects:
        refined = []
        for g in groups:
            if len(g) == 1:
                refined.append(g)
                continue
            sub = v[:, g]
            w, vecs = np.linalg.eigh(la.hermitian_part(sub.conj().T @ e @ sub))
            v[:, g] = sub @ vecs
            start = 0
            for i in range(1, len(g) + 1):
                if i == len(g) or w[i] - w[start] > 1e-8:
                    refined.append([g[j] for j in range(start, i)])
                    start = i
        groups = refined
    for k, e in enumerate(effects):
        diag = v.conj().T @ e @ v
        off = diag - np.diag(np.diag(diag))
        if la.operator_norm(off) > max(tol, 1e-10):
            raise ValueError(f"effect {k} is not diagonal in any common eigenbasis")
    return v


def build_method2(
    povm: Povm,
    target: PureState,
    extension_coeffs,
    tol: float = DEFAULT_TOL,
) -> KrausChannel:
    """Converging channel from a commuting POVM via a target extension.

    The target must be supported on m < d common eigenvectors with exactly m
    effects acting nontrivially on it; the remaining operators are aligned
    through the extended state built from ``extension_coeffs`` (one nonzero
    coefficient per unsupported eigenvector, in eigenbasis order).
    """
    if povm.dim != target.dim:
        raise ValueError(f"dimension mismatch: POVM {povm.dim}, target {target.dim}")
    d = povm.dim
    effects = povm.effects
    for i in range(len(effects)):
        for j in range(i + 1, len(effects)):
            comm = effects[i] @ effects[j] - effects[j] @ effects[i]
            if la.operator_norm(comm) > 1e-10:
                raise ValueError(f"effects {i} and {j} do not commute")
    basis = _common_eigenbasis(list(effects), tol)
    weights = np.array(
        [[np.vdot(basis[:, k], e @ basis[:, k]).real for k in range(d)] for e in effects]
    )
    det = np.linalg.det(weights)
    if abs(det) <= 1e-10:
        raise ValueError(
            "effect weight matrix is singular; the POVM does not resolve the eigenbasis"
        )

    coords = basis.conj().T @ target.vector
    supported = np.abs(coords) > ZERO_EFFECT_TOL
    m = int(np.sum(supported))
    coeffs = [complex(c) for c in extension_coeffs]
    if m == d:
        if coeffs:
            raise ValueError("target has full support; no extension coefficients apply")
        return build_method1(povm, target, tol=tol)

    nonzero_effects = sum(
        np.linalg.norm(e @ target.vector) > ZERO_EFFECT_TOL for e in effects
    )
    if nonzero_effects != m:
        raise ValueError(
            f"target is supported on {m} eigenvectors but {nonzero_effects} effects "
            "act nontrivially on it; the construction needs these counts to match"
        )
    if len(coeffs) != d - m:
        raise ValueError(
            f"need {d - m} extension coefficients for the unsupported eigenvectors, "
            f"got {len(coeffs)}"
        )
    if any(abs(c) <= 1e-12 for c in coeffs):
        raise ValueError("extension coefficients must all be nonzero")

    extension = target.vector.astype(complex).copy()
    for c, k in zip(coeffs, np.flatnonzero(~supported)):
        extension += c * basis[:, k]
    extended = PureState.normalized(extension)

    t = target.vector
    ops = []
    for e in effects:
        root = la.psd_sqrt(e)
        if np.linalg.norm(e @ t) > ZERO_EFFECT_TOL:
            image = PureState.normalized(root @ t)
        else:
            image_vec = root @ extended.vector
            if np.linalg.norm(image_vec) <= ZERO_EFFECT_TOL:
                raise ValueError(
                    "an effect annihilates the extended target; extension is unusable"
                )
            image = PureState.normalized(image_vec)
        ops.append(rotation_onto(image, target) @ root)
    return KrausChannel(ops, tol=tol)


# ---------------------------------------------------------------------------
# Worked channel families
# ---------------------------------------------------------------------------


def example1_kraus(beta: float, tol: float = DEFAULT_TOL) -> KrausChannel:
    """One-parameter qubit channel steering toward (|0> + |1>)/sqrt(2).

    The two operators combine complementary diagonal filters with opposite
    y-axis rotations; the steering strength is cos²(2 beta), vanishing at
    beta = pi/4 where the channel degenerates to the identity.
    """
    theta = beta - np.pi / 4
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]], dtype=complex)  # exp(-i theta Y)
    m0 = rot @ np.diag([np.sin(beta), np.cos(beta)]).astype(complex)
    m1 = rot.T @ np.diag([np.cos(beta), np.sin(beta)]).astype(complex)
    return KrausChannel([m0, m1], tol=tol)


def example1_target() -> PureState:
    return PureState.normalized([1.0, 1.0])


def example1_setup(lam: float) -> ControlSetup:
    """Two-spin realisation of the qubit steering channel.

    The joint evolution exp(-i lam (YY + ZZ)/2) with the controller prepared
    in the target state and read out in the Pauli-Y eigenbasis reduces to the
    one-parameter channel family with gain sin²(lam).
    """
    generator = (la.kron(PAULI_Y, PAULI_Y) + la.kron(PAULI_Z, PAULI_Z)) / 2
    u = la.unitary_from_generator(generator, lam)
    y_plus = PureState.normalized([1.0, 1.0j])
    y_minus = PureState.normalized([1.0, -1.0j])
    controller_state = PureState.normalized(y_plus.vector + 1j * y_minus.vector)
    return ControlSetup(
        unitary=u,
        controller_state=controller_state,
        controller_basis=(y_plus, y_minus),
        target=example1_target(),
    )


def swap_operator(d: int) -> np.ndarray:
    """Exchange of two d-dimensional factors: (x ⊗ y) -> (y ⊗ x)."""
    if d < 2:
        raise ValueError("swap needs dimension at least 2")
    s = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            s[k * d + l, l * d + k] = 1.0
    return s


def swap_operator_in_bases(system_basis, controller_basis) -> np.ndarray:
    """Swap operator written with respect to explicit bases on each factor.

    ``system_basis`` and ``controller_basis`` are matrices whose columns are
    the basis vectors; the result is sum_kl |u_k><u_l| (x) |w_l><w_k|.
    """
    u = np.asarray(system_basis, dtype=complex)
    w = np.asarray(controller_basis, dtype=complex)
    if u.shape != w.shape or u.shape[0] != u.shape[1]:
        raise ValueError("bases must be square matrices of equal dimension")
    d = u.shape[1]
    out = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            out += la.kron(
                np.outer(u[:, k], u[:, l].conj()), np.outer(w[:, l], w[:, k].conj())
            )
    return out


def weak_swap_channel(
    lam: float, d: int, target_index: int = 0, tol: float = DEFAULT_TOL
) -> KrausChannel:
    """Channel of the partial-swap unitary exp(-i lam S) with the controller
    prepared in the target basis state.

    Operator 0 is cos(lam) I - i sin(lam) |T><T|; the remaining d-1 operators
    feed every other basis direction into the target with amplitude sin(lam).
    At lam = 0 (mod pi) the dynamics is the identity and verification reports
    a non-converging channel.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not 0 <= target_index < d:
        raise ValueError(f"target index {target_index} out of range for dimension {d}")
    t = np.zeros(d, dtype=complex)
    t[target_index] = 1.0
    projector = np.outer(t, t.conj())
    c, s = np.cos(lam), np.sin(lam)
    ops = [c * np.eye(d, dtype=complex) - 1j * s * projector]
    for i in range(d):
        if i == target_index:
            continue
        e_i = np.zeros(d, dtype=complex)
        e_i[i] = 1.0
        ops.append(-1j * s * np.outer(t, e_i.conj()))
    return KrausChannel(ops, tol=tol)


def _qubit_pair_swap(slot_a: int, slot_b: int, n_slots: int = 4) -> np.ndarray:
    dim = 2**n_slots
    s = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        bits = [(idx >> (n_slots - 1 - k)) & 1 for k in range(n_slots)]
        bits[slot_a], bits[slot_b] = bits[slot_b], bits[slot_a]
        j = sum(bit << (n_slots - 1 - k) for k, bit in enumerate(bits))
        s[j, idx] = 1.0
    return s


def qubit_interleave_permutation() -> np.ndarray:
    """Permutation from slot order (s1, s2, c1, c2) to pair order (s1, c1, s2, c2)."""
    p = np.zeros((16, 16), dtype=complex)
    for idx in range(16):
        bits = [(idx >> (3 - k)) & 1 for k in range(4)]
        paired = [bits[0], bits[2], bits[1], bits[3]]
        j = sum(bit << (3 - k) for k, bit in enumerate(paired))
        p[j, idx] = 1.0
    return p


def pairwise_swap_unitary(lam: float) -> np.ndarray:
    """exp(-i lam (S1 + S2)) for two system qubits coupled to two controller
    qubits, in closed form.

    Slots are ordered (system 1, system 2, controller 1, controller 2); S_k
    swaps system qubit k with controller qubit k. The closed form is
    cos²(lam) I - sin²(lam) S1 S2 - (i/2) sin(2 lam) (S1 + S2).
    """
    s1 = _qubit_pair_swap(0, 2)
    s2 = _qubit_pair_swap(1, 3)
    eye = np.eye(16, dtype=complex)
    return (
        np.cos(lam) ** 2 * eye
        - np.sin(lam) ** 2 * (s1 @ s2)
        - 0.5j * np.sin(2 * lam) * (s1 + s2)
    )


def pairwise_channel(lam: float, tol: float = DEFAULT_TOL) -> tuple[KrausChannel, PureState]:
    """Channel of the pairwise-interaction unitary with Bell-state controllers.

    Controllers are prepared in (|00> + |11>)/sqrt(2); the same Bell state is
    the intended system target. Only a full swap (lam = pi/2) reaches it
    exactly; elsewhere the channel is approximate.
    """
    bell = PureState.normalized([1.0, 0.0, 0.0, 1.0])
    channel = kraus_from_unitary(pairwise_swap_unitary(lam), bell, tol=tol)
    return channel, bell


def bell_transform() -> np.ndarray:
    """Columns map the computational two-qubit basis to the Bell basis."""
    r = 1 / np.sqrt(2)
    return np.array(
        [
            [r, r, 0, 0],
            [0, 0, r, r],
            [0, 0, r, -r],
            [r, -r, 0, 0],
        ],
        dtype=complex,
    )


def bell_target() -> PureState:
    return PureState.normalized([1.0, 0.0, 0.0, 1.0])


def bell_hamiltonian() -> np.ndarray:
    """Four-qubit Pauli-string generator of the entangling control unitary.

    Equals the swap operator between the two-qubit system written in the Bell
    basis and the two-qubit controller written in the product basis. Slots
    are (system 1, system 2, controller 1, controller 2).
    """
    terms = [
        (1.0, "ixxi"),
        (1.0, "iyyx"),
        (1.0, "izzx"),
        (1.0, "xixz"),
        (1.0, "xxiz"),
        (-1.0, "xyzy"),
        (1.0, "xzyy"),
        (-1.0, "yixy"),
        (-1.0, "yxiy"),
        (-1.0, "yyzz"),
        (1.0, "yzyz"),
        (1.0, "ziix"),
        (1.0, "zxxx"),
        (1.0, "zyyi"),
        (1.0, "zzzi"),
        (1.0, "iiii"),
    ]
    h = np.zeros((16, 16), dtype=complex)
    for sign, spec in terms:
        h += sign * pauli_string(spec)
    return h / 4


def bell_kraus_operators(lam: float) -> list[np.ndarray]:
    """Explicit two-qubit Kraus operators steering toward (|00> + |11>)/sqrt(2)."""
    c, s = np.cos(lam), np.sin(lam)
    m1 = c * pauli_string("ii") - 0.25j * s * (
        pauli_string("xx") - pauli_string("yy") + pauli_string("zz") + pauli_string("ii")
    )
    m2 = -0.25 * s * (
        pauli_string("xy") + pauli_string("yx")
        + 1j * pauli_string("zi") + 1j * pauli_string("iz")
    )
    m3 = 0.25 * s * (
        pauli_string("yz") + pauli_string("zy")
        - 1j * pauli_string("xi") - 1j * pauli_string("ix")
    )
    m4 = 0.25j * s * (
        pauli_string("zx") - pauli_string("xz")
        - 1j * pauli_string("yi") + 1j * pauli_string("iy")
    )
    return [m1, m2, m3, m4]


def bell_channel(lam: float, tol: float = DEFAULT_TOL) -> tuple[KrausChannel, np.ndarray]:
    """Entangling channel with Bell target, plus its Pauli-string generator.

    The channel equals the partial-swap channel (d=4, target index 0)
    conjugated into the Bell basis.
    """
    return KrausChannel(bell_kraus_operators(lam), tol=tol), bell_hamiltonian()


# ---------------------------------------------------------------------------
# Example POVMs and the named-channel registry
# ---------------------------------------------------------------------------


def unsharp_qubit_povm(eta: float) -> Povm:
    """Two-outcome unsharp z-measurement (I ± eta Z)/2."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"unsharpness must lie in [0, 1], got {eta}")
    eye = np.eye(2, dtype=complex)
    return Povm([(eye + eta * PAULI_Z) / 2, (eye - eta * PAULI_Z) / 2])


def tetrahedral_qubit_povm() -> Povm:
    """Informationally complete qubit POVM from tetrahedron directions."""
    axes = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
    ) / np.sqrt(3)
    eye = np.eye(2, dtype=complex)
    paulis = (PAULI_X, PAULI_Y, PAULI_Z)
    effects = []
    for n in axes:
        effects.append((eye + sum(c * p for c, p in zip(n, paulis))) / 4)
    return Povm(effects)


def diagonal_povm(weights) -> Povm:
    """POVM of mutually diagonal effects; row i holds the eigenvalues of E_i."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weights must be a 2-D array (effects x eigenvalues)")
    return Povm([np.diag(row).astype(complex) for row in w])


def method2_example_povm() -> Povm:
    """Three-outcome commuting POVM whose images of (|0> + |1>)/sqrt(2) do not span."""
    return diagonal_povm([[0.5, 0.25, 0.0], [0.5, 0.75, 0.0], [0.0, 0.0, 1.0]])


def method2_example_target() -> PureState:
    return PureState.normalized([1.0, 1.0, 0.0])


def _registry_example1(params: dict) -> tuple[KrausChannel, PureState]:
    if "beta" in params:
        beta = float(params.pop("beta"))
        return example1_kraus(beta), example1_target()
    lam = float(params.pop("lambda", np.pi / 5))
    setup = example1_setup(lam)
    return setup.channel(), setup.target


def _registry_weak_swap(params: dict) -> tuple[KrausChannel, PureState]:
    lam = float(params.pop("lambda", np.pi / 4))
    d = int(params.pop("dim", 2))
    idx = int(params.pop("target_index", 0))
    return weak_swap_channel(lam, d, idx), PureState.basis(idx, d)


def _registry_bell(params: dict) -> tuple[KrausChannel, PureState]:
    lam = float(params.pop("lambda", np.pi / 5))
    channel, _ = bell_channel(lam)
    return channel, bell_target()


def _registry_pairwise(params: dict) -> tuple[KrausChannel, PureState]:
    lam = float(params.pop("lambda", np.pi / 4))
    return pairwise_channel(lam)


def _registry_method1(params: dict) -> tuple[KrausChannel, PureState]:
    eta = float(params.pop("eta", 0.5))
    target = PureState.normalized([1.0, 1.0])
    return build_method1(unsharp_qubit_povm(eta), target), target


def _registry_method2(params: dict) -> tuple[KrausChannel, PureState]:
    t2 = float(params.pop("t2", 0.3))
    target = method2_example_target()
    return build_method2(method2_example_povm(), target, [t2]), target


_REGISTRY = {
    "example1": _registry_example1,
    "weak-swap": _registry_weak_swap,
    "bell": _registry_bell,
    "pairwise": _registry_pairwise,
    "povm-method1": _registry_method1,
    "povm-method2": _registry_method2,
}

REGISTRY_NAMES = tuple(sorted(_REGISTRY))


def build_named_channel(name: str, params: dict | None = None) -> tuple[KrausChannel, PureState]:
    """Instantiate a registry channel with its intended target state."""
    if name not in _REGISTRY:
        raise ValueError(f"unknown channel {name!r}; known: {', '.join(REGISTRY_NAMES)}")
    remaining = dict(params or {})
    channel, target = _REGISTRY[name](remaining)
    if remaining:
        raise ValueError(
            f"unknown parameters for {name!r}: {', '.join(sorted(remaining))}"
        )
    return channel, target
