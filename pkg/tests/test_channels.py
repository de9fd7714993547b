import numpy as np
import pytest

from qsteer import linalg as la
from qsteer.channels import (
    KrausChannel,
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
from qsteer.constructors import (
    example1_kraus,
    example1_setup,
    example1_target,
    method1_operators,
    method2_example_povm,
    method2_example_target,
    swap_operator,
    weak_swap_channel,
)
from qsteer.sampling import random_density_matrix, random_pure_vector, random_unitary
from qsteer.states import DensityOperator, PureState, target_fidelity


def identity_channel(d=2):
    return KrausChannel([np.eye(d, dtype=complex)])


def random_converging_channel(rng):
    """A randomly parameterised channel known to steer toward its target."""
    kind = rng.integers(0, 3)
    lam = float(rng.uniform(0.2, np.pi / 2))
    if kind == 0:
        d = int(rng.integers(2, 5))
        return weak_swap_channel(lam, d), PureState.basis(0, d)
    if kind == 1:
        return example1_setup(lam).channel(), example1_target()
    beta = float(rng.uniform(0.0, np.pi / 8))
    return example1_kraus(beta), example1_target()


def random_state(dim, rng):
    if rng.random() < 0.5:
        return DensityOperator(random_density_matrix(dim, rng))
    return PureState(random_pure_vector(dim, rng)).density()


class TestKrausChannel:
    def test_rejects_incomplete_set(self):
        with pytest.raises(ValueError, match="completeness"):
            KrausChannel([np.eye(2) / 2])

    def test_rejects_empty_and_mixed_dims(self):
        with pytest.raises(ValueError):
            KrausChannel([])
        with pytest.raises(ValueError):
            KrausChannel([np.eye(2), np.zeros((3, 3))])


class TestApply:
    def test_identity_channel(self):
        rng = np.random.default_rng(2)
        rho = DensityOperator(random_density_matrix(3, rng))
        np.testing.assert_allclose(apply(identity_channel(3), rho).matrix, rho.matrix, atol=1e-15)

    def test_full_swap_resets_to_target(self):
        # one full-swap application equals conjugating by the joint swap and tracing
        channel = weak_swap_channel(np.pi / 2, 2)
        one = PureState.basis(1, 2).density()
        out = apply(channel, one)
        np.testing.assert_allclose(out.matrix, PureState.basis(0, 2).projector(), atol=1e-14)
        s = swap_operator(2)
        joint = la.kron(one.matrix, PureState.basis(0, 2).projector())
        oracle = la.partial_trace(s @ joint @ s.conj().T, (2, 2), 0)
        np.testing.assert_allclose(out.matrix, oracle, atol=1e-14)

    def test_example1_single_step_gain(self):
        lam = np.pi / 5
        channel = example1_setup(lam).channel()
        rho = PureState.basis(0, 2).density()  # fidelity 1/2 to the target
        f1 = target_fidelity(apply(channel, rho), example1_target())
        assert abs(f1 - (0.5 + np.sin(lam) ** 2 / 2)) <= 1e-12

    def test_trace_preserved(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            channel, _ = random_converging_channel(rng)
            rho = random_state(channel.dim, rng)
            assert abs(np.trace(apply(channel, rho).matrix) - 1.0) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            apply(identity_channel(2), DensityOperator.maximally_mixed(3))


class TestKrausFromUnitary:
    def test_identity_unitary(self):
        channel = kraus_from_unitary(np.eye(4), PureState.basis(0, 2))
        np.testing.assert_allclose(channel.operators[0], np.eye(2), atol=1e-15)
        np.testing.assert_allclose(channel.operators[1], np.zeros((2, 2)), atol=1e-15)

    def test_spin_pair_unitary_is_complete(self):
        setup = example1_setup(np.pi / 5)
        channel = setup.channel()
        total = sum(m.conj().T @ m for m in channel.operators)
        assert la.operator_norm(total - np.eye(2)) <= 1e-12

    def test_partial_swap_reduction_matches_closed_form(self):
        lam = 0.9
        d = 3
        u = np.cos(lam) * np.eye(d * d) - 1j * np.sin(lam) * swap_operator(d)
        derived = kraus_from_unitary(u, PureState.basis(0, d))
        direct = weak_swap_channel(lam, d)
        for a, b in zip(derived.operators, direct.operators):
            assert la.operator_norm(a - b) <= 1e-10
        assert channels_equal(derived, direct, tol=1e-10)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            kraus_from_unitary(np.eye(4) * 0.5, PureState.basis(0, 2))

    def test_rejects_non_orthonormal_basis(self):
        basis = [PureState.basis(0, 2), PureState.basis(0, 2)]
        with pytest.raises(ValueError, match="orthonormal"):
            kraus_from_unitary(np.eye(4), PureState.basis(0, 2), basis)


class TestVerifyChannel:
    def test_weak_swap_reports(self):
        for lam in (0.3, np.pi / 4, np.pi / 2):
            for d in (2, 3):
                report = verify_channel(weak_swap_channel(lam, d), PureState.basis(0, d))
                assert report.converging
                assert abs(report.eigenvalues_z[0] - np.exp(-1j * lam)) <= 1e-12
                assert all(abs(z) <= 1e-12 for z in report.eigenvalues_z[1:])
                assert report.span_rank == d
                assert report.z_norm_defect <= 1e-12

    def test_identity_channel_not_converging(self):
        report = verify_channel(identity_channel(2), PureState.basis(0, 2))
        assert not report.converging
        assert report.span_rank == 1
        assert report.eigenvalues_z == (1 + 0j,)

    def test_example1_family(self):
        report = verify_channel(example1_kraus(0.2), example1_target())
        assert report.converging
        for z in report.eigenvalues_z:
            assert abs(abs(z) - 1 / np.sqrt(2)) <= 1e-12

    def test_z_norm_holds_when_fixed_point_holds(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            channel, target = random_converging_channel(rng)
            report = verify_channel(channel, target)
            assert report.fixed_point_defect <= channel.tol
            assert report.z_norm_defect <= 1e-10


class TestDeltaFidelity:
    def test_zero_at_fixed_point(self):
        channel = weak_swap_channel(0.7, 2)
        direct, norms = delta_fidelity(channel, PureState.basis(0, 2).density(), PureState.basis(0, 2))
        assert abs(direct) <= 1e-12
        assert abs(norms) <= 1e-12

    def test_weak_swap_gain_law(self):
        rng = np.random.default_rng(23)
        for d in (2, 3, 4):
            lam = 0.6
            channel = weak_swap_channel(lam, d)
            target = PureState.basis(0, d)
            for _ in range(10):
                rho = random_state(d, rng)
                direct, norms = delta_fidelity(channel, rho, target)
                expected = np.sin(lam) ** 2 * (1 - target_fidelity(rho, target))
                assert abs(direct - expected) <= 1e-11
                assert abs(norms - expected) <= 1e-11

    def test_example1_gain_law(self):
        rng = np.random.default_rng(29)
        lam = np.pi / 5
        channel = example1_setup(lam).channel()
        target = example1_target()
        for _ in range(10):
            rho = random_state(2, rng)
            direct, _ = delta_fidelity(channel, rho, target)
            expected = np.sin(lam) ** 2 * (1 - target_fidelity(rho, target))
            assert abs(direct - expected) <= 1e-11

    def test_never_decreases_and_identity(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            channel, target = random_converging_channel(rng)
            rho = random_state(channel.dim, rng)
            direct, norms = delta_fidelity(channel, rho, target)
            assert direct >= -1e-12
            assert abs(direct - norms) <= 1e-10

    def test_requires_fixed_point(self):
        theta = 0.4
        mover = KrausChannel([la.unitary_from_generator(np.array([[0, 1], [1, 0]], dtype=complex), theta)])
        with pytest.raises(ValueError, match="fixed"):
            delta_fidelity(mover, DensityOperator.maximally_mixed(2), PureState.basis(0, 2))


class TestIterate:
    def test_zero_steps(self):
        channel = weak_swap_channel(0.5, 2)
        rho = DensityOperator.maximally_mixed(2)
        traj = iterate(channel, rho, PureState.basis(0, 2), 0)
        assert len(traj) == 1
        assert traj.records[0].step == 0
        assert abs(traj.records[0].fidelity - 0.5) <= 1e-14

    def test_example1_fidelity_law(self):
        lam = np.pi / 5
        channel = example1_setup(lam).channel()
        target = example1_target()
        rng = np.random.default_rng(37)
        rho = random_state(2, rng)
        f0 = target_fidelity(rho, target)
        traj = iterate(channel, rho, target, 50)
        gain = np.sin(lam) ** 2
        for n, rec in enumerate(traj.records):
            expected = 1 - (1 - f0) * (1 - gain) ** n
            assert abs(rec.fidelity - expected) <= 1e-10

    def test_orthogonal_start_stays_on_target_axis(self):
        channel = example1_setup(np.pi / 5).channel()
        target = example1_target()  # Bloch axis (1, 0, 0)
        rho = PureState.normalized([1.0, -1.0]).density()
        traj = iterate(channel, rho, target, 30)
        for rec in traj.records:
            assert abs(rec.bloch[1]) <= 1e-12
            assert abs(rec.bloch[2]) <= 1e-12

    def test_observable_flags(self):
        channel = weak_swap_channel(0.5, 2)
        traj = iterate(
            channel,
            DensityOperator.maximally_mixed(2),
            PureState.basis(0, 2),
            2,
            with_bloch=False,
            keep_states=True,
        )
        assert traj.records[0].bloch is None
        assert traj.records[-1].state is not None

    def test_convergence_within_predicted_steps(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            channel, target = random_converging_channel(rng)
            rho = random_state(channel.dim, rng)
            f0 = target_fidelity(rho, target)
            if 1 - f0 <= 1e-8:
                continue
            gain = estimate_gain(channel, target)
            n_star = int(np.ceil(np.log(1e-8 / (1 - f0)) / np.log(1 - gain)))
            traj = iterate(channel, rho, target, max(n_star, 1))
            assert 1 - traj.final().fidelity <= 1e-8


class TestChoi:
    def test_identity_channel_choi(self):
        d = 2
        omega = np.eye(d).T.reshape(-1) / np.sqrt(d)
        expected = d * np.outer(omega, omega.conj())
        np.testing.assert_allclose(choi_matrix(identity_channel(d)), expected, atol=1e-14)

    def test_choi_is_psd_with_identity_reduction(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            channel, _ = random_converging_channel(rng)
            c = choi_matrix(channel)
            w = np.linalg.eigvalsh(la.hermitian_part(c))
            assert w.min() >= -1e-10
            reduced = la.partial_trace(c, (channel.dim, channel.dim), 0)
            assert la.operator_norm(reduced - np.eye(channel.dim)) <= 1e-10

    def test_isometry_related_sets_are_equal(self):
        rng = np.random.default_rng(47)
        channel = weak_swap_channel(0.6, 2)
        v = random_unitary(2, rng)
        remixed = KrausChannel(
            [sum(v[i, j] * channel.operators[j] for j in range(2)) for i in range(2)]
        )
        assert channels_equal(channel, remixed, tol=1e-12)

    def test_distinct_parameters_differ(self):
        a = weak_swap_channel(np.pi / 8, 2)
        b = weak_swap_channel(np.pi / 4, 2)
        assert choi_distance(a, b) > 0.1
        assert not channels_equal(a, b, tol=1e-10)
        assert channels_equal(a, a, tol=1e-14)


class TestZeroGainState:
    def test_full_span_returns_none(self):
        assert zero_gain_state(weak_swap_channel(0.5, 3), PureState.basis(0, 3)) is None

    def test_defective_span_yields_stationary_orthogonal_state(self):
        # spanning failure: the construction without an extension leaves
        # one eigendirection that the channel never feeds toward the target
        povm = method2_example_povm()
        target = method2_example_target()
        channel = KrausChannel(method1_operators(povm, target))
        report = verify_channel(channel, target)
        assert not report.converging
        assert report.span_rank == 2
        psi = zero_gain_state(channel, target)
        assert psi is not None
        assert abs(np.vdot(psi.vector, target.vector)) <= 1e-10
        direct, norms = delta_fidelity(channel, psi.density(), target)
        assert abs(direct) <= 1e-12
        assert abs(norms) <= 1e-12
        traj = iterate(channel, psi.density(), target, 100)
        assert max(rec.fidelity for rec in traj.records) <= 1e-10


class TestConjugateChannel:
    def test_steers_toward_rotated_target(self):
        rng = np.random.default_rng(53)
        channel = weak_swap_channel(0.8, 3)
        u = random_unitary(3, rng)
        rotated = conjugate_channel(channel, u)
        new_target = PureState(u @ PureState.basis(0, 3).vector)
        assert verify_channel(rotated, new_target).converging

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            conjugate_channel(identity_channel(2), np.eye(2) * 2)
