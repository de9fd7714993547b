import numpy as np
import pytest

from qsteer import linalg as la
from qsteer.sampling import random_density_matrix, random_pure_vector, random_unitary
from qsteer.states import (
    DensityOperator,
    PureState,
    bloch_vector,
    concurrence,
    target_fidelity,
)

PLUS = PureState.normalized([1.0, 1.0])


class TestPureState:
    def test_rejects_unnormalised(self):
        with pytest.raises(ValueError, match="norm"):
            PureState([1.0, 1.0])

    def test_normalized_and_basis(self):
        s = PureState.normalized([2.0, 0.0])
        np.testing.assert_allclose(s.vector, [1.0, 0.0])
        np.testing.assert_allclose(PureState.basis(1, 3).vector, [0, 1, 0])

    def test_density_promotion_is_explicit(self):
        rho = PLUS.density()
        np.testing.assert_allclose(rho.matrix, np.full((2, 2), 0.5), atol=1e-15)


class TestDensityOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityOperator([[0.5, 0.5], [0.0, 0.5]])

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityOperator(np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="positive"):
            DensityOperator(np.diag([1.5, -0.5]))

    def test_maximally_mixed(self):
        rho = DensityOperator.maximally_mixed(3)
        assert rho.dim == 3
        assert abs(rho.purity() - 1 / 3) < 1e-14


class TestTargetFidelity:
    def test_target_itself(self):
        assert abs(target_fidelity(PLUS.density(), PLUS) - 1.0) <= 1e-14

    def test_maximally_mixed(self):
        for d in (2, 3, 5):
            rho = DensityOperator.maximally_mixed(d)
            t = PureState.basis(0, d)
            assert abs(target_fidelity(rho, t) - 1 / d) < 1e-14

    def test_orthogonal_state(self):
        minus = PureState.normalized([1.0, -1.0])
        assert target_fidelity(minus.density(), PLUS) == 0.0

    def test_matches_projector_trace(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            rho = DensityOperator(random_density_matrix(3, rng))
            t = PureState(random_pure_vector(3, rng))
            via_trace = np.trace(rho.matrix @ t.projector()).real
            assert abs(target_fidelity(rho, t) - via_trace) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            target_fidelity(DensityOperator.maximally_mixed(2), PureState.basis(0, 3))


class TestBlochVector:
    def test_reference_states(self):
        np.testing.assert_allclose(
            bloch_vector(DensityOperator.maximally_mixed(2)), (0, 0, 0), atol=1e-15
        )
        np.testing.assert_allclose(
            bloch_vector(PureState.basis(0, 2).density()), (0, 0, 1), atol=1e-15
        )
        np.testing.assert_allclose(bloch_vector(PLUS.density()), (1, 0, 0), atol=1e-15)

    def test_pure_states_on_sphere(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            b = np.array(bloch_vector(PureState(random_pure_vector(2, rng)).density()))
            assert abs(np.linalg.norm(b) - 1.0) <= 1e-10

    def test_purity_relation(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            rho = DensityOperator(random_density_matrix(2, rng))
            b = np.array(bloch_vector(rho))
            assert abs(rho.purity() - (1 + b @ b) / 2) <= 1e-12

    def test_rejects_non_qubit(self):
        with pytest.raises(ValueError, match="qubit"):
            bloch_vector(DensityOperator.maximally_mixed(3))


class TestConcurrence:
    def test_product_state(self):
        assert concurrence(PureState.basis(0, 4).density()) == 0.0

    def test_bell_state(self):
        bell = PureState.normalized([1.0, 0.0, 0.0, 1.0])
        assert abs(concurrence(bell.density()) - 1.0) <= 1e-12

    def test_maximally_mixed(self):
        # all four mu equal 1/4, so the difference max(0, -1/2) clips to zero
        assert concurrence(DensityOperator.maximally_mixed(4)) == 0.0

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            rho = DensityOperator(random_density_matrix(4, rng))
            u = la.kron(random_unitary(2, rng), random_unitary(2, rng))
            rotated = DensityOperator(la.hermitian_part(u @ rho.matrix @ u.conj().T))
            assert abs(concurrence(rotated) - concurrence(rho)) <= 1e-10

    def test_rejects_wrong_dimension(self):
        with pytest.raises(ValueError, match="two qubits"):
            concurrence(DensityOperator.maximally_mixed(3))
