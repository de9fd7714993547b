import json

import numpy as np
import pytest

from qsteer import io
from qsteer.channels import channels_equal, verify_channel
from qsteer.constructors import weak_swap_channel
from qsteer.sampling import random_density_matrix, random_pure_vector
from qsteer.states import DensityOperator, PureState


class TestStateFiles:
    def test_pure_state_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        state = PureState(random_pure_vector(3, rng))
        path = tmp_path / "state.json"
        io.save_state(path, state)
        loaded = io.load_state(path)
        assert isinstance(loaded, PureState)
        np.testing.assert_allclose(loaded.vector, state.vector, atol=1e-15)

    def test_density_roundtrip(self, tmp_path):
        rng = np.random.default_rng(2)
        rho = DensityOperator(random_density_matrix(2, rng))
        path = tmp_path / "rho.json"
        io.save_state(path, rho)
        loaded = io.load_state(path)
        assert isinstance(loaded, DensityOperator)
        np.testing.assert_allclose(loaded.matrix, rho.matrix, atol=1e-15)

    def test_missing_dim_names_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"amplitudes": [[1.0, 0.0]]}))
        with pytest.raises(io.FormatError, match="'dim'"):
            io.load_state(path)

    def test_wrong_length_names_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 3, "amplitudes": [[1.0, 0.0]]}))
        with pytest.raises(io.FormatError, match="'amplitudes'"):
            io.load_state(path)

    def test_truncated_json(self, tmp_path):
        path = tmp_path / "trunc.json"
        path.write_text('{"dim": 2, "amplitudes": [[1.0,')
        with pytest.raises(io.FormatError, match="JSON"):
            io.load_state(path)


class TestChannelFiles:
    def test_kraus_roundtrip(self, tmp_path):
        channel = weak_swap_channel(0.6, 3)
        path = tmp_path / "channel.json"
        io.save_channel(path, channel)
        loaded = io.load_channel(path)
        assert loaded.dim == 3
        assert channels_equal(channel, loaded, tol=1e-12)

    def test_unitary_form_reduces_at_load(self, tmp_path):
        lam, d = 0.8, 2
        from qsteer.constructors import swap_operator

        u = np.cos(lam) * np.eye(d * d) - 1j * np.sin(lam) * swap_operator(d)
        flat = [[z.real, z.imag] for z in u.reshape(-1)]
        path = tmp_path / "unitary.json"
        path.write_text(
            json.dumps(
                {
                    "unitary": flat,
                    "controller_state": [[1.0, 0.0], [0.0, 0.0]],
                    "controller_dim": 2,
                }
            )
        )
        loaded = io.load_channel(path)
        assert channels_equal(loaded, weak_swap_channel(lam, d), tol=1e-10)
        assert verify_channel(loaded, PureState.basis(0, d)).converging

    def test_incomplete_kraus_named(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"dim": 2, "kraus": [[[0.5, 0.0]] * 4]}))
        with pytest.raises(io.FormatError, match="'kraus'"):
            io.load_channel(path)

    def test_missing_controller_state_named(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"unitary": [[1.0, 0.0]] * 4, "controller_dim": 2}))
        with pytest.raises(io.FormatError, match="'controller_state'"):
            io.load_channel(path)
