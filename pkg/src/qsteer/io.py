"""JSON file formats for states, channels and experiment configs.

Complex data is stored as [re, im] pairs; matrices are flat row-major lists
with an explicit ``dim`` field. A channel file carries either ``kraus`` (a
list of matrices) or a ``unitary`` with ``controller_state`` and
``controller_dim``, which is reduced to Kraus operators at load time.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import DEFAULT_TOL, KrausChannel, kraus_from_unitary
from .states import DensityOperator, PureState


class FormatError(ValueError):
    """A file is missing a field or holds one with the wrong shape."""


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: top level must be an object")
    return data


def _require(data: dict, field: str, path) -> object:
    if field not in data:
        raise FormatError(f"{path}: missing field '{field}'")
    return data[field]


def _pairs_to_array(raw, field: str, path) -> np.ndarray:
    if not isinstance(raw, list):
        raise FormatError(f"{path}: field '{field}' must be a list of [re, im] pairs")
    values = []
    for k, pair in enumerate(raw):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FormatError(f"{path}: field '{field}' entry {k} is not a [re, im] pair")
        try:
            values.append(complex(float(pair[0]), float(pair[1])))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}: field '{field}' entry {k} is not numeric") from exc
    return np.array(values, dtype=complex)


def _array_to_pairs(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def load_state(path) -> PureState | DensityOperator:
    """Read a state file holding either ``amplitudes`` or ``density``."""
    data = _load_json(path)
    dim = _require(data, "dim", path)
    if not isinstance(dim, int) or dim < 1:
        raise FormatError(f"{path}: field 'dim' must be a positive integer")
    if "amplitudes" in data:
        vec = _pairs_to_array(data["amplitudes"], "amplitudes", path)
        if vec.size != dim:
            raise FormatError(
                f"{path}: field 'amplitudes' has {vec.size} entries, expected {dim}"
            )
        try:
            return PureState(vec)
        except ValueError as exc:
            raise FormatError(f"{path}: field 'amplitudes': {exc}") from exc
    if "density" in data:
        flat = _pairs_to_array(data["density"], "density", path)
        if flat.size != dim * dim:
            raise FormatError(
                f"{path}: field 'density' has {flat.size} entries, expected {dim * dim}"
            )
        try:
            return DensityOperator(flat.reshape(dim, dim))
        except ValueError as exc:
            raise FormatError(f"{path}: field 'density': {exc}") from exc
    raise FormatError(f"{path}: missing field 'amplitudes' or 'density'")


def save_state(path, state: PureState | DensityOperator) -> None:
    if isinstance(state, PureState):
        data = {"dim": state.dim, "amplitudes": _array_to_pairs(state.vector)}
    elif isinstance(state, DensityOperator):
        data = {"dim": state.dim, "density": _array_to_pairs(state.matrix)}
    else:
        raise TypeError(f"expected PureState or DensityOperator, got {type(state)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
        fh.write("\n")


def load_channel(path, tol: float = DEFAULT_TOL) -> KrausChannel:
    """Read a channel file in either Kraus or unitary-reduction form."""
    data = _load_json(path)
    if "kraus" in data:
        dim = _require(data, "dim", path)
        if not isinstance(dim, int) or dim < 1:
            raise FormatError(f"{path}: field 'dim' must be a positive integer")
        raw_ops = data["kraus"]
        if not isinstance(raw_ops, list) or not raw_ops:
            raise FormatError(f"{path}: field 'kraus' must be a nonempty list of matrices")
        ops = []
        for k, raw in enumerate(raw_ops):
            flat = _pairs_to_array(raw, f"kraus[{k}]", path)
            if flat.size != dim * dim:
                raise FormatError(
                    f"{path}: field 'kraus[{k}]' has {flat.size} entries, expected {dim * dim}"
                )
            ops.append(flat.reshape(dim, dim))
        try:
            return KrausChannel(ops, tol=tol)
        except ValueError as exc:
            raise FormatError(f"{path}: field 'kraus': {exc}") from exc
    if "unitary" in data:
        controller_dim = _require(data, "controller_dim", path)
        if not isinstance(controller_dim, int) or controller_dim < 1:
            raise FormatError(f"{path}: field 'controller_dim' must be a positive integer")
        state_vec = _pairs_to_array(
            _require(data, "controller_state", path), "controller_state", path
        )
        if state_vec.size != controller_dim:
            raise FormatError(
                f"{path}: field 'controller_state' has {state_vec.size} entries, "
                f"expected {controller_dim}"
            )
        flat = _pairs_to_array(data["unitary"], "unitary", path)
        total = int(round(np.sqrt(flat.size)))
        if total * total != flat.size or total % controller_dim != 0:
            raise FormatError(
                f"{path}: field 'unitary' has {flat.size} entries, not a square matrix "
                f"of dimension divisible by controller_dim={controller_dim}"
            )
        try:
            controller = PureState(state_vec)
            return kraus_from_unitary(flat.reshape(total, total), controller, tol=tol)
        except ValueError as exc:
            raise FormatError(f"{path}: field 'unitary': {exc}") from exc
    raise FormatError(f"{path}: missing field 'kraus' or 'unitary'")


def save_channel(path, channel: KrausChannel) -> None:
    data = {
        "dim": channel.dim,
        "kraus": [_array_to_pairs(m) for m in channel.operators],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
        fh.write("\n")


def load_config(path) -> dict:
    """Read an experiment config object; field validation happens per command."""
    return _load_json(path)
