"""Dense complex linear algebra for small Hilbert spaces.

Operators are plain numpy arrays of dtype complex128. Composite spaces use
Kronecker ordering with subsystem 0 as the leftmost factor (system before
controller), so an operator A on the system embeds as kron(A, I_controller).
"""

from __future__ import annotations

import numpy as np

PSD_CLIP = 1e-10
RANK_RTOL = 1e-8
HERM_TOL = 1e-9


def as_operator(m) -> np.ndarray:
    """Coerce ``m`` to a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitian_part(m: np.ndarray) -> np.ndarray:
    """(m + m†) / 2, absorbing round-off asymmetry."""
    return (m + m.conj().T) / 2


def operator_norm(m) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(np.asarray(m, dtype=complex), 2))


def hermiticity_defect(m: np.ndarray) -> float:
    return operator_norm(m - m.conj().T)


def unitarity_defect(m: np.ndarray) -> float:
    m = as_operator(m)
    return operator_norm(m.conj().T @ m - np.eye(m.shape[0]))


def kron(a, b) -> np.ndarray:
    """Kronecker product; dimensions multiply, left factor is slot 0."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, factor_dims, keep: int) -> np.ndarray:
    """Trace out all tensor factors of ``m`` except ``keep``.

    ``factor_dims`` lists the subsystem dimensions in slot order; their
    product must equal the matrix dimension. The result acts on the kept
    factor and has the same trace as ``m``.
    """
    m = as_operator(m)
    dims = tuple(int(d) for d in factor_dims)
    if any(d <= 0 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if total != m.shape[0]:
        raise ValueError(
            f"factor dimensions {dims} multiply to {total}, matrix has dimension {m.shape[0]}"
        )
    if not 0 <= keep < len(dims):
        raise ValueError(f"keep={keep} out of range for {len(dims)} factors")
    t = m.reshape(dims + dims)
    n = len(dims)
    for ax in reversed([i for i in range(len(dims)) if i != keep]):
        t = np.trace(t, axis1=ax, axis2=ax + n)
        n -= 1
    return t


def unitary_from_generator(h, t: float, tol: float = HERM_TOL) -> np.ndarray:
    """exp(-i t h) for Hermitian h, via eigendecomposition."""
    h = as_operator(h)
    scale = max(1.0, operator_norm(h))
    if hermiticity_defect(h) > tol * scale:
        raise ValueError(
            f"generator is not Hermitian (defect {hermiticity_defect(h):.3e})"
        )
    w, v = np.linalg.eigh(hermitian_part(h))
    return (v * np.exp(-1j * float(t) * w)) @ v.conj().T


def psd_sqrt(e, tol: float = PSD_CLIP) -> np.ndarray:
    """Hermitian square root of a positive-semidefinite matrix.

    Eigenvalues in [-tol, 0) are treated as round-off and clipped to zero;
    anything below -tol is rejected.
    """
    e = as_operator(e)
    scale = max(1.0, operator_norm(e))
    if hermiticity_defect(e) > 10 * tol * scale:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(hermitian_part(e))
    if w.min(initial=0.0) < -tol:
        raise ValueError(
            f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})"
        )
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def numerical_rank(vectors, rtol: float = RANK_RTOL) -> int:
    """Rank of the span of ``vectors`` from singular values above rtol * s_max."""
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not vecs:
        return 0
    dims = {v.size for v in vecs}
    if len(dims) != 1:
        raise ValueError(f"vectors have mixed dimensions {sorted(dims)}")
    s = np.linalg.svd(np.array(vecs), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))
