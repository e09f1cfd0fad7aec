"""Dense matrix kernels shared by all backends.

Hermitian eigendecomposition, positive-semidefinite square roots, and
Pfaffians of antisymmetric matrices. Tolerances are relative to the
max-row-sum (infinity) norm so checks behave uniformly across coupling
and temperature sweeps.
"""

import numpy as np

HERMITIAN_RTOL = 1e-10
ANTISYM_RTOL = 1e-12
# eigenvalues above -EIG_CLIP_FACTOR * dim * norm are clipped to zero
EIG_CLIP_FACTOR = 1e-10


def row_sum_norm(m: np.ndarray) -> float:
    """Max-row-sum (induced infinity) norm."""
    m = np.atleast_2d(m)
    return float(np.max(np.sum(np.abs(m), axis=1), initial=0.0))


def _as_square(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns V) with
    m = V diag(w) V^dag. Rejects inputs whose anti-Hermitian part
    exceeds HERMITIAN_RTOL relative to the matrix norm.
    """
    a = _as_square(m)
    norm = row_sum_norm(a)
    defect = row_sum_norm(a - a.conj().T)
    if defect > HERMITIAN_RTOL * max(norm, 1.0):
        raise ValueError(
            f"matrix is not Hermitian: |m - m^dag| = {defect:.3e} "
            f"(norm {norm:.3e})"
        )
    w, v = np.linalg.eigh(a)
    return w, v


def psd_sqrt(m) -> np.ndarray:
    """Square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues in [-clip, 0) are treated as numerical noise and clipped
    to zero, where clip = EIG_CLIP_FACTOR * dim * norm; anything more
    negative signals an invalid (non-PSD) input.
    """
    a = _as_square(m)
    w, v = hermitian_eig(a)
    clip = EIG_CLIP_FACTOR * a.shape[0] * max(row_sum_norm(a), 1.0)
    if w[0] < -clip:
        raise ValueError(
            f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e} "
            f"< -{clip:.3e}"
        )
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    if np.isrealobj(a):
        root = root.real
    return root


def _check_antisymmetric(a: np.ndarray) -> None:
    n = a.shape[0]
    if n % 2 != 0:
        raise ValueError(f"antisymmetric matrix must have even dimension, got {n}")
    norm = row_sum_norm(a)
    defect = row_sum_norm(a + a.T)
    if defect > ANTISYM_RTOL * max(norm, 1.0):
        raise ValueError(
            f"matrix is not antisymmetric: |m + m^T| = {defect:.3e} "
            f"(norm {norm:.3e})"
        )


def pfaffian(m):
    """Pfaffian of an even-dimensional antisymmetric matrix.

    Parlett-Reid tridiagonalization with partial pivoting, O(n^3).
    Sign convention: pfaffian([[0, a], [-a, 0]]) == a.
    """
    a = _as_square(m)
    _check_antisymmetric(a)
    n = a.shape[0]
    if n == 0:
        return 1.0
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64, copy=True)
    val = a.dtype.type(1)
    for k in range(0, n - 1, 2):
        # pivot the largest entry of column k into the subdiagonal
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            val = -val
        pivot = a[k, k + 1]
        if pivot == 0.0:
            return 0.0 * val
        val = val * pivot
        if k + 2 < n:
            tau = a[k, k + 2:] / pivot
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col)
            a[k + 2:, k + 2:] -= np.outer(col, tau)
    return complex(val) if np.iscomplexobj(a) else float(val)
