"""Dense complex-matrix kernel used by every other module.

All tolerances are relative to the largest entry magnitude of the input
unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NotHermitian, NotPositiveDefinite, ShapeMismatch

HERMITIAN_RTOL = 1e-10
PD_EIG_RTOL = 1e-12
DEFAULT_RANK_TOL = 1e-10
_PHASE_TOL = 1e-12


def as_cmatrix(a) -> np.ndarray:
    """Coerce ``a`` to a fresh 2-D complex128 array, rejecting NaN/Inf."""
    m = np.array(a, dtype=np.complex128, copy=True)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got array of ndim {m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains NaN or Inf entries")
    return m


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2.0


def hermitian_defect(a: np.ndarray) -> float:
    """Largest entry of |a - a*|; zero exactly for Hermitian input."""
    return max_abs(a - a.conj().T)


def require_hermitian(a, rtol: float = HERMITIAN_RTOL, what: str = "matrix") -> np.ndarray:
    """Validate Hermitianness within ``rtol`` and return the Hermitian part."""
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"{what} must be square, got shape {m.shape}")
    scale = max_abs(m)
    if hermitian_defect(m) > rtol * scale:
        raise NotHermitian(
            f"{what} is not Hermitian within {rtol:g} relative "
            f"(defect {hermitian_defect(m):.3e}, scale {scale:.3e})"
        )
    return hermitian_part(m)


def _fix_column_phases(v: np.ndarray) -> np.ndarray:
    """Make the first nonzero component of each column real and positive."""
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > _PHASE_TOL)
        if nz.size:
            ph = col[nz[0]]
            v[:, j] = col * (abs(ph) / ph)
    return v


@dataclass(frozen=True)
class HermitianSpectrum:
    """Ascending eigenvalues and phase-fixed unitary column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig_hermitian(a) -> HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix with deterministic phases."""
    h = require_hermitian(a)
    w, v = np.linalg.eigh(h)
    return HermitianSpectrum(w, _fix_column_phases(v))


def cholesky_like_factor(a, method: str = "sqrt") -> np.ndarray:
    """Factor a positive-definite ``a`` as psi* psi = a.

    ``method="sqrt"`` returns the Hermitian square root (the canonical
    choice, reproducible across runs); ``method="cholesky"`` returns the
    upper-triangular conjugate of the Cholesky factor. Either satisfies
    the factorization contract.
    """
    spectrum = eig_hermitian(a)
    w = spectrum.eigenvalues
    if w[-1] <= 0.0 or w[0] <= PD_EIG_RTOL * w[-1]:
        raise NotPositiveDefinite(
            f"matrix is not positive definite: eigenvalue range [{w[0]:.3e}, {w[-1]:.3e}]"
        )
    if method == "sqrt":
        return (spectrum.eigenvectors * np.sqrt(w)) @ spectrum.eigenvectors.conj().T
    if method == "cholesky":
        lower = np.linalg.cholesky(hermitian_part(as_cmatrix(a)))
        return lower.conj().T
    raise ValueError(f"unknown factorization method {method!r}")


def inv_psd(a, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of a Hermitian PSD matrix.

    Eigenvalues at or below ``rank_tol`` times the largest are treated as
    kernel directions and map to zero.
    """
    spectrum = eig_hermitian(a)
    w = spectrum.eigenvalues
    lmax = max(float(w[-1]), 0.0)
    inv_w = np.zeros_like(w)
    if lmax > 0.0:
        keep = w > rank_tol * lmax
        inv_w[keep] = 1.0 / w[keep]
    return (spectrum.eigenvectors * inv_w) @ spectrum.eigenvectors.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product with (A o B)[(i p + k), (j q + l)] = A[i,j] B[k,l]."""
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def frobenius_inner(x, y) -> complex:
    """Hilbert-Schmidt inner product Tr(x* y); antilinear in ``x``."""
    mx = as_cmatrix(x)
    my = as_cmatrix(y)
    if mx.shape != my.shape:
        raise ShapeMismatch(f"shape mismatch: {mx.shape} vs {my.shape}")
    return complex(np.vdot(mx, my))
