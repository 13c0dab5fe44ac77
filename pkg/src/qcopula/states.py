"""Bipartite density matrices: the core state type, marginals, random
sampling, precopula checks and the PPT entanglement probe.

Index convention used everywhere: a state on the (n, m) bipartite space is
an (n*m) x (n*m) matrix whose row index (i, k) flattens to i*m + k, i.e.
the first tensor factor has dimension n and varies slowest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jsonio, matcore
from .errors import DegenerateSample, InvalidInput, NotHermitian, NotPSD

STATE_HERMITIAN_RTOL = 1e-10
STATE_TRACE_ATOL = 1e-10
STATE_EIG_FLOOR = -1e-10
JSON_ATOL = 1e-8
FULL_RANK_FLOOR = 1e-12
RESAMPLE_ATTEMPTS = 10

SEPARABLE = "separable"
ENTANGLED = "entangled"
INCONCLUSIVE = "inconclusive"
PPT_EIG_THRESHOLD = -1e-10
PPT_EXACT_DIMS = ((2, 2), (2, 3), (3, 2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, trace-one matrix with bipartite dimension metadata."""

    mat: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        n, m = int(self.dim_a), int(self.dim_b)
        if n < 1 or m < 1:
            raise InvalidInput("dims: factor dimensions must be positive integers")
        mat = matcore.as_cmatrix(self.mat)
        d = n * m
        if mat.shape != (d, d):
            raise InvalidInput(
                f"dims: matrix has shape {mat.shape}, expected ({d}, {d}) for dims ({n}, {m})"
            )
        scale = matcore.max_abs(mat)
        if matcore.hermitian_defect(mat) > STATE_HERMITIAN_RTOL * scale:
            raise NotHermitian(
                f"density matrix is not Hermitian within {STATE_HERMITIAN_RTOL:g} relative"
            )
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > STATE_TRACE_ATOL:
            raise InvalidInput(f"trace: expected 1 within {STATE_TRACE_ATOL:g}, got {tr.real:.12g}")
        lo = float(np.linalg.eigvalsh(matcore.hermitian_part(mat))[0])
        if lo < STATE_EIG_FLOOR:
            raise NotPSD(f"PSD: minimum eigenvalue {lo:.3e} below {STATE_EIG_FLOOR:g}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dim_a", n)
        object.__setattr__(self, "dim_b", m)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def tensor_view(self) -> np.ndarray:
        return self.mat.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)


@dataclass(frozen=True)
class SeparabilityVerdict:
    """PPT probe outcome; exact only for dims (2,2), (2,3) and (3,2)."""

    tag: str
    min_pt_eigenvalue: float


def partial_trace_first(rho: DensityMatrix) -> np.ndarray:
    """Trace out the first factor: (Tr1 rho)[k,l] = sum_i rho[(i,k),(i,l)]."""
    return np.einsum("ikil->kl", rho.tensor_view())


def partial_trace_second(rho: DensityMatrix) -> np.ndarray:
    """Trace out the second factor: (Tr2 rho)[i,j] = sum_k rho[(i,k),(j,k)]."""
    return np.einsum("ikjk->ij", rho.tensor_view())


def marginal_residuals(rho: DensityMatrix) -> tuple[float, float]:
    """Frobenius distances of the two marginals from maximal mixedness."""
    n, m = rho.dim_a, rho.dim_b
    r1 = float(np.linalg.norm(partial_trace_first(rho) - np.eye(m) / m))
    r2 = float(np.linalg.norm(partial_trace_second(rho) - np.eye(n) / n))
    return r1, r2


def is_precopula(rho: DensityMatrix, tol: float = 1e-10) -> bool:
    """True iff both marginals are maximally mixed within ``tol``."""
    r1, r2 = marginal_residuals(rho)
    return r1 <= tol and r2 <= tol


def partial_transpose(rho: DensityMatrix) -> np.ndarray:
    """Transpose on the second factor: [(i,k),(j,l)] -> [(i,l),(j,k)]."""
    t = rho.tensor_view().transpose(0, 3, 2, 1)
    return np.ascontiguousarray(t).reshape(rho.dim, rho.dim)


def ppt_verdict(rho: DensityMatrix) -> SeparabilityVerdict:
    """Peres-Horodecki test on the partial transpose of the second factor."""
    w = np.linalg.eigvalsh(matcore.hermitian_part(partial_transpose(rho)))
    lo = float(w[0])
    if lo < PPT_EIG_THRESHOLD:
        tag = ENTANGLED
    elif (rho.dim_a, rho.dim_b) in PPT_EXACT_DIMS:
        tag = SEPARABLE
    else:
        tag = INCONCLUSIVE
    return SeparabilityVerdict(tag, lo)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def wishart_state_matrix(dim: int, seed) -> np.ndarray:
    """Raw trace-one PSD matrix GG*/Tr(GG*) from a complex Gaussian G.

    ``seed`` may be an integer or an existing ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(seed)
    g = _ginibre(rng, dim, dim)
    w = matcore.hermitian_part(g @ g.conj().T)
    return w / np.trace(w).real


def random_full_rank_state(n: int, m: int, seed) -> DensityMatrix:
    """Full-rank random state on dims (n, m); deterministic given seed.

    Resamples up to ten times if the smallest eigenvalue falls at or
    below 1e-12 (probability-zero event for the Gaussian ensemble).
    """
    rng = np.random.default_rng(seed)
    for _ in range(RESAMPLE_ATTEMPTS):
        mat = wishart_state_matrix(n * m, rng)
        if np.linalg.eigvalsh(mat)[0] > FULL_RANK_FLOOR:
            return DensityMatrix(mat, n, m)
    raise DegenerateSample(
        f"could not draw a full-rank ({n}, {m}) state in {RESAMPLE_ATTEMPTS} attempts"
    )


def random_separable_state(n: int, m: int, terms: int, seed) -> DensityMatrix:
    """Random convex combination of ``terms`` full-rank product states.

    Separable by construction and positive definite for any terms >= 1
    since every product factor is full rank.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(RESAMPLE_ATTEMPTS):
        weights = rng.dirichlet(np.ones(terms))
        acc = np.zeros((n * m, n * m), dtype=np.complex128)
        for p in weights:
            acc += p * np.kron(wishart_state_matrix(n, rng), wishart_state_matrix(m, rng))
        acc = matcore.hermitian_part(acc)
        acc /= np.trace(acc).real
        if np.linalg.eigvalsh(acc)[0] > FULL_RANK_FLOOR:
            return DensityMatrix(acc, n, m)
    raise DegenerateSample(
        f"could not draw a full-rank separable ({n}, {m}) state in {RESAMPLE_ATTEMPTS} attempts"
    )


def random_haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre sample with phase-fixed
    diagonal."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def state_to_dict(rho: DensityMatrix) -> dict:
    """Density-matrix JSON schema: {"dims": [n, m], "matrix": [[re, im] ...]}."""
    return {
        "dims": [rho.dim_a, rho.dim_b],
        "matrix": jsonio.complex_matrix_to_pairs(rho.mat),
    }


def state_from_dict(obj) -> DensityMatrix:
    """Parse and validate the density-matrix JSON schema.

    Files are checked at the looser 1e-8 tolerance (they may carry
    truncated decimals); accepted input is then symmetrized, clipped and
    renormalized so the strict internal invariants hold.
    """
    if not isinstance(obj, dict):
        raise InvalidInput("document: expected a JSON object")
    dims = obj.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != 2
        or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims)
    ):
        raise InvalidInput('dims: expected "dims": [n, m] with positive integers')
    n, m = int(dims[0]), int(dims[1])
    mat = jsonio.pairs_to_complex(obj.get("matrix"), what="matrix")
    d = n * m
    if mat.shape != (d, d):
        raise InvalidInput(
            f"dims: matrix has shape {mat.shape}, expected ({d}, {d}) for dims ({n}, {m})"
        )
    scale = matcore.max_abs(mat)
    if matcore.hermitian_defect(mat) > JSON_ATOL * max(scale, 1.0):
        raise NotHermitian(f"matrix is not Hermitian within {JSON_ATOL:g}")
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > JSON_ATOL:
        raise InvalidInput(f"trace: expected 1 within {JSON_ATOL:g}, got {tr.real:.12g}")
    h = matcore.hermitian_part(mat)
    w, v = np.linalg.eigh(h)
    if w[0] < -JSON_ATOL:
        raise NotPSD(f"PSD: minimum eigenvalue {w[0]:.3e} below {-JSON_ATOL:g}")
    # Repair file round-off: clip tiny negative eigenvalues, renormalize.
    w = np.clip(w, 0.0, None)
    h = (v * w) @ v.conj().T
    h = matcore.hermitian_part(h) / np.trace(h).real
    return DensityMatrix(h, n, m)
