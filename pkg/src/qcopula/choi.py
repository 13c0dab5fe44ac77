"""Choi-matrix representation of linear maps M(n) -> M(m).

A map Phi is stored as the nm x nm block matrix whose (i, j) block of size
m x m equals Phi(E_ij); a bipartite state and the Choi matrix of its map
are the same array read two ways.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import ShapeMismatch, SingularTransform
from .states import DensityMatrix

CHOI_HERMITIAN_RTOL = 1e-10
CONDITION_CAP = 1e12
POSITIVITY_PROBE_RTOL = 1e-12


@dataclass(eq=False)
class ChoiOperator:
    """A linear map M(dim_in) -> M(dim_out) stored via its Choi matrix."""

    choi: np.ndarray
    dim_in: int
    dim_out: int
    hermitian: bool | None = None

    def __post_init__(self):
        self.choi = matcore.as_cmatrix(self.choi)
        d = self.dim_in * self.dim_out
        if self.choi.shape != (d, d):
            raise ShapeMismatch(
                f"Choi matrix has shape {self.choi.shape}, expected ({d}, {d})"
            )
        if self.hermitian is None:
            scale = matcore.max_abs(self.choi)
            self.hermitian = matcore.hermitian_defect(self.choi) <= CHOI_HERMITIAN_RTOL * scale

    def tensor_view(self) -> np.ndarray:
        return self.choi.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)

    def block(self, i: int, j: int) -> np.ndarray:
        """The m x m block Phi(E_ij)."""
        return self.tensor_view()[i, :, j, :]


def choi_from_state(rho: DensityMatrix) -> ChoiOperator:
    """Reinterpret a bipartite state as the Choi matrix of its map; no data
    transformation."""
    return ChoiOperator(rho.mat, rho.dim_a, rho.dim_b, hermitian=True)


def choi_from_map(fn, n: int, m: int) -> ChoiOperator:
    """Assemble the Choi matrix of an arbitrary map by feeding it every
    matrix unit E_ij; the direct-construction oracle for transform tests."""
    t = np.zeros((n, m, n, m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[i, j] = 1.0
            t[i, :, j, :] = np.asarray(fn(e), dtype=np.complex128)
    return ChoiOperator(t.reshape(n * m, n * m), n, m)


def apply(phi: ChoiOperator, x) -> np.ndarray:
    """Phi(X) = sum_ij X[i,j] * block_ij; returns an m x m matrix."""
    xm = matcore.as_cmatrix(x)
    n = phi.dim_in
    if xm.shape != (n, n):
        raise ShapeMismatch(f"input has shape {xm.shape}, expected ({n}, {n})")
    return np.einsum("ij,ikjl->kl", xm, phi.tensor_view())


def apply_via_partial_trace(phi: ChoiOperator, x) -> np.ndarray:
    """Equivalent formula Tr_1((X^T o I_m) choi); cross-check route only."""
    xm = matcore.as_cmatrix(x)
    n, m = phi.dim_in, phi.dim_out
    if xm.shape != (n, n):
        raise ShapeMismatch(f"input has shape {xm.shape}, expected ({n}, {n})")
    prod = np.kron(xm.T, np.eye(m)) @ phi.choi
    return np.einsum("ikil->kl", prod.reshape(n, m, n, m))


def apply_adjoint(phi: ChoiOperator, y) -> np.ndarray:
    """Hilbert-Schmidt adjoint: Phi*(Y)[i,j] = Tr(block_ij* Y), the unique
    map satisfying <Phi(X), Y> = <X, Phi*(Y)>."""
    ym = matcore.as_cmatrix(y)
    m = phi.dim_out
    if ym.shape != (m, m):
        raise ShapeMismatch(f"input has shape {ym.shape}, expected ({m}, {m})")
    return np.einsum("ikjl,kl->ij", np.conj(phi.tensor_view()), ym)


def adjoint(phi: ChoiOperator) -> ChoiOperator:
    """The adjoint map as a ChoiOperator from M(dim_out) to M(dim_in)."""
    t = np.conj(phi.tensor_view().transpose(1, 0, 3, 2))
    d = phi.dim_in * phi.dim_out
    return ChoiOperator(np.ascontiguousarray(t).reshape(d, d), phi.dim_out, phi.dim_in)


def sandwich_transform(phi: ChoiOperator, a, b) -> ChoiOperator:
    """Choi matrix of X -> B Phi(A X A*) B*, i.e. (A^T o B) choi (A^T o B)*.

    The transpose on the A side is entrywise (non-conjugate).
    """
    am = matcore.as_cmatrix(a)
    bm = matcore.as_cmatrix(b)
    n, m = phi.dim_in, phi.dim_out
    if am.shape != (n, n):
        raise ShapeMismatch(f"a has shape {am.shape}, expected ({n}, {n})")
    if bm.shape != (m, m):
        raise ShapeMismatch(f"b has shape {bm.shape}, expected ({m}, {m})")
    ca = float(np.linalg.cond(am, 2))
    cb = float(np.linalg.cond(bm, 2))
    if not np.isfinite(ca) or not np.isfinite(cb) or ca > CONDITION_CAP or cb > CONDITION_CAP:
        raise SingularTransform(
            f"transform matrices too ill-conditioned: cond(a)={ca:.3e}, cond(b)={cb:.3e}"
        )
    w = np.kron(am.T, bm)
    return ChoiOperator(w @ phi.choi @ w.conj().T, n, m)


def is_strictly_positive_sample(phi: ChoiOperator, trials: int, seed) -> bool:
    """Falsification probe for strict positivity.

    Feeds ``trials`` random rank-one projectors through the map and checks
    that every output is positive definite relative to its trace. Passing
    does not prove strict positivity; failing disproves it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n = phi.dim_in
    for _ in range(trials):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        out = matcore.hermitian_part(apply(phi, np.outer(v, v.conj())))
        w = np.linalg.eigvalsh(out)
        tr = float(np.trace(out).real)
        if w[0] <= POSITIVITY_PROBE_RTOL * tr:
            return False
    return True
