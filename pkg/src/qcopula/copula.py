"""Copula construction for full-rank bipartite states.

Pipeline: read the state as a map Phi, iterate the contraction
T = inv o Phi* o inv o Phi to its unique fixed ray, extract the scaling
pair (phi0, phi1) solving

    Phi(phi0^{-1}) = (1/m) phi1^{-1}        Phi*(phi1) = (1/n) phi0,

factor phi_k = psi_k* psi_k, and conjugate the state by
(psi0^{-1})^T o psi1 to reach the unique-up-to-local-unitaries
representative with maximally mixed marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import choi as choimod
from . import matcore, pmetric, states
from .errors import (
    InvalidInput,
    NotConverged,
    NotPrecopula,
    PrecopulaCheckFailed,
    RankDeficient,
    ShapeMismatch,
    SingularIntermediate,
    VerificationFailed,
)

SINGULAR_EIG_RTOL = 1e-14
SCALING_EQ_RTOL = 1e-9
PRECOPULA_TOL = 1e-8

_CONFIG_FIELDS = ("tol", "marginal_tol", "max_iter", "rank_tol", "regularize", "reg_eps")


@dataclass
class SolverConfig:
    """Solver knobs; mirrored field-for-field by the CLI JSON config."""

    tol: float = 1e-12
    marginal_tol: float = 1e-10
    max_iter: int = 1000
    rank_tol: float = 1e-10
    regularize: bool = False
    reg_eps: float = 1e-8

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _CONFIG_FIELDS}

    @classmethod
    def from_dict(cls, obj, base: "SolverConfig | None" = None) -> "SolverConfig":
        if not isinstance(obj, dict):
            raise InvalidInput("config: expected a JSON object")
        cfg = SolverConfig() if base is None else SolverConfig(**base.to_dict())
        for key, value in obj.items():
            if key not in _CONFIG_FIELDS:
                raise InvalidInput(f"config: unknown field {key!r}")
            if key in ("regularize",):
                if not isinstance(value, bool):
                    raise InvalidInput(f"config: {key} must be a boolean")
                setattr(cfg, key, value)
            elif key in ("max_iter",):
                if not isinstance(value, int) or isinstance(value, bool):
                    raise InvalidInput(f"config: {key} must be an integer")
                setattr(cfg, key, value)
            else:
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise InvalidInput(f"config: {key} must be a number")
                setattr(cfg, key, float(value))
        return cfg


@dataclass
class FixedPointReport:
    """Outcome of the contraction iteration."""

    phi_ray: np.ndarray  # trace-one positive-definite fixed point, n x n
    lam: float  # scale of one extra map application at the fixed point
    iterations: int
    final_step: float  # projective distance between the last two iterates
    converged: bool
    step_history: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class ScalerPair:
    """Positive-definite scaling matrices and their chosen factors."""

    phi0: np.ndarray
    phi1: np.ndarray
    psi0: np.ndarray
    psi1: np.ndarray
    residual_forward: float
    residual_adjoint: float


@dataclass
class CopulaResult:
    """Precopula representative plus everything needed to audit the run."""

    chi: states.DensityMatrix
    scalers: ScalerPair
    report: FixedPointReport
    marginal_residual: float
    regularized: bool = False
    reg_eps: float = 0.0


def _inv_pd(mat: np.ndarray, context: str) -> np.ndarray:
    """Inverse of a positive-definite matrix; eigenvalues below the relative
    floor signal a near-rank-deficient input upstream."""
    h = matcore.hermitian_part(mat)
    w, v = np.linalg.eigh(h)
    if w[-1] <= 0.0 or w[0] <= SINGULAR_EIG_RTOL * w[-1]:
        raise SingularIntermediate(
            f"{context}: eigenvalue {w[0]:.3e} below {SINGULAR_EIG_RTOL:g} of maximum "
            f"{w[-1]:.3e}; the input state is likely near rank deficiency "
            "(consider regularize=True)"
        )
    return (v * (1.0 / w)) @ v.conj().T


def _apply_t(phi: choimod.ChoiOperator, x: np.ndarray) -> np.ndarray:
    """One application of T = inv o Phi* o inv o Phi."""
    forward = _inv_pd(choimod.apply(phi, x), "forward image")
    back = _inv_pd(choimod.apply_adjoint(phi, forward), "adjoint image")
    return matcore.hermitian_part(back)


def fixed_point_iterate(
    phi: choimod.ChoiOperator,
    tol: float = 1e-12,
    max_iter: int = 1000,
    init=None,
) -> FixedPointReport:
    """Iterate x -> T(x)/Tr T(x) until successive iterates are within
    ``tol`` in the projective metric.

    Trace normalization is projectively inert; it only prevents float
    overflow across iterations. ``lam`` is read off after convergence from
    a single extra application of T to the trace-one fixed point.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    n = phi.dim_in
    if init is None:
        x = np.eye(n, dtype=np.complex128) / n
    else:
        x = matcore.require_hermitian(init, what="init")
        if x.shape != (n, n):
            raise ShapeMismatch(f"init has shape {x.shape}, expected ({n}, {n})")
        if np.linalg.eigvalsh(x)[0] <= 0.0:
            raise ValueError("init must be positive definite")
        x = x / np.trace(x).real
    steps: list[float] = []
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        t = _apply_t(phi, x)
        x_next = t / np.trace(t).real
        step = pmetric.hilbert_distance(x_next, x)
        steps.append(step)
        x = x_next
        if step <= tol:
            converged = True
            break
    lam = float(np.trace(_apply_t(phi, x)).real)
    return FixedPointReport(
        phi_ray=x,
        lam=lam,
        iterations=iterations,
        final_step=steps[-1] if steps else 0.0,
        converged=converged,
        step_history=np.asarray(steps),
    )


def scaling_equation_residuals(
    phi: choimod.ChoiOperator, phi0: np.ndarray, phi1: np.ndarray
) -> tuple[float, float]:
    """Relative Frobenius residuals of the two defining equations for the
    scaling pair."""
    n, m = phi.dim_in, phi.dim_out
    lhs1 = choimod.apply(phi, _inv_pd(phi0, "phi0"))
    rhs1 = _inv_pd(phi1, "phi1") / m
    res1 = float(np.linalg.norm(lhs1 - rhs1) / np.linalg.norm(rhs1))
    lhs2 = choimod.apply_adjoint(phi, phi1)
    rhs2 = phi0 / n
    res2 = float(np.linalg.norm(lhs2 - rhs2) / np.linalg.norm(rhs2))
    return res1, res2


def extract_scalers(
    phi: choimod.ChoiOperator,
    report: FixedPointReport,
    factorization: str = "sqrt",
) -> ScalerPair:
    """Build (phi0, phi1) from the fixed ray and factor them.

    phi1 = (1/m) (Phi(phi_ray))^{-1} and phi0 = n Phi*(phi1); both defining
    equations are re-checked at 1e-9 relative before returning.
    """
    if not report.converged:
        raise NotConverged("scaling matrices require a converged fixed point", report=report)
    n, m = phi.dim_in, phi.dim_out
    phi1 = matcore.hermitian_part(_inv_pd(choimod.apply(phi, report.phi_ray), "forward image") / m)
    phi0 = matcore.hermitian_part(n * choimod.apply_adjoint(phi, phi1))
    res1, res2 = scaling_equation_residuals(phi, phi0, phi1)
    if res1 > SCALING_EQ_RTOL or res2 > SCALING_EQ_RTOL:
        raise VerificationFailed(
            f"scaling equations missed {SCALING_EQ_RTOL:g} relative: "
            f"forward {res1:.3e}, adjoint {res2:.3e}"
        )
    psi0 = matcore.cholesky_like_factor(phi0, factorization)
    psi1 = matcore.cholesky_like_factor(phi1, factorization)
    return ScalerPair(phi0, phi1, psi0, psi1, res1, res2)


def connection_matrices(scalers: ScalerPair) -> tuple[np.ndarray, np.ndarray]:
    """Invertible (a, b) with (a* o b*) rho (a o b) = chi for the run that
    produced ``scalers``."""
    a = np.conj(np.linalg.inv(scalers.psi0))
    b = scalers.psi1.conj().T
    return a, b


def copula_of(
    rho: states.DensityMatrix,
    cfg: SolverConfig | None = None,
    *,
    factorization: str = "sqrt",
) -> CopulaResult:
    """Compute the uniform-marginal representative connected to ``rho``.

    Requires a full-rank input; with ``cfg.regularize`` the state is first
    mixed with eps * I/(nm) and the result is (explicitly) the copula of
    the perturbed state.
    """
    cfg = SolverConfig() if cfg is None else cfg
    n, m = rho.dim_a, rho.dim_b
    work = rho
    regularized = False
    if cfg.regularize:
        eps = cfg.reg_eps
        mixed = (1.0 - eps) * rho.mat + eps * np.eye(rho.dim) / rho.dim
        work = states.DensityMatrix(matcore.hermitian_part(mixed), n, m)
        regularized = True
    else:
        w = np.linalg.eigvalsh(matcore.hermitian_part(rho.mat))
        if w[0] <= cfg.rank_tol * max(float(w[-1]), 0.0):
            raise RankDeficient(
                f"state eigenvalue floor {w[0]:.3e} is below rank_tol={cfg.rank_tol:g} "
                f"of the top eigenvalue; pass regularize=True to proceed on a perturbed state"
            )
    phi = choimod.choi_from_state(work)
    report = fixed_point_iterate(phi, tol=cfg.tol, max_iter=cfg.max_iter)
    if not report.converged:
        raise NotConverged(
            f"fixed point not reached in {cfg.max_iter} iterations "
            f"(last step {report.final_step:.3e} > tol {cfg.tol:g})",
            report=report,
        )
    scalers = extract_scalers(phi, report, factorization)
    # Entrywise (non-conjugate) transpose on the first factor; conjugating
    # here breaks marginal uniformity for complex-valued states.
    left = matcore.kron(np.linalg.inv(scalers.psi0).T, scalers.psi1)
    raw = matcore.hermitian_part(left @ work.mat @ left.conj().T)
    raw /= np.trace(raw).real
    chi = states.DensityMatrix(raw, n, m)
    residual = max(states.marginal_residuals(chi))
    if residual > cfg.marginal_tol:
        raise PrecopulaCheckFailed(
            f"converged run produced marginal residual {residual:.3e} "
            f"> {cfg.marginal_tol:g}; this indicates a bug"
        )
    return CopulaResult(
        chi=chi,
        scalers=scalers,
        report=report,
        marginal_residual=residual,
        regularized=regularized,
        reg_eps=cfg.reg_eps if regularized else 0.0,
    )


def verify_connection(
    rho: states.DensityMatrix, chi: states.DensityMatrix, a, b
) -> float:
    """Frobenius distance between the trace-normalized conjugate
    (a* o b*) rho (a o b) and ``chi``."""
    am = matcore.as_cmatrix(a)
    bm = matcore.as_cmatrix(b)
    if am.shape != (rho.dim_a, rho.dim_a):
        raise ShapeMismatch(f"a has shape {am.shape}, expected ({rho.dim_a}, {rho.dim_a})")
    if bm.shape != (rho.dim_b, rho.dim_b):
        raise ShapeMismatch(f"b has shape {bm.shape}, expected ({rho.dim_b}, {rho.dim_b})")
    k = np.kron(am, bm)
    lhs = k.conj().T @ rho.mat @ k
    tr = float(np.trace(lhs).real)
    if tr <= 0.0:
        raise ValueError("conjugated state has non-positive trace")
    return float(np.linalg.norm(lhs / tr - chi.mat))


def copula_invariants(chi: states.DensityMatrix, tol: float = PRECOPULA_TOL) -> np.ndarray:
    """Local-unitary-invariant fingerprint of a precopula: sorted global
    spectrum, Tr(chi^2), Tr(chi^3), and the sorted partial-transpose
    spectrum. Equal fingerprints are necessary (not sufficient) for two
    precopulas to represent the same copula class."""
    if not states.is_precopula(chi, tol):
        raise NotPrecopula(f"marginals are not uniform within {tol:g}")
    spectrum = np.sort(np.linalg.eigvalsh(matcore.hermitian_part(chi.mat)))
    pt = np.sort(np.linalg.eigvalsh(matcore.hermitian_part(states.partial_transpose(chi))))
    sq = chi.mat @ chi.mat
    powers = [float(np.trace(sq).real), float(np.trace(sq @ chi.mat).real)]
    return np.concatenate([spectrum, powers, pt])
