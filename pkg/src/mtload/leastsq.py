"""Small dense nonlinear least squares.

Damped Gauss-Newton (Levenberg-style) iteration on a user-supplied
residual function; the residual callable is the whole contract. Jacobians
are numeric central differences with a relative step of 1e-6. Iteration is
declared converged when the relative parameter change falls below 1e-8 or
the relative change of the residual norm below 1e-10; exhausting the
iteration budget raises FitNotConvergedError carrying the best iterate.
No randomized restarts: results are deterministic functions of the input.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FitNotConvergedError

DEFAULT_MAX_ITER = 200
DEFAULT_XTOL = 1e-8
DEFAULT_FTOL = 1e-10
DEFAULT_REL_STEP = 1e-6

_LAMBDA0 = 1e-3
_LAMBDA_SHRINK = 0.3
_LAMBDA_GROW = 10.0
_LAMBDA_MAX = 1e12


@dataclass
class FitResult:
    """Fitted parameters with curvature-based standard errors.

    ``extras`` carries fitter-specific derived quantities (for example the
    loading rate R = N0/tau, or a fitted temperature).
    """

    params: dict[str, float]
    stderr: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int
    extras: dict = field(default_factory=dict)


def numeric_jacobian(residual_fn, x: np.ndarray,
                     rel_step: float = DEFAULT_REL_STEP) -> np.ndarray:
    """Central-difference Jacobian of the residual vector at x."""
    x = np.asarray(x, dtype=float)
    r0 = np.asarray(residual_fn(x), dtype=float)
    jac = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = rel_step * abs(x[j])
        if h == 0.0:
            h = rel_step
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        rp = np.asarray(residual_fn(xp), dtype=float)
        rm = np.asarray(residual_fn(xm), dtype=float)
        jac[:, j] = (rp - rm) / (xp[j] - xm[j])
    return jac


def _covariance(jac: np.ndarray, ssr: float) -> np.ndarray:
    m, n = jac.shape
    jtj = jac.T @ jac
    try:
        inv = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        inv = np.linalg.pinv(jtj)
    dof = m - n
    s2 = ssr / dof if dof > 0 else 0.0
    return s2 * inv


def least_squares(residual_fn, x0, names: tuple[str, ...], *,
                  max_iter: int = DEFAULT_MAX_ITER,
                  xtol: float = DEFAULT_XTOL,
                  ftol: float = DEFAULT_FTOL,
                  rel_step: float = DEFAULT_REL_STEP,
                  lower_bounds=None) -> FitResult:
    """Minimize sum(residual_fn(x)^2) starting at x0.

    ``lower_bounds`` (optional, per parameter) clamps trial iterates from
    below; a clamp that actually fired is flagged in
    ``extras['clamped']``.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1 or len(names) != x.size:
        raise ValueError("x0 and names must have matching lengths")
    bounds = None if lower_bounds is None else np.asarray(lower_bounds, float)
    if bounds is not None:
        x = np.maximum(x, bounds)

    r = np.asarray(residual_fn(x), dtype=float)
    ssr = float(r @ r)
    lam = _LAMBDA0
    clamped = False
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        jac = numeric_jacobian(residual_fn, x, rel_step)
        jtj = jac.T @ jac
        grad = jac.T @ r
        diag = np.diag(jtj).copy()
        diag[diag <= 0] = 1.0
        accepted = False
        while lam <= _LAMBDA_MAX:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= _LAMBDA_GROW
                continue
            x_new = x + step
            if bounds is not None:
                x_clamped = np.maximum(x_new, bounds)
                if np.any(x_clamped != x_new):
                    clamped = True
                x_new = x_clamped
            r_new = np.asarray(residual_fn(x_new), dtype=float)
            ssr_new = float(r_new @ r_new)
            if ssr_new <= ssr:
                accepted = True
                break
            lam *= _LAMBDA_GROW
        if not accepted:
            break

        dx_rel = np.max(np.abs(x_new - x) / np.maximum(np.abs(x_new), 1e-300))
        df_rel = abs(math.sqrt(ssr) - math.sqrt(ssr_new)) / max(
            math.sqrt(ssr), 1e-300)
        x, r, ssr = x_new, r_new, ssr_new
        lam = max(lam * _LAMBDA_SHRINK, 1e-12)
        if dx_rel < xtol or df_rel < ftol:
            converged = True
            break

    jac = numeric_jacobian(residual_fn, x, rel_step)
    cov = _covariance(jac, ssr)
    stderr = np.sqrt(np.maximum(np.diag(cov), 0.0))
    result = FitResult(
        params=dict(zip(names, x.tolist())),
        stderr=dict(zip(names, stderr.tolist())),
        residual_norm=math.sqrt(ssr),
        converged=converged,
        iterations=iterations,
        extras={"clamped": clamped} if clamped else {},
    )
    if not converged:
        raise FitNotConvergedError(
            f"no convergence within {max_iter} iterations "
            f"(residual norm {result.residual_norm:.6e})",
            best=result,
        )
    return result
