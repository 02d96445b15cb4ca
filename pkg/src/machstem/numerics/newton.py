"""
Damped Newton iteration shared by every nonlinear solve in the package.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from machstem.models.core import ConvergenceError, DomainError, SingularMatrixError
from machstem.utils.config import get_config
from machstem.utils.logging import get_logger

logger = get_logger("newton")

MAX_HALVINGS = 30


@dataclass
class NewtonResult:
    """Converged iterate with its scaled residual."""
    x: np.ndarray
    residual: float
    iterations: int


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    *,
    x_scale: np.ndarray,
    f_scale: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    trust_region: Optional[float] = None,
    label: str = "newton",
) -> NewtonResult:
    """Solve residual(x) = 0 from x0.

    Convergence is measured on the max-norm of residual / f_scale. Each step is
    clipped so that no component moves by more than trust_region * x_scale, then
    halved while the scaled 2-norm increases or the trial leaves the domain. One
    polishing step is taken after convergence when it does not raise the residual.
    """
    config = get_config()
    tol = config.newton_tol if tol is None else tol
    max_iter = config.newton_max_iter if max_iter is None else max_iter
    trust_region = config.trust_region if trust_region is None else trust_region

    x = np.asarray(x0, dtype=float).copy()
    f = residual(x) / f_scale
    norm = float(np.linalg.norm(f))

    for iteration in range(1, max_iter + 1):
        if float(np.max(np.abs(f))) <= tol:
            x, norm = _polish(residual, jacobian, x, norm, f_scale)
            logger.debug(f"{label}: converged in {iteration - 1} iterations, residual {norm:.3e}")
            return NewtonResult(x=x, residual=norm, iterations=iteration - 1)

        step = _newton_step(jacobian, x, f * f_scale, label)
        largest = float(np.max(np.abs(step) / x_scale))
        if largest > trust_region:
            step *= trust_region / largest

        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = x + t * step
            try:
                f_trial = residual(trial) / f_scale
            except DomainError:
                t *= 0.5
                continue
            norm_trial = float(np.linalg.norm(f_trial))
            if np.isfinite(norm_trial) and norm_trial < norm:
                x, f, norm = trial, f_trial, norm_trial
                break
            t *= 0.5
        else:
            if norm <= 100.0 * tol:
                logger.debug(f"{label}: stagnated at roundoff level {norm:.3e}")
                return NewtonResult(x=x, residual=norm, iterations=iteration)
            raise ConvergenceError(f"{label}: line search failed at residual {norm:.3e}")

        logger.debug(f"{label}: iteration {iteration}, residual {norm:.3e}, damping {t:g}")

    if float(np.max(np.abs(f))) <= tol:
        return NewtonResult(x=x, residual=norm, iterations=max_iter)
    raise ConvergenceError(f"{label}: no convergence in {max_iter} iterations (residual {norm:.3e})")


def _newton_step(
    jacobian: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    f: np.ndarray,
    label: str,
) -> np.ndarray:
    matrix = jacobian(x)
    try:
        step = np.linalg.solve(matrix, -f)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"{label}: singular Jacobian") from exc
    if not np.all(np.isfinite(step)):
        raise SingularMatrixError(f"{label}: non-finite Newton step")
    return np.asarray(step, dtype=float)


def _polish(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    norm: float,
    f_scale: np.ndarray,
) -> tuple[np.ndarray, float]:
    try:
        step = _newton_step(jacobian, x, residual(x), "polish")
        trial = x + step
        norm_trial = float(np.linalg.norm(residual(trial) / f_scale))
    except (DomainError, SingularMatrixError):
        return x, norm
    if np.isfinite(norm_trial) and norm_trial <= norm:
        return trial, norm_trial
    return x, norm
