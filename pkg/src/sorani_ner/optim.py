"""Limited-memory quasi-Newton minimization with optional L1 regularization.

Minimizes F(x) = f(x) + l1 * ||x||_1 where f is smooth and supplied by the
caller as a value-and-gradient callable.  With l1 = 0 this is plain L-BFGS
with a backtracking Armijo line search; with l1 > 0 the orthant-wise variant
(OWL-QN) is used: steepest descent is taken on the pseudo-gradient, search
directions are confined to the current orthant, and iterates are projected so
coordinates never cross zero, which is what produces exact zeros.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from collections.abc import Callable

import numpy as np

from .validation import NumericalError

FunGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]

_CURVATURE_EPS = 1e-10
_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60
_GRAD_TOL = 1e-8


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    n_iterations: int
    converged: bool
    message: str
    objective_path: list[float] = field(default_factory=list)


def _pseudo_gradient(x: np.ndarray, grad: np.ndarray, l1: float) -> np.ndarray:
    """Directional derivative surrogate for f + l1*||.||_1.

    At nonzero coordinates this is grad + l1*sign(x).  At zeros the L1 term is
    non-differentiable: take the one-sided derivative of smaller magnitude, or
    0 when the subdifferential contains 0 (no descent available there).
    """
    if l1 == 0.0:
        return grad
    pg = np.where(x > 0.0, grad + l1, np.where(x < 0.0, grad - l1, 0.0))
    at_zero = x == 0.0
    plus = grad[at_zero] + l1
    minus = grad[at_zero] - l1
    pg_zero = np.where(minus > 0.0, minus, np.where(plus < 0.0, plus, 0.0))
    pg[at_zero] = pg_zero
    return pg


def _two_loop_direction(pg: np.ndarray, s_hist: deque, y_hist: deque, rho_hist: deque) -> np.ndarray:
    q = pg.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if y_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def minimize(fun_grad: FunGrad, x0: np.ndarray, *, l1: float = 0.0,
             max_iterations: int = 200, tol: float = 1e-5,
             memory: int = 10) -> OptimResult:
    """Minimize f(x) + l1*||x||_1 from x0.

    Stops when the relative objective change falls below tol, the
    pseudo-gradient vanishes, or max_iterations is reached.  The returned
    objective_path holds the full objective at x0 and after every accepted
    step; it is non-increasing by construction (Armijo acceptance).

    Raises NumericalError, naming the iteration, if the objective or gradient
    turns non-finite.
    """
    if l1 < 0.0:
        raise ValueError("l1 must be >= 0")
    x = np.asarray(x0, dtype=np.float64).copy()
    f, grad = fun_grad(x)
    if not np.isfinite(f) or not np.all(np.isfinite(grad)):
        raise NumericalError("non-finite objective at iteration 0")
    total = f + l1 * np.abs(x).sum()
    path = [total]

    s_hist: deque = deque(maxlen=memory)
    y_hist: deque = deque(maxlen=memory)
    rho_hist: deque = deque(maxlen=memory)

    converged = False
    message = "max iterations reached"
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        pg = _pseudo_gradient(x, grad, l1)
        if np.max(np.abs(pg), initial=0.0) < _GRAD_TOL:
            converged, message = True, "gradient tolerance reached"
            break

        d = _two_loop_direction(pg, s_hist, y_hist, rho_hist)
        if l1 > 0.0:
            # Constrain the direction to descend w.r.t. the pseudo-gradient.
            d[d * pg >= 0.0] = 0.0
        if np.dot(d, pg) >= 0.0:
            d = -pg

        if l1 > 0.0:
            orthant = np.where(x != 0.0, np.sign(x), -np.sign(pg))

        alpha = 1.0 if s_hist else min(1.0, 1.0 / np.abs(pg).sum())
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            x_new = x + alpha * d
            if l1 > 0.0:
                x_new[x_new * orthant <= 0.0] = 0.0
            f_new, grad_new = fun_grad(x_new)
            if not np.isfinite(f_new):
                raise NumericalError(f"non-finite objective at iteration {iteration}")
            total_new = f_new + l1 * np.abs(x_new).sum()
            if total_new <= total + _ARMIJO_C1 * np.dot(pg, x_new - x):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            message = "line search failed to find sufficient decrease"
            break
        if not np.all(np.isfinite(grad_new)):
            raise NumericalError(f"non-finite gradient at iteration {iteration}")

        s = x_new - x
        y = grad_new - grad
        sy = np.dot(s, y)
        if sy > _CURVATURE_EPS:
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)

        rel_change = abs(total - total_new) / max(1.0, abs(total), abs(total_new))
        x, f, grad, total = x_new, f_new, grad_new, total_new
        path.append(total)
        if rel_change < tol:
            converged, message = True, "objective tolerance reached"
            break

    return OptimResult(x, total, iteration, converged, message, path)
