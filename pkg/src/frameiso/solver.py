"""Minimisation of the scaling objective and extraction of the transformer.

Plain gradient descent with Armijo backtracking on t -> potential(t) - <t, c>.
Convergence is declared on the gradient (grad potential - c), which up to
scaling is exactly the radial-isotropy residual users care about.  Each
iterate is recentred so <t, c> = 0; the objective is invariant under that
gauge when the weights sum to d, and recentring keeps the iterates bounded
whenever a minimiser exists.

When the weights fail the orbit-polytope test the infimum is -inf and the
solver reports ``not_semistable`` without iterating (the polytope test is
the exact certificate; divergence detection is corroboration only).  A
quasi-second-order step using the analytic Hessian is available behind
``method="newton"`` for stiff instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .frames import DEFAULT_TOL, FrameDatum, MatrixFrame, apply_transform, is_matrix_frame
from .objective import (
    NotPositiveDefiniteError,
    _pd_eigh,
    grad_via_minors,
    log_det_potential_grad,
    scaled_frame_operator,
    sym_inverse_sqrt,
)
from .polytope import PolytopeReport, in_orbit_polytope

STATUS_CONVERGED = "converged"
STATUS_UNBOUNDED = "unbounded_below"
STATUS_MAX_ITERS = "max_iters"
STATUS_NOT_SEMISTABLE = "not_semistable"


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the descent loop.

    ``grad_tol`` defaults to 1e-9 * d when left at None.  ``scaling_cap``
    bounds the recentred iterates; e^{+-50} already exceeds what doubles
    can usefully represent, so crossing it is treated as divergence.
    """

    grad_tol: Optional[float] = None
    max_iters: int = 100_000
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    init_step: float = 1.0
    unbounded_floor: float = -1e6
    scaling_cap: float = 50.0
    pre_normalize: bool = False
    check_polytope: bool = True
    rank_tol: float = DEFAULT_TOL
    method: str = "gd"

    def effective_grad_tol(self, d: int) -> float:
        return self.grad_tol if self.grad_tol is not None else 1e-9 * d


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of a minimisation.

    ``transformer`` is the symmetric positive definite inverse square
    root of the scaled frame operator at ``t_star``; applying it to the
    frame yields a radial isotropic frame when ``status`` is converged.
    ``extremisers`` are the positive scalars 1 / |transformer @ X_i|_F^2;
    at a true minimiser e^{t*_i} / Y_i = c_i.  ``objective_history``
    records the accepted objective values for descent diagnostics.
    """

    t_star: np.ndarray
    transformer: Optional[np.ndarray]
    objective_value: float
    grad_norm: float
    extremisers: Optional[np.ndarray]
    status: str
    iterations: int
    grad_tol: float
    objective_history: np.ndarray
    polytope: Optional[PolytopeReport]


def recenter(t: np.ndarray, weight_floats: np.ndarray, d: int) -> np.ndarray:
    """Shift t along the all-ones direction so that <t, c> = 0."""
    return t - (float(np.dot(t, weight_floats)) / d)


def _hessian(frame: MatrixFrame, t: np.ndarray) -> np.ndarray:
    """Analytic Hessian of the potential: diag(g) - K with
    K_ij = e^{t_i+t_j} tr(Q^{-1} B_i Q^{-1} B_j)."""
    eigvals, eigvecs = _pd_eigh(scaled_frame_operator(frame, t))
    inv = (eigvecs / eigvals) @ eigvecs.T
    n = frame.n
    scaled = [math.exp(t[i]) * (inv @ frame.blocks[i]) for i in range(n)]
    grad = np.array([float(np.sum(frame.blocks[i] * scaled[i])) for i in range(n)])
    hess = np.diag(grad)
    for i in range(n):
        for j in range(i, n):
            left = frame.blocks[i].T @ scaled[j]
            right = frame.blocks[j].T @ scaled[i]
            hess[i, j] -= float(np.sum(left * right.T))
            hess[j, i] = hess[i, j]
    return hess


def minimize(datum: FrameDatum, config: Optional[SolverConfig] = None) -> SolveResult:
    """Minimise the scaling objective for the given weighted frame."""
    if config is None:
        config = SolverConfig()
    if config.method not in ("gd", "newton"):
        raise ValueError(f"unknown method {config.method!r}")
    frame, weights = datum.frame, datum.weights
    d = frame.d
    if weights.total() != Fraction(d):
        raise ValueError(f"weights sum to {weights.total()}, need exactly {d}")
    if not is_matrix_frame(frame, config.rank_tol):
        raise ValueError("not a matrix frame: frame operator is not positive definite")

    grad_tol = config.effective_grad_tol(d)
    polytope_report: Optional[PolytopeReport] = None
    if config.check_polytope:
        polytope_report = in_orbit_polytope(datum, config.rank_tol)
        if not polytope_report.member:
            return SolveResult(
                t_star=np.zeros(frame.n),
                transformer=None,
                objective_value=math.nan,
                grad_norm=math.nan,
                extremisers=None,
                status=STATUS_NOT_SEMISTABLE,
                iterations=0,
                grad_tol=grad_tol,
                objective_history=np.empty(0),
                polytope=polytope_report,
            )

    # Optional gauge: solve for the block-normalised frame, then shift the
    # scalings back.  The transformer is identical either way.
    shift = np.zeros(frame.n)
    work = frame
    if config.pre_normalize:
        norms = np.array([np.linalg.norm(b) for b in frame.blocks])
        if np.any(norms == 0.0):
            raise ValueError("cannot pre-normalise a frame with a zero block")
        work = MatrixFrame(d, tuple(b / s for b, s in zip(frame.blocks, norms)))
        shift = -2.0 * np.log(norms)

    c_floats = weights.as_floats()
    t = recenter(np.zeros(frame.n), c_floats, d)
    state_grad = log_det_potential_grad(work, t)
    value = _objective_value(work, t, c_floats)
    history = [value]
    status = STATUS_MAX_ITERS
    iterations = 0
    pd_wall_streak = 0
    # Divergence is a matter of certificate, not just of reaching the cap:
    # infeasible weights drive the iterates along the edge of the positive
    # definite cone, where the eigenvalue floor blocks every full step long
    # before |t|_inf can reach the cap.  A run of full-step floor rejections
    # with a still-large gradient is therefore treated as divergence too.
    wall_grad_floor = max(1e3 * grad_tol, 1e-6)

    for iterations in range(1, config.max_iters + 1):
        gradient = state_grad - c_floats
        grad_norm = float(np.linalg.norm(gradient))
        if grad_norm <= grad_tol:
            status = STATUS_CONVERGED
            iterations -= 1
            break

        if config.method == "newton":
            direction = _newton_direction(work, t, gradient)
        else:
            direction = -gradient

        step, new_t, new_value, full_step_floored = _line_search(
            work, t, value, gradient, direction, c_floats, config
        )
        if step is None:
            if full_step_floored and grad_norm > wall_grad_floor:
                status = STATUS_UNBOUNDED
                break
            # The objective can no longer resolve differences this small,
            # but the gradient still can: take the full step whenever it
            # shrinks the gradient norm, otherwise give up as stalled.
            trial = t + config.init_step * direction
            try:
                trial_grad = log_det_potential_grad(work, trial)
            except (NotPositiveDefiniteError, OverflowError):
                if grad_norm > wall_grad_floor:
                    status = STATUS_UNBOUNDED
                break
            if float(np.linalg.norm(trial_grad - c_floats)) >= grad_norm:
                break
            t = recenter(trial, c_floats, d)
            state_grad = trial_grad
            history.append(value)
            continue
        pd_wall_streak = pd_wall_streak + 1 if full_step_floored else 0
        if pd_wall_streak >= 5 and grad_norm > wall_grad_floor:
            status = STATUS_UNBOUNDED
            break

        # Recentring adds a multiple of the all-ones vector, which leaves
        # the objective unchanged; reuse the line-search value.
        t = recenter(new_t, c_floats, d)
        value = new_value
        history.append(value)

        if float(np.max(np.abs(t))) > config.scaling_cap or value < config.unbounded_floor:
            status = STATUS_UNBOUNDED
            break
        try:
            state_grad = log_det_potential_grad(work, t)
        except NotPositiveDefiniteError:
            # Numerically singular along the current drift: divergence.
            status = STATUS_UNBOUNDED
            break
    else:
        iterations = config.max_iters

    if status == STATUS_UNBOUNDED and polytope_report is None:
        # Cross-check divergence against the exact certificate.
        polytope_report = in_orbit_polytope(datum, config.rank_tol)

    # Express the result for the original frame regardless of the gauge.
    t_out = recenter(t + shift, c_floats, d)
    objective_value = value - float(np.dot(shift, c_floats))
    grad_norm = float(np.linalg.norm(state_grad - c_floats))
    transformer = None
    extremisers = None
    if status in (STATUS_CONVERGED, STATUS_MAX_ITERS):
        try:
            transformer = sym_inverse_sqrt(scaled_frame_operator(frame, t_out))
            residual_norms = np.array(
                [float(np.sum((transformer @ b) ** 2)) for b in frame.blocks]
            )
            extremisers = 1.0 / residual_norms
            grad_norm = float(
                np.linalg.norm(np.exp(t_out) * residual_norms - c_floats)
            )
        except NotPositiveDefiniteError:
            # Stalled at the edge of the cone; leave the transformer unset.
            transformer = None
            extremisers = None
    return SolveResult(
        t_star=t_out,
        transformer=transformer,
        objective_value=objective_value,
        grad_norm=grad_norm,
        extremisers=extremisers,
        status=status,
        iterations=iterations,
        grad_tol=grad_tol,
        objective_history=np.array(history),
        polytope=polytope_report,
    )


def _objective_value(frame: MatrixFrame, t: np.ndarray, c_floats: np.ndarray) -> float:
    eigvals, _ = _pd_eigh(scaled_frame_operator(frame, t))
    return float(np.sum(np.log(eigvals)) - np.dot(t, c_floats))


def _newton_direction(frame, t, gradient):
    hess = _hessian(frame, t)
    # The Hessian is singular along the all-ones gauge direction.
    direction = -np.linalg.lstsq(hess, gradient, rcond=1e-12)[0]
    if float(np.dot(direction, gradient)) >= 0.0:
        return -gradient
    return direction


def _line_search(frame, t, value, gradient, direction, c_floats, config):
    """Armijo backtracking.

    Returns (step, new_t, new_value, full_step_floored); the last flag
    records whether the initial (largest) trial was rejected by the
    positive-definiteness floor, the signature of sliding along the edge
    of the cone.  Returns (None, None, None, flag) when no step succeeds.
    """
    slope = float(np.dot(gradient, direction))
    step = config.init_step
    full_step_floored = False
    first = True
    # Differences below float resolution of the objective cannot be
    # compared meaningfully; accept non-increase there so descent can
    # continue into the last digits.
    resolution = 256.0 * np.finfo(float).eps * max(1.0, abs(value))
    while step > 1e-20:
        trial = t + step * direction
        try:
            trial_value = _objective_value(frame, trial, c_floats)
        except (NotPositiveDefiniteError, OverflowError):
            if first:
                full_step_floored = True
            first = False
            step *= config.backtrack
            continue
        first = False
        required = value + config.armijo_c1 * step * slope
        if trial_value <= required:
            return step, trial, trial_value, full_step_floored
        if config.armijo_c1 * step * abs(slope) < resolution and trial_value <= value + resolution:
            return step, trial, trial_value, full_step_floored
        step *= config.backtrack
    return None, None, None, full_step_floored


def stationarity_residual(datum: FrameDatum, t, minors=None) -> np.ndarray:
    """Residual of the minimiser characterisation in the exponentiated scalings.

    Component i is the minor-sum share of block i minus c_i (the minor
    sums normalised by their total); all components vanish exactly at a
    minimiser of the scaling objective.
    """
    grad = grad_via_minors(datum.frame, t, minors)
    return grad - datum.weights.as_floats()


def to_radial_isotropic(datum: FrameDatum, result: SolveResult) -> MatrixFrame:
    """Apply the converged transformer to the frame."""
    if result.status != STATUS_CONVERGED:
        raise ValueError(f"solver did not converge (status={result.status})")
    return apply_transform(result.transformer, datum.frame)
