"""The log-determinant objective, its gradients, and the minor-sum oracle.

For a frame {X_i} and per-block log scalings t, the scaled frame operator
is Q(t) = sum_i e^{t_i} X_i X_i^T and the potential is log det Q(t).
The scaling objective subtracts <t, c>; its infimum over t is finite
exactly when the weights c belong to the orbit polytope, and a minimiser
yields the radial-isotropy transformer Q^{-1/2}(t*).

Two independent evaluation routes are provided:

* the production path via symmetric eigendecomposition of Q(t), giving
  the potential and the gradient components e^{t_i} |Q^{-1/2}(t) X_i|_F^2;
* a combinatorial oracle that expands det Q(t) over all d-column
  selections from the pooled matrix (each selection contributes the
  squared d x d determinant of the chosen columns, scaled by
  e^{sum_l m_l t_l} where m_l counts columns taken from block l), and the
  matching ratio formula for the gradient.

The oracle is exponential in d and gated by a size guard; it exists to
cross-check the production path, not to replace it.  Oracle sums are
accumulated in log space so large scalings do not overflow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .frames import FrameDatum, MatrixFrame

# Eigenvalues below this fraction of the largest are treated as zero;
# the theory assumes Q(t) positive definite, we must fail loudly instead.
EIG_FLOOR = 1e-12

DEFAULT_SIZE_GUARD = 1_000_000


class NotPositiveDefiniteError(ValueError):
    """Raised when the scaled frame operator is singular within tolerance."""


class EnumerationSizeError(RuntimeError):
    """Raised when the minor enumeration would exceed the size guard."""


def scaled_frame_operator(frame: MatrixFrame, t) -> np.ndarray:
    """Q(t) = sum_i e^{t_i} X_i X_i^T, symmetrised.

    At t = 0 this is the frame operator.  Raises OverflowError when any
    e^{t_i} is non-finite; recentre t (the objective is invariant under
    adding a multiple of the all-ones vector when the weights sum to d).
    """
    t = _check_scalings(frame, t)
    with np.errstate(over="ignore"):
        scale = np.exp(t)
    if not np.all(np.isfinite(scale)):
        raise OverflowError("e^{t_i} overflowed; recentre the scalings")
    op = np.zeros((frame.d, frame.d))
    for s, block in zip(scale, frame.blocks):
        op += s * (block @ block.T)
    return (op + op.T) / 2.0


def _check_scalings(frame: MatrixFrame, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (frame.n,):
        raise ValueError(f"scalings must have shape ({frame.n},), got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("scalings must be finite")
    return t


def _pd_eigh(op: np.ndarray):
    eigvals, eigvecs = np.linalg.eigh(op)
    floor = EIG_FLOOR * max(eigvals[-1], 0.0)
    if eigvals[0] <= floor or eigvals[-1] <= 0.0:
        raise NotPositiveDefiniteError(
            f"operator not positive definite (eigenvalues {eigvals[0]:.3e}"
            f" .. {eigvals[-1]:.3e}); the frame is degenerate along this direction"
        )
    return eigvals, eigvecs


def sym_inverse_sqrt(op: np.ndarray) -> np.ndarray:
    """Inverse square root of a symmetric positive definite matrix."""
    eigvals, eigvecs = _pd_eigh(np.asarray(op, dtype=float))
    return (eigvecs * (eigvals**-0.5)) @ eigvecs.T


def log_det_potential(frame: MatrixFrame, t) -> float:
    """log det Q(t), computed from the eigenvalues of the symmetrised Q."""
    eigvals, _ = _pd_eigh(scaled_frame_operator(frame, t))
    return float(np.sum(np.log(eigvals)))


def log_det_potential_grad(frame: MatrixFrame, t) -> np.ndarray:
    """Gradient of the potential: component i is e^{t_i} |Q^{-1/2}(t) X_i|_F^2.

    The components always sum to d (trace identity).
    """
    t = _check_scalings(frame, t)
    eigvals, eigvecs = _pd_eigh(scaled_frame_operator(frame, t))
    grad = np.empty(frame.n)
    for i, block in enumerate(frame.blocks):
        rotated = eigvecs.T @ block
        grad[i] = math.exp(t[i]) * float(np.sum(rotated**2 / eigvals[:, None]))
    return grad


@dataclass(frozen=True, eq=False)
class ObjectiveState:
    """Scalings together with the operator, potential value and gradient."""

    t: np.ndarray
    operator: np.ndarray
    value: float
    grad: np.ndarray

    @classmethod
    def evaluate(cls, frame: MatrixFrame, t) -> "ObjectiveState":
        t = _check_scalings(frame, t)
        operator = scaled_frame_operator(frame, t)
        eigvals, eigvecs = _pd_eigh(operator)
        value = float(np.sum(np.log(eigvals)))
        grad = np.empty(frame.n)
        for i, block in enumerate(frame.blocks):
            rotated = eigvecs.T @ block
            grad[i] = math.exp(t[i]) * float(np.sum(rotated**2 / eigvals[:, None]))
        return cls(t=t, operator=operator, value=value, grad=grad)


@dataclass(frozen=True)
class MinorTerm:
    """One column selection of total size d with its squared determinant.

    ``support`` lists the blocks that contribute at least one column;
    ``column_sets`` gives, per support block, the within-block column
    indices.  ``value`` is the squared determinant of the selected d x d
    column matrix, hence nonnegative.  Terms at or below the enumeration
    tolerance are flagged ``negligible`` but never dropped.
    """

    support: tuple
    column_sets: tuple
    value: float
    negligible: bool

    def multiplicity(self, block: int) -> int:
        """Number of columns taken from ``block``."""
        try:
            return len(self.column_sets[self.support.index(block)])
        except ValueError:
            return 0


def enumerate_minors(
    frame: MatrixFrame,
    tol: float = 0.0,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> tuple:
    """All d-column selections of the pooled matrix with their squared minors.

    Selections are returned in lexicographic order of the pooled column
    indices.  Raises EnumerationSizeError when C(N, d) exceeds the guard.
    """
    n_cols = frame.total_cols
    if n_cols < frame.d:
        raise ValueError(f"undersized frame: N={n_cols} < d={frame.d}")
    count = math.comb(n_cols, frame.d)
    if count > size_guard:
        raise EnumerationSizeError(
            f"C({n_cols},{frame.d}) = {count} exceeds the size guard {size_guard}"
        )
    pooled = frame.pooled()
    owners = frame.column_owners()
    subsets = list(itertools.combinations(range(n_cols), frame.d))
    stacked = np.stack([pooled[:, s] for s in subsets])
    dets = np.linalg.det(stacked)

    terms = []
    for subset, det in zip(subsets, dets):
        per_block: dict = {}
        for col in subset:
            block, within = owners[col]
            per_block.setdefault(block, []).append(within)
        support = tuple(sorted(per_block))
        column_sets = tuple(tuple(per_block[b]) for b in support)
        value = float(det) ** 2
        terms.append(
            MinorTerm(
                support=support,
                column_sets=column_sets,
                value=value,
                negligible=value <= tol,
            )
        )
    return tuple(terms)


def _minor_arrays(frame: MatrixFrame, minors=None):
    """Multiplicity matrix (terms x n) and log values of the minor terms."""
    if minors is None:
        minors = enumerate_minors(frame)
    mult = np.zeros((len(minors), frame.n))
    log_values = np.full(len(minors), -np.inf)
    for row, term in enumerate(minors):
        for block, cols in zip(term.support, term.column_sets):
            mult[row, block] = len(cols)
        if term.value > 0.0:
            log_values[row] = math.log(term.value)
    return mult, log_values


def _logsumexp(exponents: np.ndarray, weights=None) -> float:
    """log sum_k w_k e^{a_k} for nonnegative weights, -inf when empty/zero."""
    finite = np.isfinite(exponents)
    if weights is not None:
        finite &= weights > 0.0
    if not np.any(finite):
        return -math.inf
    top = float(np.max(exponents[finite]))
    scaled = np.exp(exponents[finite] - top)
    if weights is not None:
        scaled = scaled * weights[finite]
    return top + math.log(float(np.sum(scaled)))


def det_via_minors(frame: MatrixFrame, t, minors=None) -> float:
    """det Q(t) as the minor sum; independent oracle for the direct value."""
    t = _check_scalings(frame, t)
    mult, log_values = _minor_arrays(frame, minors)
    log_det = _logsumexp(mult @ t + log_values)
    return 0.0 if log_det == -math.inf else math.exp(log_det)


def grad_via_minors(frame: MatrixFrame, t, minors=None) -> np.ndarray:
    """Gradient of the potential from the minor-sum ratio formula.

    Component i is the multiplicity-weighted share of block i in the
    minor sum.  Evaluated with log-sum-exp so large scalings survive.
    """
    t = _check_scalings(frame, t)
    mult, log_values = _minor_arrays(frame, minors)
    exponents = mult @ t + log_values
    log_den = _logsumexp(exponents)
    if log_den == -math.inf:
        raise NotPositiveDefiniteError("all minors vanish; not a matrix frame")
    grad = np.empty(frame.n)
    for i in range(frame.n):
        log_num = _logsumexp(exponents, mult[:, i])
        grad[i] = 0.0 if log_num == -math.inf else math.exp(log_num - log_den)
    return grad


def scaling_objective(datum: FrameDatum, t) -> float:
    """Potential minus <t, c>; the function the isotropy solver minimises.

    Invariant under t -> t + s*1 whenever the weights sum to d.
    """
    value = log_det_potential(datum.frame, t)
    return value - float(np.dot(np.asarray(t, dtype=float), datum.weights.as_floats()))


def log_capacity(datum: FrameDatum, f_value: float) -> float:
    """Log capacity from the objective infimum: f + sum_i c_i log c_i.

    A -inf infimum (weights outside the polytope) propagates to -inf,
    the zero-capacity convention.
    """
    if f_value == -math.inf:
        return -math.inf
    entropy = sum(float(c) * math.log(float(c)) for c in datum.weights.weights)
    return float(f_value) + entropy
