"""Orbit-polytope membership and stability certificates for frame data.

The orbit polytope of a frame consists of the nonnegative weight vectors
summing to d whose subset sums are bounded by the corresponding
column-span dimensions.  Membership of a positive rational weight vector
is equivalent to semi-stability of the frame's quiver representation,
and membership in the relative interior characterises transformability
into a radial isotropic frame (for locally semi-simple representations).

Subset enumeration is exact over all 2^n - 1 nonempty subsets, which is
acceptable for n up to ~20; the comparisons themselves are exact
rational-vs-integer, only the span ranks carry a numeric tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .frames import DEFAULT_TOL, FrameDatum, MatrixFrame, column_span_dim, is_generic


@dataclass(frozen=True)
class PolytopeReport:
    """Outcome of the membership test.

    ``tight_subsets`` lists the proper nonempty subsets whose weight sum
    equals the span bound; the full set [n] is excluded because its
    constraint is forced tight by the sum condition.  ``violating_subsets``
    lists every subset (including [n]) whose weight sum exceeds the bound.
    Subsets are 0-based index tuples in lexicographic order.
    """

    member: bool
    sum_check: bool
    tight_subsets: tuple
    violating_subsets: tuple


def in_orbit_polytope(datum: FrameDatum, tol: float = DEFAULT_TOL) -> PolytopeReport:
    """Exact membership test of the weights in the frame's orbit polytope."""
    frame, weights = datum.frame, datum.weights
    n = frame.n
    sum_check = weights.total() == Fraction(frame.d)

    tight = []
    violating = []
    full = tuple(range(n))
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            weight_sum = sum((weights.weights[i] for i in subset), Fraction(0))
            rank = column_span_dim(frame, subset, tol)
            if weight_sum > rank:
                violating.append(subset)
            elif weight_sum == rank and subset != full:
                tight.append(subset)

    member = sum_check and not violating
    return PolytopeReport(
        member=member,
        sum_check=sum_check,
        tight_subsets=tuple(sorted(tight)),
        violating_subsets=tuple(sorted(violating)),
    )


def in_relative_interior(datum: FrameDatum, tol: float = DEFAULT_TOL) -> bool:
    """True when the weights lie in the relative interior of the polytope.

    Requires membership, and every proper subset constraint whose span
    rank is below d must be strict.  Constraints with rank d cannot cut
    the affine slice further than the sum condition already does, so a
    tight one among them is ignored (it can only be tight for the full
    set, which positive weights exclude anyway).
    """
    report = in_orbit_polytope(datum, tol)
    if not report.member:
        return False
    for subset in report.tight_subsets:
        if column_span_dim(datum.frame, subset, tol) < datum.frame.d:
            return False
    return True


def has_stability_certificate(frame: MatrixFrame, tol: float = DEFAULT_TOL) -> bool:
    """Genericity certificate for stability of the frame's representation.

    A generic frame (every d pooled columns form a basis) is stable for
    the uniform integer weight, hence locally semi-simple, which is the
    hypothesis needed for the radial-isotropy equivalences.  Requires
    more blocks than rows.
    """
    if frame.n <= frame.d:
        raise ValueError(f"certificate needs n > d, got n={frame.n}, d={frame.d}")
    return is_generic(frame, tol)
