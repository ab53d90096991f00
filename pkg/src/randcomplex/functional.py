"""Simplex counts, generalized Euler characteristics, difference operators.

The k-th order difference operator is the alternating sum of a functional
over the coupled complexes obtained by retaining subsets of the first k
added points (the remaining added points are always dropped).  For Euler
characteristics it collapses to a weighted count of the simplices that
contain every active added point and none of the other added points; both
routes are implemented and agree exactly per realization.
"""

from __future__ import annotations

from itertools import chain, combinations
from typing import Callable

import numpy as np

from .complexes import AugmentedSample, ComplexSample

__all__ = [
    "simplex_counts",
    "euler_characteristic",
    "euler_coefficients",
    "restricted_counts",
    "lambda_operator",
    "euler_lambda",
]


def simplex_counts(sample: ComplexSample) -> np.ndarray:
    """The f-vector (f_0, ..., f_alpha) of a realization."""
    return sample.f_counts()


def euler_coefficients(alpha: int) -> np.ndarray:
    """Coefficients of the classical Euler characteristic, a_i = (-1)^i."""
    return np.array([(-1.0) ** i for i in range(alpha + 1)])


def euler_characteristic(sample: ComplexSample, a) -> float:
    """chi_a = sum_i a_i f_i for a coefficient vector of length alpha + 1."""
    a = np.asarray(a, dtype=float)
    counts = sample.f_counts()
    if len(a) != len(counts):
        raise ValueError(f"coefficient vector must have length {len(counts)}")
    return float(a @ counts)


def restricted_counts(aug: AugmentedSample, required, i: int) -> int:
    """Number of i-simplices of the retained complex containing the given slots.

    ``required`` lists added-point slots (0-based); simplices meeting a
    non-retained added point are not counted, matching the coupled complex
    with this sample's retention set.
    """
    required = tuple(int(s) for s in required)
    if not set(required) <= set(range(aug.added_count)):
        raise ValueError("required slots must be added points")
    if i > aug.full.alpha or i < 0:
        return 0
    if i + 1 < len(set(required)):
        return 0
    dropped = sorted(set(range(aug.added_count)) - aug.retained)
    return int(np.count_nonzero(aug.row_mask(i, required=required, excluded=dropped)))


def _subsets(items):
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def lambda_operator(aug: AugmentedSample, k: int, functional: Callable[[ComplexSample], float]) -> float:
    """The k-th order difference operator as the literal alternating sum.

    Evaluates the functional on the 2^k coupled complexes that retain the
    subsets of the first k added slots; all other added points are used in
    the construction but never retained.
    """
    if not 1 <= k <= aug.added_count:
        raise ValueError("need 1 <= k <= number of added points")
    total = 0.0
    for subset in _subsets(range(k)):
        sign = (-1.0) ** (k - len(subset))
        total += sign * functional(aug.restricted(frozenset(subset)))
    return total


def euler_lambda(aug: AugmentedSample, active, a) -> float:
    """Difference operator of chi_a via restricted counts.

    Equals ``lambda_operator`` applied to chi_a with the active slots listed
    first: only simplices containing every active added point and none of
    the other added points survive the alternating sum.
    """
    a = np.asarray(a, dtype=float)
    if len(a) != aug.full.alpha + 1:
        raise ValueError("coefficient vector length mismatch")
    active = tuple(int(s) for s in active)
    others = sorted(set(range(aug.added_count)) - set(active))
    total = 0.0
    for i in range(max(0, len(active) - 1), aug.full.alpha + 1):
        if a[i] == 0.0:
            continue
        count = np.count_nonzero(aug.row_mask(i, required=active, excluded=others))
        total += a[i] * count
    return total
