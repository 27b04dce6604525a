"""The asymmetric Choquet integral on a finite capacity space.

Two independent evaluation routes ship side by side: a closed-form
sorted-sum over the level sets of the integrand, and a midpoint-rule
quadrature of the defining survival-function integrals.  The second is
deliberately kept as a slow cross-check for the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .capacity import Capacity, InputError, as_mask, eval_capacity, mask_indices

P_MAX = 16.0  # largest supported L^p exponent


@dataclass(frozen=True)
class AtomFunction:
    """Real values attached to each atom of a ground space."""

    values: tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise InputError("atom function must be a nonempty vector")
        if not np.all(np.isfinite(v)):
            raise InputError("atom function values must be finite")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    method: str
    steps_used: int = 0


def _atom_values(f, m: int) -> np.ndarray:
    vals = np.asarray(getattr(f, "values", f), dtype=float)
    if vals.shape != (m,):
        raise InputError(f"expected {m} atom values, got shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        raise InputError("atom values must be finite")
    return vals


def choquet_integral(f, cap: Capacity,
                     subset: Union[int, Iterable[int], None] = None) -> IntegralResult:
    """Sorted-sum Choquet integral of f over a subset (default: all atoms).

    With the distinct values v1 < ... < vm of f on A, the integral equals
    v1*mu(A) + sum_i (v_i - v_{i-1}) * mu(A intersect {f >= v_i}), which
    telescopes the survival-function definition exactly.  Ties are
    deduplicated first, so the result is invariant under permutations of
    equal values.
    """
    m = cap.atom_count
    mask = as_mask(subset, m)
    vals = _atom_values(f, m)
    if mask == 0:
        return IntegralResult(0.0, "sorted_sum", 0)
    idx = mask_indices(mask)
    distinct = np.unique(vals[idx])
    total = float(distinct[0]) * eval_capacity(cap, mask)
    for j in range(1, distinct.size):
        level = 0
        for i in idx:
            if vals[i] >= distinct[j]:
                level |= 1 << i
        total += (float(distinct[j]) - float(distinct[j - 1])) * eval_capacity(cap, level)
    return IntegralResult(total, "sorted_sum", 0)


def choquet_integral_oracle(f, cap: Capacity,
                            subset: Union[int, Iterable[int], None] = None,
                            steps: int = 10 ** 6) -> IntegralResult:
    """Midpoint-rule quadrature of the survival-function integrals.

    The positive part integrates mu(A intersect {f > t}) over [0, max f + 1]
    and the negative part integrates the same minus mu(A) over
    [min f - 1, 0]; each nonempty part gets ``steps`` midpoint cells.  The
    integrand is a step function with jumps of total height at most one per
    part, so the quadrature error is bounded by the sum of the two cell
    widths.
    """
    if steps < 1000:
        raise InputError("oracle needs steps >= 1000")
    m = cap.atom_count
    mask = as_mask(subset, m)
    vals = _atom_values(f, m)
    if mask == 0:
        return IntegralResult(0.0, "riemann_oracle", 0)
    idx = mask_indices(mask)
    on_set = vals[np.asarray(idx)]
    distinct = np.unique(on_set)
    mu_a = eval_capacity(cap, mask)
    # survivors[j] = mu(A intersect {f > distinct[j-1]}); survivors[0] = mu(A)
    survivors = np.empty(distinct.size + 1)
    survivors[0] = mu_a
    for j, t in enumerate(distinct):
        level = 0
        for i in idx:
            if vals[i] > t:
                level |= 1 << i
        survivors[j + 1] = eval_capacity(cap, level)

    total = 0.0
    used = 0
    hi = float(distinct[-1]) + 1.0
    lo = float(distinct[0]) - 1.0
    if hi > 0.0:
        h = hi / steps
        mids = (np.arange(steps) + 0.5) * h
        buckets = np.searchsorted(mids, distinct, side="left")
        counts = np.diff(np.concatenate([[0], buckets, [steps]]))
        total += h * float(np.dot(counts, survivors))
        used += steps
    if lo < 0.0:
        h = -lo / steps
        mids = lo + (np.arange(steps) + 0.5) * h
        buckets = np.searchsorted(mids, distinct, side="left")
        counts = np.diff(np.concatenate([[0], buckets, [steps]]))
        total += h * float(np.dot(counts, survivors - mu_a))
        used += steps
    return IntegralResult(total, "riemann_oracle", used)


def choquet_lp_norm(f, cap: Capacity, p: float) -> float:
    """((C) integral of |f|^p over the whole space) ** (1/p)."""
    if not (1.0 <= p <= P_MAX):
        raise InputError(f"p must lie in [1, {P_MAX:g}], got {p}")
    vals = _atom_values(f, cap.atom_count)
    integral = choquet_integral(np.abs(vals) ** p, cap).value
    return float(integral ** (1.0 / p))


def capacity_distribution_function(f, cap: Capacity, x: float) -> float:
    """Capacity of the sublevel set {atoms: f <= x}."""
    vals = _atom_values(f, cap.atom_count)
    mask = 0
    for i, v in enumerate(vals):
        if v <= x:
            mask |= 1 << i
    return eval_capacity(cap, mask)


def comonotone(f, g, tol: float = 0.0) -> bool:
    """Pairwise-product comonotonicity test for two atom functions."""
    fv = np.asarray(getattr(f, "values", f), dtype=float)
    gv = np.asarray(getattr(g, "values", g), dtype=float)
    df = fv[:, None] - fv[None, :]
    dg = gv[:, None] - gv[None, :]
    return bool(np.all(df * dg >= -tol))


def integral_batch(values: np.ndarray, mu_table: np.ndarray) -> np.ndarray:
    """Sorted-sum Choquet integrals over the full space for a batch of rows.

    ``values`` has shape (K, M); ``mu_table`` holds the capacity over all
    2**M bitmasks.  Ties contribute exact-zero increments, so the result
    matches the deduplicating scalar path to within summation order.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[None, :]
    k, m = values.shape
    order = np.argsort(values, axis=1, kind="stable")
    v_sorted = np.take_along_axis(values, order, axis=1)
    bits = (np.int64(1) << order.astype(np.int64))
    upper = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1]
    mu = mu_table[upper]
    out = v_sorted[:, 0] * mu[:, 0]
    if m > 1:
        out = out + np.sum(np.diff(v_sorted, axis=1) * mu[:, 1:], axis=1)
    return out
