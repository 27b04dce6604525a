"""Stochastic Bernstein polynomials over order-statistic node arrays.

Nodes are rows of sorted i.i.d. uniforms; their maximal deviation from the
equispaced grid controls the approximation error through the uniform
modulus of continuity K and its right-continuous inverse.  Monte Carlo
draws use counter-based substreams keyed by (master seed, sample index),
so results do not depend on batching or scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bernstein import bernstein_basis
from .capacity import InputError
from .randomfn import Grid, PAIR_TOL, RandomFunction, sample_modulus_profile

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeededStream:
    """Deterministic substream fully determined by (master_seed, stream_index)."""

    master_seed: int
    stream_index: int

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed & _MASK64, self.stream_index & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class TriangularArrayRow:
    """One sorted row Y_{n,0} <= ... <= Y_{n,n} of stochastic nodes in [0, 1]."""

    n: int
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.shape != (self.n + 1,):
            raise InputError(f"row of degree {self.n} needs {self.n + 1} nodes")
        if np.any(nodes < 0.0) or np.any(nodes > 1.0):
            raise InputError("nodes must lie in [0, 1]")
        if np.any(np.diff(nodes) < 0.0):
            raise InputError("nodes must be sorted nondecreasing")


def sample_order_statistics(n: int, stream: SeededStream) -> TriangularArrayRow:
    """Draw n+1 i.i.d. uniforms from the stream and sort them ascending."""
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    draws = stream.generator().random(n + 1)
    return TriangularArrayRow(n, np.sort(draws))


def sample_rows(n: int, master_seed: int, count: int,
                start_index: int = 0) -> np.ndarray:
    """Stack ``count`` rows drawn from consecutive substreams, shape (count, n+1).

    Row i is bit-identical to
    ``sample_order_statistics(n, SeededStream(master_seed, start_index + i))``.
    """
    out = np.empty((count, n + 1))
    for i in range(count):
        stream = SeededStream(master_seed, start_index + i)
        out[i] = np.sort(stream.generator().random(n + 1))
    return out


def max_deviation(row) -> float:
    """M_n: largest |Y_{n,k} - k/n| over the row."""
    if isinstance(row, TriangularArrayRow):
        nodes, n = row.nodes, row.n
    else:
        nodes = np.asarray(row, dtype=float)
        n = nodes.size - 1
    return float(np.abs(nodes - np.arange(n + 1) / n).max())


def max_deviation_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized M_n over a (count, n+1) stack of rows."""
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[1] - 1
    return np.abs(rows - np.arange(n + 1) / n).max(axis=1)


def stochastic_bernstein(f: RandomFunction, row: TriangularArrayRow, x: float,
                         atom: int) -> float:
    """B_n(f, Y)(x, atom): basis dot product with node-evaluated samples."""
    if f.dim != 1:
        raise InputError("stochastic Bernstein polynomials need a 1-d function")
    if not (0 <= atom < f.atom_count):
        raise InputError(f"atom index {atom} out of range")
    samples = np.asarray(f.evaluator(row.nodes[:, None], atom), dtype=float)
    basis = bernstein_basis(row.n, x).values
    return float(np.dot(samples, basis))


# ---------------------------------------------------------------------------
# Uniform modulus K and its right-continuous inverse
# ---------------------------------------------------------------------------

class KTable:
    """Grid modulus K(f, delta) = sup over atoms of the sample moduli.

    Precomputed once per (function, grid); lookups accept arbitrary real
    deltas and cost O(1) each.
    """

    def __init__(self, f: RandomFunction, grid: Grid | None = None):
        if f.dim != 1:
            raise InputError("K modulus is defined for 1-d functions")
        if grid is None:
            grid = Grid.default_for(1)
        self.grid = grid
        dists, prof = sample_modulus_profile(f, grid)
        self._dists = dists
        self._max = prof.max(axis=1)

    def __call__(self, delta) -> np.ndarray | float:
        delta = np.asarray(delta, dtype=float)
        if np.any(delta < 0):
            raise InputError("delta must be nonnegative")
        j = np.searchsorted(self._dists, delta + PAIR_TOL, side="right") - 1
        out = self._max[j]
        return float(out) if out.ndim == 0 else out


def k_modulus(f: RandomFunction, delta: float, grid: Grid | None = None) -> float:
    """K(f, delta): max over atoms and grid pairs |x-y| <= delta of |f(x)-f(y)|."""
    return float(KTable(f, grid)(delta))


def default_delta_grid(points: int = 1025) -> np.ndarray:
    return np.arange(points) / (points - 1)


def k_inverse(f: RandomFunction, eps: float, grid: Grid | None = None,
              delta_grid=None) -> float:
    """Largest delta in the delta grid with K(f, delta) <= eps (0 if none).

    Emulates the right-continuous inverse of K on a finite grid; by
    construction delta <= k_inverse(f, k_modulus(f, delta)) for every grid
    delta.
    """
    if eps < 0:
        raise InputError("eps must be nonnegative")
    if delta_grid is None:
        delta_grid = default_delta_grid()
    delta_grid = np.asarray(delta_grid, dtype=float)
    if np.any(np.diff(delta_grid) < 0):
        raise InputError("delta grid must be sorted ascending")
    table = KTable(f, grid)
    ok = table(delta_grid) <= eps
    if not np.any(ok):
        return 0.0
    return float(delta_grid[np.flatnonzero(ok)[-1]])


# ---------------------------------------------------------------------------
# Closed-form deviation bounds
# ---------------------------------------------------------------------------

def _check_bound_args(r: float, u_prime_0: float) -> None:
    if not (0.0 < r < 1.0):
        raise InputError(f"r must lie in (0, 1), got {r}")
    if not (0.0 < u_prime_0 < math.inf):
        raise InputError("the distortion slope at zero must be finite and positive "
                         "(power distortions with exponent < 1 are rejected)")


def lemma51_bound(n: int, eps: float, r: float, u_prime_0: float) -> float:
    """Distorted-probability tail bound for the node deviation M_n.

    u'(0) * (n+1) / sqrt(1-r) * exp(-(3r/2) * n * eps**2).
    """
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    if eps < 0:
        raise InputError("eps must be nonnegative")
    _check_bound_args(r, u_prime_0)
    return u_prime_0 * (n + 1) / math.sqrt(1.0 - r) * math.exp(-1.5 * r * n * eps * eps)


def theorem6_bound(n: int, tau_n: float, r: float, u_prime_0: float) -> float:
    """Rate-function form of the deviation bound with tau(n) >= 1.

    u'(0) * (n+1) / sqrt(1-r) * exp(-(3r/2) * tau(n)); equals
    ``lemma51_bound`` under tau(n) = n * eps**2.
    """
    if n < 1:
        raise InputError(f"degree must be >= 1, got {n}")
    if tau_n < 1.0:
        raise InputError(f"tau(n) >= 1 is required, got {tau_n}")
    _check_bound_args(r, u_prime_0)
    return u_prime_0 * (n + 1) / math.sqrt(1.0 - r) * math.exp(-1.5 * r * tau_n)


@dataclass(frozen=True)
class StochasticProcessSpec:
    """A 1-d random function paired with the grid used for its K modulus."""

    f: RandomFunction
    k_grid: Grid

    def __post_init__(self):
        if self.f.dim != 1:
            raise InputError("stochastic runs need a 1-d function")
        if not self.f.continuous:
            raise InputError(f"family '{self.f.name}' is not continuous in x; "
                             "stochastic convergence runs require continuity")
