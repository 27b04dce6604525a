"""Finite capacity spaces: nonadditive set functions on a finite ground set.

A capacity assigns a value in [0, 1] to every subset of a finite set of
atoms, is zero on the empty set, one on the full set, and monotone under
inclusion.  Three representations are supported: an explicit table over
all subsets, a distorted probability u(P) for a nondecreasing concave
distortion u, and a possibility measure induced by a pointwise
distribution.  Subsets are bitmasks over atom indices throughout.

All objects are immutable after construction (the only internal mutation
is memoization of the full subset table), so they are safe to share
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

TOL = 1e-12

# dyadic probe grid on which distortion invariants are verified
PROBE_POINTS = 1025
_PROBE = np.arange(PROBE_POINTS) / (PROBE_POINTS - 1)


class ConstructionError(ValueError):
    """A capacity component violates one of its construction invariants."""


class InputError(ValueError):
    """An argument to a capacity operation is out of range."""


class CapacityTooLargeError(ValueError):
    """Exhaustive subset enumeration was requested for more than 20 atoms."""


@dataclass(frozen=True)
class GroundSpace:
    """Finite sample space; subsets are bitmasks over atom indices."""

    atom_labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.atom_labels) < 1:
            raise ConstructionError("ground space needs at least one atom")
        if len(set(self.atom_labels)) != len(self.atom_labels):
            raise ConstructionError("atom labels must be unique")

    @classmethod
    def of_size(cls, m: int, prefix: str = "w") -> "GroundSpace":
        return cls(tuple(f"{prefix}{i}" for i in range(m)))

    @property
    def atom_count(self) -> int:
        return len(self.atom_labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.atom_count) - 1


def as_mask(subset: Union[int, Iterable[int], None], m: int) -> int:
    """Normalize a subset (bitmask int, index iterable, or None for all)."""
    if subset is None:
        return (1 << m) - 1
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >> m:
            raise InputError(f"bitmask {mask} out of range for {m} atoms")
        return mask
    mask = 0
    for i in subset:
        i = int(i)
        if i < 0 or i >= m:
            raise InputError(f"atom index {i} out of range for {m} atoms")
        mask |= 1 << i
    return mask


def mask_indices(mask: int) -> list[int]:
    """Atom indices contained in a bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class DiscreteProbability:
    """Probability weights over the atoms of a ground space."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ConstructionError("weights must be a nonempty vector")
        if np.any(w < -TOL) or np.any(w > 1 + TOL):
            raise ConstructionError("weights must lie in [0, 1]")
        if abs(float(w.sum()) - 1.0) > TOL:
            raise ConstructionError(f"weights sum to {w.sum()}, expected 1")

    @classmethod
    def uniform(cls, m: int) -> "DiscreteProbability":
        return cls(tuple(1.0 / m for _ in range(m)))

    def mass(self, mask: int) -> float:
        return float(sum(self.weights[i] for i in mask_indices(mask)))


@dataclass(frozen=True)
class Distortion:
    """Nondecreasing concave distortion u with u(0)=0, u(1)=1.

    ``derivative_at_zero`` is ``math.inf`` for power distortions with
    exponent below one; bounds that require a finite slope reject those.
    For custom tables the slope is a forward-difference estimate and
    ``derivative_estimated`` is set.
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    derivative_at_zero: float
    params: tuple[float, ...] = ()
    derivative_estimated: bool = False

    def __call__(self, t):
        out = self.fn(np.asarray(t, dtype=float))
        if np.ndim(t) == 0:
            return float(out)
        return out


def _validate_distortion(kind: str, fn) -> None:
    vals = fn(_PROBE)
    if abs(float(vals[0])) > TOL or abs(float(vals[-1]) - 1.0) > TOL:
        raise ConstructionError(f"distortion '{kind}': needs u(0)=0 and u(1)=1")
    if np.any(np.diff(vals) < -TOL):
        raise ConstructionError(f"distortion '{kind}': not nondecreasing on probe grid")
    # midpoint concavity over all same-parity probe pairs (their midpoint is
    # again a probe point)
    for parity in (0, 1):
        v = vals[parity::2]
        idx = np.arange(parity, PROBE_POINTS, 2)
        mids = (idx[:, None] + idx[None, :]) // 2
        if np.any(vals[mids] < (v[:, None] + v[None, :]) / 2.0 - TOL):
            raise ConstructionError(f"distortion '{kind}': not concave on probe grid")


def make_distortion(kind: str, **params) -> Distortion:
    """Build one of the named distortions; validates invariants on a probe grid."""
    if kind == "power":
        alpha = float(params.pop("alpha", 0.5))
        if alpha <= 0:
            raise ConstructionError("power distortion needs alpha > 0")
        fn = lambda t, a=alpha: np.power(t, a)
        dz = 1.0 if alpha == 1.0 else (math.inf if alpha < 1.0 else 0.0)
        dist = Distortion("power", fn, dz, (alpha,))
    elif kind == "rational_2t":
        dist = Distortion("rational_2t", lambda t: 2.0 * t / (t + 1.0), 2.0)
    elif kind == "exp_decay":
        c = 1.0 - math.exp(-1.0)
        dist = Distortion("exp_decay", lambda t, c=c: -np.expm1(-t) / c, 1.0 / c)
    elif kind == "log2":
        dist = Distortion("log2", lambda t: np.log1p(t) / math.log(2.0), 1.0 / math.log(2.0))
    elif kind == "sine":
        dist = Distortion("sine", lambda t: np.sin(0.5 * math.pi * t), 0.5 * math.pi)
    elif kind == "arctan":
        dist = Distortion("arctan", lambda t: (4.0 / math.pi) * np.arctan(t), 4.0 / math.pi)
    elif kind == "custom_table":
        xs = np.asarray(params.pop("xs"), dtype=float)
        ys = np.asarray(params.pop("ys"), dtype=float)
        if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
            raise ConstructionError("custom_table needs matching xs/ys vectors")
        if np.any(np.diff(xs) <= 0):
            raise ConstructionError("custom_table xs must be strictly increasing")
        fn = lambda t, xs=xs, ys=ys: np.interp(t, xs, ys)
        h = 2.0 ** -20
        dist = Distortion("custom_table", fn, float(fn(np.array(h)) / h),
                          derivative_estimated=True)
    else:
        raise ConstructionError(f"unknown distortion kind '{kind}'")
    if params:
        raise ConstructionError(f"unexpected distortion parameters {sorted(params)}")
    _validate_distortion(dist.kind, dist.fn)
    return dist


@dataclass(frozen=True)
class PossibilityDistribution:
    """Per-atom possibility levels; the largest level must be one."""

    levels: tuple[float, ...]

    def __post_init__(self):
        lam = np.asarray(self.levels, dtype=float)
        if lam.ndim != 1 or lam.size < 1:
            raise ConstructionError("levels must be a nonempty vector")
        if np.any(lam < -TOL) or np.any(lam > 1 + TOL):
            raise ConstructionError("levels must lie in [0, 1]")
        if abs(float(lam.max()) - 1.0) > TOL:
            raise ConstructionError(f"max level is {lam.max()}, expected 1")


@dataclass(frozen=True, eq=False)
class TableRepr:
    values: np.ndarray  # length 2**M, indexed by bitmask


@dataclass(frozen=True)
class DistortedRepr:
    distortion: Distortion
    probability: DiscreteProbability


@dataclass(frozen=True)
class PossibilityRepr:
    distribution: PossibilityDistribution


@dataclass(eq=False)
class Capacity:
    """A normalized monotone set function over a finite ground space.

    Treat instances as immutable; the lone mutable field memoizes the
    full subset table for vectorized consumers.
    """

    space: GroundSpace
    form: Union[TableRepr, DistortedRepr, PossibilityRepr]
    _table: np.ndarray | None = field(default=None, repr=False)

    @property
    def atom_count(self) -> int:
        return self.space.atom_count


def make_table(space: GroundSpace,
               values: Union[Mapping[int, float], Sequence[float], np.ndarray]) -> Capacity:
    """Explicit-table capacity; the table must be total and monotone."""
    m = space.atom_count
    n = 1 << m
    if isinstance(values, Mapping):
        tbl = np.full(n, np.nan)
        for mask, v in values.items():
            mask = as_mask(mask, m) if not isinstance(mask, (int, np.integer)) else int(mask)
            if mask < 0 or mask >= n:
                raise ConstructionError(f"table key {mask} out of range")
            tbl[mask] = float(v)
        if np.any(np.isnan(tbl)):
            missing = int(np.flatnonzero(np.isnan(tbl))[0])
            raise ConstructionError(f"table is not total: subset mask {missing} missing")
    else:
        tbl = np.asarray(values, dtype=float).copy()
        if tbl.shape != (n,):
            raise ConstructionError(f"table needs {n} entries, got {tbl.shape}")
    if abs(tbl[0]) > TOL:
        raise ConstructionError("table value on the empty set must be 0")
    if abs(tbl[n - 1] - 1.0) > TOL:
        raise ConstructionError("table value on the full set must be 1")
    if np.any(tbl < -TOL) or np.any(tbl > 1 + TOL):
        raise ConstructionError("table values must lie in [0, 1]")
    # monotone along every covering pair mask -> mask | bit
    masks = np.arange(n)
    for i in range(m):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        if np.any(tbl[without] > tbl[without | bit] + TOL):
            raise ConstructionError("table is not monotone under inclusion")
    tbl.setflags(write=False)
    return Capacity(space, TableRepr(tbl))


def make_distorted(u: Distortion, p: DiscreteProbability,
                   space: GroundSpace | None = None) -> Capacity:
    """Distorted probability u(P); concavity of u makes it submodular."""
    if space is None:
        space = GroundSpace.of_size(len(p.weights))
    if space.atom_count != len(p.weights):
        raise ConstructionError("weights length must match atom count")
    return Capacity(space, DistortedRepr(u, p))


def make_possibility(lam: PossibilityDistribution,
                     space: GroundSpace | None = None) -> Capacity:
    """Possibility measure A -> max of the distribution over A."""
    if space is None:
        space = GroundSpace.of_size(len(lam.levels))
    if space.atom_count != len(lam.levels):
        raise ConstructionError("levels length must match atom count")
    return Capacity(space, PossibilityRepr(lam))


def eval_capacity(cap: Capacity, subset: Union[int, Iterable[int], None]) -> float:
    """Value of the capacity on a subset (bitmask, index iterable, or None=all)."""
    mask = as_mask(subset, cap.atom_count)
    form = cap.form
    if isinstance(form, TableRepr):
        return float(form.values[mask])
    if mask == 0:
        return 0.0
    if isinstance(form, DistortedRepr):
        # weights carry a 1e-12 construction tolerance; keep the mass inside
        # the distortion's domain
        mass = min(max(form.probability.mass(mask), 0.0), 1.0)
        return float(form.distortion(mass))
    return float(max(form.distribution.levels[i] for i in mask_indices(mask)))


def subset_table(cap: Capacity) -> np.ndarray:
    """Capacity values over all 2**M subsets, indexed by bitmask (memoized)."""
    if cap._table is not None:
        return cap._table
    m = cap.atom_count
    if m > 20:
        raise CapacityTooLargeError(f"subset table for {m} atoms (limit 20)")
    form = cap.form
    if isinstance(form, TableRepr):
        tbl = form.values
    elif isinstance(form, DistortedRepr):
        mass = np.zeros(1)
        for w in form.probability.weights:
            mass = np.concatenate([mass, mass + w])
        tbl = np.asarray(form.distortion(np.clip(mass, 0.0, 1.0)), dtype=float)
        tbl[0] = 0.0
    else:
        lam = np.zeros(1)
        for v in form.distribution.levels:
            lam = np.concatenate([lam, np.maximum(lam, v)])
        tbl = lam
    tbl = np.ascontiguousarray(tbl, dtype=float)
    tbl.setflags(write=False)
    cap._table = tbl
    return tbl


@dataclass(frozen=True)
class PropertyReport:
    monotone: bool
    subadditive: bool
    submodular: bool
    mode: str


def known_submodular(cap: Capacity) -> bool:
    """True when the representation guarantees submodularity analytically."""
    return isinstance(cap.form, (DistortedRepr, PossibilityRepr))


def check_properties(cap: Capacity, mode: str = "auto", tol: float = TOL) -> PropertyReport:
    """Verify monotonicity, subadditivity and submodularity.

    ``analytic`` mode returns guaranteed verdicts for distorted and
    possibility capacities.  ``exhaustive`` mode compares every pair of
    subsets against the table, so it costs O(4**M); it is gated at
    M <= 20 and practical up to M around 13.
    """
    if mode not in ("auto", "analytic", "exhaustive"):
        raise InputError(f"unknown mode '{mode}'")
    if mode in ("auto", "analytic") and known_submodular(cap):
        return PropertyReport(True, True, True, "analytic")
    if mode == "analytic":
        raise InputError("analytic verdicts exist only for distorted/possibility forms")
    m = cap.atom_count
    if m > 20:
        raise CapacityTooLargeError(f"exhaustive check for {m} atoms (limit 20)")
    tbl = subset_table(cap)
    n = 1 << m
    masks = np.arange(n, dtype=np.int64)
    tb = tbl[masks]
    monotone = subadditive = submodular = True
    chunk = max(1, (1 << 22) // n)
    for start in range(0, n, chunk):
        a = masks[start:start + chunk, None]
        b = masks[None, :]
        ta = tbl[a]
        tu = tbl[a | b]
        ti = tbl[a & b]
        if monotone:
            is_subset = (a & b) == a
            monotone = bool(np.all(~is_subset | (ta <= tb + tol)))
        if subadditive:
            subadditive = bool(np.all(tu <= ta + tb + tol))
        if submodular:
            submodular = bool(np.all(tu + ti <= ta + tb + tol))
        if not (monotone or subadditive or submodular):
            break
    return PropertyReport(monotone, subadditive, submodular, "exhaustive")


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def distortion_from_spec(obj: Mapping) -> Distortion:
    if "kind" not in obj:
        raise ConstructionError("distortion object missing key 'kind'")
    params = {k: v for k, v in obj.items() if k != "kind"}
    return make_distortion(str(obj["kind"]), **params)


def capacity_from_spec(obj: Mapping) -> Capacity:
    """Parse ``{"atoms": ..., "repr": {"type": ..., ...}}``.

    ``atoms`` is a label list or an atom count.  Representation types are
    "table" (key "values": subset -> value, subsets as comma-joined atom
    indices, "" for the empty set), "distorted" (keys "distortion" and
    "weights") and "possibility" (key "lambda").
    """
    if "repr" not in obj:
        raise ConstructionError("capacity object missing key 'repr'")
    rep = obj["repr"]
    if "type" not in rep:
        raise ConstructionError("capacity repr missing key 'type'")
    kind = rep["type"]
    atoms = obj.get("atoms")
    if isinstance(atoms, int):
        space = GroundSpace.of_size(atoms)
    elif atoms is not None:
        space = GroundSpace(tuple(str(a) for a in atoms))
    else:
        space = None

    if kind == "distorted":
        if "distortion" not in rep:
            raise ConstructionError("distorted capacity missing key 'distortion'")
        u = distortion_from_spec(rep["distortion"])
        if "weights" in rep:
            p = DiscreteProbability(tuple(float(w) for w in rep["weights"]))
        elif space is not None:
            p = DiscreteProbability.uniform(space.atom_count)
        else:
            raise ConstructionError("distorted capacity missing key 'weights'")
        return make_distorted(u, p, space)
    if kind == "possibility":
        if "lambda" not in rep:
            raise ConstructionError("possibility capacity missing key 'lambda'")
        lam = PossibilityDistribution(tuple(float(v) for v in rep["lambda"]))
        return make_possibility(lam, space)
    if kind == "table":
        if "values" not in rep:
            raise ConstructionError("table capacity missing key 'values'")
        if space is None:
            raise ConstructionError("table capacity missing key 'atoms'")
        m = space.atom_count
        table = {}
        for key, v in rep["values"].items():
            idx = [int(s) for s in str(key).split(",") if s.strip() != ""]
            table[as_mask(idx, m)] = float(v)
        return make_table(space, table)
    raise ConstructionError(f"unknown capacity repr type '{kind}'")
