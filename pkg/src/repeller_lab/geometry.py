"""Grids, box counting, and Monte Carlo measure estimation on the unit torus.

Points live in [0,1)^d and are represented as numpy arrays (one row per
point).  The canonical representative of a torus point is its coordinate
vector wrapped into [0,1); ``centered`` gives the representative in
[-1/2, 1/2) used by maps that are defined relative to the origin.

All estimators are deterministic given an explicit seed.  Box counting is
grid aligned (boxes of side base**-k anchored at 0), dimension estimates
are ordinary least squares of log count against |log eps| with a t-based
confidence half-width, and Lebesgue measures are stratified Monte Carlo
with a binomial confidence half-width at the 99% level.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

# Boundary snap: points within one part in 1e9 of a box edge are assigned
# to the box on the right.  Without this, exact-arithmetic sets (triadic
# endpoints, dyadic grid orbits) spill into neighbouring boxes through
# float rounding and corrupt otherwise exact counts.
SNAP = 1e-9


def wrap(points: np.ndarray) -> np.ndarray:
    """Canonical torus representative in [0,1)^d."""
    return np.asarray(points, dtype=float) % 1.0


def centered(points: np.ndarray) -> np.ndarray:
    """Torus representative in [-1/2, 1/2)^d (displacement from the origin)."""
    return (np.asarray(points, dtype=float) + 0.5) % 1.0 - 0.5


def torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Flat-torus distance (minimum over integer translates), per point."""
    d = np.abs(wrap(a) - wrap(b))
    d = np.minimum(d, 1.0 - d)
    if d.ndim == 1:
        return float(np.sqrt(np.sum(d * d)))
    return np.sqrt(np.sum(d * d, axis=-1))


@dataclass(frozen=True)
class Region:
    """A measurable subset of the torus described by a membership test.

    ``contains`` maps an (N, d) array to a boolean array of length N; it
    must be deterministic.  ``bounding_box`` is a (d, 2) array of
    [low, high) coordinate bounds that contains every member point.
    ``volume`` may carry the exact Lebesgue measure when it is known.
    """

    contains: Callable[[np.ndarray], np.ndarray]
    bounding_box: np.ndarray
    volume: float | None = None
    label: str = ""

    def contains_points(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.asarray(self.contains(pts), dtype=bool)
        if out.shape != (pts.shape[0],):
            raise ValueError("region membership must return one bool per point")
        return out


def empty_region(d: int, label: str = "empty") -> Region:
    bbox = np.array([[0.0, 1.0]] * d)
    return Region(contains=lambda p: np.zeros(len(p), dtype=bool),
                  bounding_box=bbox, volume=0.0, label=label)


def scale_to_base(eps: float) -> tuple[int, int]:
    """Recognize eps as base**-k for base in {2, 3}; return (base, k)."""
    if eps <= 0:
        raise ValueError(f"scale must be positive, got {eps}")
    for base in (2, 3):
        k = round(-np.log(eps) / np.log(base))
        if k >= 0 and abs(base ** -k - eps) <= 1e-9 * eps:
            return base, int(k)
    raise ValueError(f"scale {eps} is not 2**-k or 3**-k")


def box_indices(points: np.ndarray, k: int, base: int = 2) -> np.ndarray:
    """Integer grid coordinates of each point at resolution base**-k."""
    n = base ** k
    pts = np.atleast_2d(wrap(points))
    idx = np.floor(pts * n + SNAP).astype(np.int64)
    return np.clip(idx, 0, n - 1)


@dataclass(frozen=True)
class GridCover:
    """Occupancy mask over the regular base**-k grid of [0,1)^d.

    The mask is flat, C-ordered over the d-dimensional index grid.  Covers
    serialize to a run-length-encoded binary format with a 16-byte header
    (magic ``GCV1``, dimension, base, level, occupied count) followed by
    uint32 run lengths alternating empty/occupied, starting with empty.
    """

    d: int
    base: int
    k: int
    mask: np.ndarray

    MAGIC = b"GCV1"
    _HEADER = struct.Struct("<4sBBHQ")

    def __post_init__(self):
        expected = (self.base ** self.k) ** self.d
        if self.mask.shape != (expected,) or self.mask.dtype != np.bool_:
            raise ValueError("mask must be flat boolean of length (base**k)**d")

    @property
    def epsilon(self) -> float:
        return self.base ** -self.k

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def from_points(cls, points: np.ndarray, k: int, base: int = 2) -> "GridCover":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = pts.shape[1]
        n = base ** k
        idx = box_indices(pts, k, base)
        flat = np.zeros(n ** d, dtype=bool)
        lin = np.zeros(len(pts), dtype=np.int64)
        for j in range(d):
            lin = lin * n + idx[:, j]
        flat[lin] = True
        return cls(d=d, base=base, k=k, mask=flat)

    def to_bytes(self) -> bytes:
        header = self._HEADER.pack(self.MAGIC, self.d, self.base, self.k, self.count)
        # run lengths of alternating False/True stretches, starting with False
        m = self.mask
        if m.size == 0:
            return header
        change = np.flatnonzero(m[1:] != m[:-1]) + 1
        bounds = np.concatenate(([0], change, [m.size]))
        runs = np.diff(bounds).astype(np.uint64)
        if m[0]:
            runs = np.concatenate(([0], runs)).astype(np.uint64)
        if runs.max(initial=0) >= 2 ** 32:
            raise ValueError("run too long for uint32 encoding")
        return header + runs.astype("<u4").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "GridCover":
        magic, d, base, k, count = cls._HEADER.unpack_from(blob, 0)
        if magic != cls.MAGIC:
            raise ValueError("not a grid-cover blob (bad magic)")
        runs = np.frombuffer(blob, dtype="<u4", offset=cls._HEADER.size).astype(np.int64)
        total = (base ** k) ** d
        mask = np.zeros(total, dtype=bool)
        pos = 0
        occupied = False
        for r in runs:
            if occupied:
                mask[pos:pos + r] = True
            pos += r
            occupied = not occupied
        if pos != total:
            raise ValueError(f"run lengths sum to {pos}, expected {total}")
        cover = cls(d=d, base=base, k=k, mask=mask)
        if cover.count != count:
            raise ValueError("occupied-box count disagrees with header")
        return cover


def box_count(sampler, eps: float, *, samples_per_box: int = 64,
              seed: int = 0, rel_tol: float = 0.005, max_rounds: int = 12) -> int:
    """Number of eps-grid boxes hit by samples of a set.

    ``sampler`` is either an (N, d) array of points of the set, counted in
    a single pass, or a callable ``sampler(budget, seed) -> (N, d) array``
    that emits points of the set.  Callable samplers are drawn with
    doubling budgets, accumulating occupancy, until the count grows by
    less than ``rel_tol`` between rounds (so the default effort works out
    to roughly ``samples_per_box`` draws per occupied box).  The result is
    a lower bound for the true grid-cover count, converging to it as the
    sample density grows.
    """
    base, k = scale_to_base(eps)
    if isinstance(sampler, np.ndarray):
        if sampler.size == 0:
            raise ValueError("empty sample array")
        return GridCover.from_points(sampler, k, base).count

    if samples_per_box <= 0:
        raise ValueError("sample budget must be positive")
    occupied: set[tuple] = set()
    budget = max(1024, samples_per_box)
    prev = -1
    for round_idx in range(max_rounds):
        pts = np.atleast_2d(np.asarray(sampler(budget, seed + round_idx), dtype=float))
        idx = box_indices(pts, k, base)
        occupied.update(map(tuple, idx))
        count = len(occupied)
        if prev > 0 and count - prev <= rel_tol * prev:
            break
        prev = count
        budget = max(budget * 2, samples_per_box * count)
    return len(occupied)


@dataclass(frozen=True)
class DimensionEstimate:
    """Box-counting dimension from a ladder of (eps, count) pairs.

    ``slope`` is the least-squares slope of log count vs |log eps|
    (natural logs), clamped to [0, ambient_dim]; ``slope_raw`` keeps the
    unclamped value.  ``ci`` is the 95% t-based half-width on the slope
    and ``residual`` the root-mean-square regression residual.
    """

    pairs: tuple
    ambient_dim: int
    slope: float
    slope_raw: float
    residual: float
    ci: float
    warnings: tuple = field(default=())

    @property
    def dimension(self) -> float:
        return self.slope

    def to_json_records(self) -> list[dict]:
        return [{"epsilon": float(e), "count": int(c),
                 "slope": self.slope, "ci": self.ci}
                for e, c in self.pairs]


def box_dimension(pairs: Sequence[tuple], ambient_dim: int) -> DimensionEstimate:
    """Least-squares dimension estimate from (eps, count) pairs.

    Requires at least 3 scales spanning a factor of 8 in eps, with counts
    nonincreasing in eps.  A degenerate ladder (all counts equal) is
    reported with a ``flat-slope`` warning rather than silently returning
    zero; a slope falling outside [0, ambient_dim] is clamped and flagged.
    """
    pts = sorted(((float(e), int(c)) for e, c in pairs), key=lambda p: -p[0])
    if len(pts) < 3:
        raise ValueError("need at least 3 scales")
    if pts[0][0] / pts[-1][0] < 8 * (1 - 1e-9):
        raise ValueError("scales must span at least a factor of 8")
    counts = [c for _, c in pts]
    if any(c <= 0 for c in counts):
        raise ValueError("counts must be positive")
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise ValueError("counts must be nonincreasing in eps")

    warnings = []
    if len(set(counts)) == 1:
        warnings.append("flat-slope")
        slope_raw, resid, ci = 0.0, 0.0, 0.0
    else:
        x = np.array([-np.log(e) for e, _ in pts])
        y = np.array([np.log(c) for _, c in pts])
        fit = stats.linregress(x, y)
        slope_raw = float(fit.slope)
        resid = float(np.sqrt(np.mean((y - (fit.intercept + fit.slope * x)) ** 2)))
        tcrit = float(stats.t.ppf(0.975, len(pts) - 2))
        ci = tcrit * float(fit.stderr)
    slope = min(max(slope_raw, 0.0), float(ambient_dim))
    if slope != slope_raw:
        warnings.append("clamped")
    return DimensionEstimate(pairs=tuple(pts), ambient_dim=ambient_dim,
                             slope=slope, slope_raw=slope_raw,
                             residual=resid, ci=ci, warnings=tuple(warnings))


def counts_from_survivors(points: np.ndarray, base: int, k_values: Sequence[int]) -> list[tuple]:
    """(eps, count) ladder for one point set, exact under grid nesting.

    Boxes at level k are unions of boxes at any finer level of the same
    base, so computing indices once at the finest level and integer-
    dividing down gives exactly the counts a per-level pass would.
    """
    ks = sorted(set(int(k) for k in k_values))
    k_max = ks[-1]
    idx = box_indices(points, k_max, base)
    out = []
    for k in ks:
        shift = base ** (k_max - k)
        coarse = idx // shift
        out.append((base ** -k, len(np.unique(coarse, axis=0))))
    return out


def lebesgue_estimate(region: Region, budget: int, seed: int = 0) -> tuple[float, float]:
    """Stratified Monte Carlo Lebesgue measure of a region.

    Splits the bounding box into a jittered grid of strata (one sample
    each, repeated until the budget is used).  Returns ``(measure, half)``
    where ``half`` is a 99% confidence half-width: the normal binomial
    approximation when hits and misses both exceed 30, and the 99%
    rule-of-three style bound 5.3/budget otherwise (the maximum of the
    two is always taken, so the reported width never undercuts either).
    """
    if budget < 1000:
        raise ValueError("budget must be at least 1000")
    bbox = np.asarray(region.bounding_box, dtype=float)
    d = bbox.shape[0]
    widths = bbox[:, 1] - bbox[:, 0]
    vol = float(np.prod(widths))
    if vol <= 0:
        raise ValueError("bounding box must have positive volume")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    g = max(1, int(np.floor(budget ** (1.0 / d))))
    cells = np.stack(np.meshgrid(*[np.arange(g)] * d, indexing="ij"),
                     axis=-1).reshape(-1, d)
    rounds = budget // (g ** d)
    hits = 0
    drawn = 0
    for _ in range(rounds):
        u = (cells + rng.random((g ** d, d))) / g
        pts = bbox[:, 0] + u * widths
        hits += int(region.contains_points(pts).sum())
        drawn += g ** d
    rest = budget - drawn
    if rest > 0:
        pts = bbox[:, 0] + rng.random((rest, d)) * widths
        hits += int(region.contains_points(pts).sum())
        drawn += rest

    p = hits / drawn
    measure = p * vol
    half_three = 5.3 / drawn * vol
    if hits >= 30 and (drawn - hits) >= 30:
        half = max(2.576 * np.sqrt(p * (1 - p) / drawn) * vol, half_three)
    else:
        half = half_three
    return measure, float(half)
