"""Slow-orbit sets at fixed depth: enumeration, measurement, envelope checks.

The slow set at depth n and threshold c collects the points that survive n
steps while their running mean of per-step least log-stretch stays at or
below c.  Three views of it are computed and cross-checked:

  * a word census: depth-n itineraries that cannot be ruled out by the
    certified per-branch expansion floors (a superset of the itineraries
    the slow set can use);
  * certified volume brackets, by refining each surviving word's cylinder
    into an outer box cover and inner witnesses;
  * a direct Monte Carlo measurement over the torus.

The measured volume is compared against the depth-volume envelope
``delta_bound`` evaluated at the family's effective parameter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import delta_bound, depth_threshold
from .holes import CylinderWord, MapWithHoles, refine_cylinder
from .geometry import SNAP


def _resolve_threshold(system: MapWithHoles, threshold):
    if threshold is not None:
        return float(threshold)
    c0 = getattr(system, "c0", None)
    if c0 is None:
        raise TypeError(f"{system.label} has no default threshold scale c0; "
                        "pass threshold explicitly")
    return float(c0) * float(system.mu_f)


# ------------------------------------------------------------- word census

@dataclass(frozen=True)
class WordCensus:
    """Outcome counts of the depth-n word enumeration.

    ``kept`` holds the words the expansion floors could not rule out.
    ``pruned`` counts subtrees cut with a certificate (their best possible
    depth-n mean already exceeds the threshold), ``expanded`` the internal
    nodes; every visited node is one of the three.
    """

    n: int
    threshold: float
    kept: tuple
    pruned: int
    expanded: int
    visited: int
    capped: bool

    @property
    def conclusive(self) -> bool:
        return not self.capped


def enumerate_slow_words(system: MapWithHoles, n: int, threshold=None, *,
                         max_words: int = 100_000) -> WordCensus:
    """Depth-n words not excluded by the certified expansion floors.

    A prefix is cut as soon as even an all-slowest completion would push
    the depth-n mean of per-branch floors above the threshold; since the
    floors bound the true per-step terms from below, every point of a cut
    prefix's cylinder has mean expansion above the threshold at depth n.
    The enumeration stops (capped) once more than ``max_words`` prefixes
    survive at once - the result is then a partial, inconclusive list.
    """
    threshold = _resolve_threshold(system, threshold)
    if n < 1:
        raise ValueError("depth must be at least 1")
    floors = [system.lambda_min(s) for s in range(system.n_branches)]
    best_rest = min(floors)
    budget = n * threshold

    kept, pruned, expanded, visited = [], 0, 0, 0
    capped = False
    stack = [((s,), floors[s]) for s in range(system.n_branches)][::-1]
    while stack:
        word, total = stack.pop()
        visited += 1
        j = len(word)
        if total + (n - j) * best_rest > budget:
            pruned += 1
            continue
        if j == n:
            kept.append(CylinderWord(word))
            if len(kept) > max_words:
                capped = True
                break
            continue
        expanded += 1
        for s in system.allowed_after(word[-1]):
            stack.append((word + (s,), total + floors[s]))
    return WordCensus(n=n, threshold=threshold, kept=tuple(kept), pruned=pruned,
                      expanded=expanded, visited=visited, capped=capped)


# ------------------------------------------------------------ measurement

def measure_slow_fractions(system: MapWithHoles, n_values, threshold=None, *,
                           samples: int = 100_000, seed: int = 0) -> dict:
    """Monte Carlo volume of the slow set at each requested depth.

    One orbit sweep serves every depth: per-step least log-stretch values
    are accumulated along surviving orbits and compared against the
    threshold at each depth in ``n_values``.  Returns
    {n: (fraction, halfwidth)} with the same confidence convention as
    ``lebesgue_estimate`` (99% normal, floored at 5.3/N).
    """
    threshold = _resolve_threshold(system, threshold)
    n_values = sorted(set(int(n) for n in n_values))
    if not n_values or n_values[0] < 1:
        raise ValueError("need at least one depth >= 1")
    if samples < 1000:
        raise ValueError("too few samples for a meaningful estimate")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pos = rng.random((samples, system.d))
    alive = np.ones(samples, dtype=bool)
    acc = np.zeros(samples)

    out = {}
    wanted = set(n_values)
    for j in range(n_values[-1]):
        alive[alive] &= ~system.in_hole(pos[alive])
        if alive.any():
            acc[alive] += system.log_least_stretch(pos[alive])
            pos[alive] = system.step(pos[alive])
        depth = j + 1
        if depth in wanted:
            bad = alive & (acc <= depth * threshold + SNAP)
            p = bad.mean()
            half = max(2.576 * np.sqrt(p * (1 - p) / samples), 5.3 / samples)
            out[depth] = (float(p), float(half))
    return out


# ------------------------------------------------------------ full report

@dataclass(frozen=True)
class SlowSetReport:
    """Word census plus certified and measured volumes at one depth."""

    n: int
    threshold: float
    census: WordCensus
    resolution: float
    vol_lo: float
    vol_hi: float
    empties: int
    vol_mc: float
    mc_halfwidth: float
    samples: int

    @property
    def conclusive(self) -> bool:
        return self.census.conclusive


def bad_volume(system: MapWithHoles, n: int, threshold=None, *,
               resolution: float = 2.0 ** -9, samples: int = 100_000,
               seed: int = 0, max_words: int = 100_000,
               witness_targets: int = 8) -> SlowSetReport:
    """Two-sided volume of the depth-n slow set.

    The certified upper volume sums the outer covers of every word the
    floors could not exclude; distinct cylinders are disjoint, so the sum
    is itself an upper bound.  When the enumeration was capped the word
    side is inconclusive and the bracket degenerates to [0, nan]; the
    Monte Carlo measurement is unaffected.
    """
    threshold = _resolve_threshold(system, threshold)
    census = enumerate_slow_words(system, n, threshold, max_words=max_words)
    vol_lo, vol_hi, empties = 0.0, 0.0, 0
    if census.capped:
        vol_hi = float("nan")
    else:
        for word in census.kept:
            geo = refine_cylinder(system, word, resolution,
                                  witness_targets=witness_targets, seed=seed)
            vol_lo += geo.vol_lo
            vol_hi += geo.vol_hi
            empties += int(geo.empty)
    frac, half = measure_slow_fractions(system, [n], threshold,
                                        samples=samples, seed=seed)[n]
    return SlowSetReport(n=n, threshold=threshold, census=census,
                         resolution=resolution, vol_lo=vol_lo, vol_hi=vol_hi,
                         empties=empties, vol_mc=frac, mc_halfwidth=half,
                         samples=samples)


# -------------------------------------------------- first-crossing partition

@dataclass(frozen=True)
class CrossingPartition:
    """Words grouped by the first depth at which the certified mean
    expansion clears the threshold.

    ``groups[k]`` holds words of length k+1 whose running mean of floors
    first exceeds the threshold at their last letter; ``remainder`` holds
    the depth-n words that never cross (the candidates for the slow set).
    Cylinders across all groups and the remainder are pairwise disjoint.
    """

    n: int
    threshold: float
    groups: tuple
    remainder: tuple
    capped: bool

    def group(self, k: int) -> tuple:
        return self.groups[k]


def sn_partition(system: MapWithHoles, n: int, threshold=None, *,
                 max_words: int = 100_000) -> CrossingPartition:
    """Partition itineraries by first certified crossing of the threshold."""
    threshold = _resolve_threshold(system, threshold)
    if n < 1:
        raise ValueError("depth must be at least 1")
    floors = [system.lambda_min(s) for s in range(system.n_branches)]
    groups = [[] for _ in range(n)]
    frontier = [((), 0.0)]
    capped = False
    total = 0
    for depth in range(1, n + 1):
        new_frontier = []
        for word, acc in frontier:
            symbols = (range(system.n_branches) if not word
                       else system.allowed_after(word[-1]))
            for s in symbols:
                acc2 = acc + floors[s]
                child = word + (s,)
                if acc2 > depth * threshold:
                    groups[depth - 1].append(CylinderWord(child))
                else:
                    new_frontier.append((child, acc2))
                total += 1
                if total > max_words:
                    capped = True
                    break
            if capped:
                break
        frontier = new_frontier
        if capped:
            break
    remainder = tuple(CylinderWord(w) for w, _ in frontier) if not capped else ()
    return CrossingPartition(n=n, threshold=threshold,
                             groups=tuple(tuple(g) for g in groups),
                             remainder=remainder, capped=capped)


# ------------------------------------------------------------- depth sweep

@dataclass(frozen=True)
class DepthRow:
    """One depth of the slow-set-versus-envelope comparison."""

    n: int
    mu: float
    mu_f: float
    threshold: float
    kept: int
    pruned: int
    vol_lo: float
    vol_hi: float
    vol_mc: float
    mc_halfwidth: float
    delta: float
    passed: bool
    flag: str


def a2_report(system: MapWithHoles, n_values, *, threshold=None,
              resolution: float = 2.0 ** -9, samples: int = 200_000,
              seed: int = 0, max_words: int = 100_000,
              witness_targets: int = 4) -> list:
    """Measured slow-set volume against the depth envelope, per depth.

    Flags: ``ok`` (measured under the envelope), ``fail`` (over it at a
    depth the envelope is meant to control, i.e. past the depth where it
    dips under the hole volume), ``out-of-contract`` (over it at a
    shallower depth), ``inconclusive`` (word census capped), ``no-hole``
    (the family has no hole, so there is nothing to bound).
    """
    n_values = sorted(set(int(n) for n in n_values))
    rows = []
    if getattr(system, "mu_f", 0.0) <= 0.0:
        mu = float(getattr(system, "mu", float("nan")))
        for n in n_values:
            rows.append(DepthRow(n=n, mu=mu, mu_f=0.0, threshold=0.0, kept=0,
                                 pruned=0, vol_lo=0.0, vol_hi=0.0, vol_mc=0.0,
                                 mc_halfwidth=0.0, delta=float("nan"),
                                 passed=True, flag="no-hole"))
        return rows

    threshold = _resolve_threshold(system, threshold)
    measured = measure_slow_fractions(system, n_values, threshold,
                                      samples=samples, seed=seed)
    n0 = depth_threshold(system.mu_f, system.delta_mu)
    mu = float(getattr(system, "mu", system.mu_f))
    for n in n_values:
        census = enumerate_slow_words(system, n, threshold, max_words=max_words)
        vol_lo, vol_hi = 0.0, 0.0
        if census.capped:
            vol_hi = float("nan")
        else:
            for word in census.kept:
                geo = refine_cylinder(system, word, resolution,
                                      witness_targets=witness_targets, seed=seed)
                vol_lo += geo.vol_lo
                vol_hi += geo.vol_hi
        frac, half = measured[n]
        delta = delta_bound(n, system.delta_mu)
        passed = frac <= delta
        if census.capped:
            flag = "inconclusive"
        elif passed:
            flag = "ok"
        elif n0 is not None and n < n0:
            flag = "out-of-contract"
        else:
            flag = "fail"
        rows.append(DepthRow(n=n, mu=mu, mu_f=float(system.mu_f),
                             threshold=threshold, kept=len(census.kept),
                             pruned=census.pruned, vol_lo=vol_lo, vol_hi=vol_hi,
                             vol_mc=frac, mc_halfwidth=half, delta=delta,
                             passed=passed, flag=flag))
    return rows
