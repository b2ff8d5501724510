"""Donor-implantation yield and array connectivity.

A site is good when it ends up holding exactly one donor. In the
sense/re-implant procedure every site that is still empty after a pass is
dosed again; occupied sites (good or over-filled) are left alone.

Random numbers come from the counter-based Philox generator keyed on
``(seed, stream)``, where the stream is a chunk index for implant Monte Carlo
and a trial index for percolation, so any partitioning of the work reproduces
a serial run bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numba
import numpy as np
from scipy import optimize

from .donor import ConvergenceError

YIELD_CSV_HEADER = ("n", "p_star", "yield")
PERCOLATION_CSV_HEADER = ("occupancy", "L", "spanning_prob", "stderr")
MC_CHUNK = 1 << 16
#: exact site-percolation threshold of the triangular lattice
TRIANGULAR_THRESHOLD = 0.5


def _generator(seed, stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


# --- closed forms -------------------------------------------------------------------


def single_site_yield(p):
    """Probability of exactly one ion for a Poisson dose with mean `p`."""
    if np.any(np.asarray(p) < 0):
        raise ValueError("dose must be >= 0")
    return p * np.exp(-p)


def adjacent_pair_yield(p):
    """Two independent neighbouring sites both good."""
    return single_site_yield(p) ** 2


def reimplant_yield_uniform(n, p):
    """Good-site fraction after `n` passes of equal dose `p`."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    if np.any(np.asarray(p) <= 0):
        raise ValueError("dose must be positive")
    return p * np.exp(-p) * (1.0 - np.exp(-n * p)) / (1.0 - np.exp(-p))


def reimplant_yield_limit(p):
    """Uniform-dose yield as the number of passes goes to infinity."""
    return p * np.exp(-p) / (1.0 - np.exp(-p))


@dataclass(frozen=True)
class ImplantStrategy:
    """Per-pass Poisson means. A zero dose is a no-op pass."""

    doses: tuple

    def __post_init__(self):
        doses = tuple(float(p) for p in self.doses)
        if not doses:
            raise ValueError("strategy needs at least one pass")
        if any(not np.isfinite(p) or p < 0 for p in doses):
            raise ValueError(f"doses must be finite and >= 0, got {doses}")
        object.__setattr__(self, "doses", doses)

    def __len__(self):
        return len(self.doses)


def reimplant_yield_general(strategy: ImplantStrategy):
    g, empty = 0.0, 1.0
    for p in strategy.doses:
        g += empty * p * np.exp(-p)
        empty *= np.exp(-p)
    return g


def optimize_uniform(n):
    """Best equal dose for `n` passes by golden-section search; returns (p, yield)."""
    grid = np.geomspace(1e-4, 10.0, 401)
    k = int(np.argmax([reimplant_yield_uniform(n, p) for p in grid]))
    k = min(max(k, 1), len(grid) - 2)
    res = optimize.minimize_scalar(
        lambda p: -reimplant_yield_uniform(n, p), bracket=tuple(grid[k - 1:k + 2]), method="golden", tol=1e-10
    )
    if not res.success:
        raise ConvergenceError(f"uniform-dose optimization failed for n={n}")
    return float(res.x), float(-res.fun)


def optimize_reimplant(n, starts=8, tol=1e-10, max_sweeps=1000, seed=0):
    """Maximize the general yield over all per-pass doses by multi-start coordinate ascent."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    inits = [np.ones(n)] + [rng.uniform(0.05, 3.0, n) for _ in range(starts - 1)]
    best = None
    for x in inits:
        x = x.copy()
        current = reimplant_yield_general(ImplantStrategy(x))
        for _ in range(max_sweeps):
            for k in range(n):

                def neg(pk, k=k):
                    x[k] = pk
                    return -reimplant_yield_general(ImplantStrategy(x))

                res = optimize.minimize_scalar(neg, bounds=(0.0, 10.0), method="bounded",
                                               options={"xatol": 1e-12})
                x[k] = res.x
            new = reimplant_yield_general(ImplantStrategy(x))
            if abs(new - current) < tol:
                current = new
                break
            current = new
        else:
            raise ConvergenceError(f"coordinate ascent did not converge for n={n}")
        if best is None or current > best[1]:
            best = (ImplantStrategy(x), float(current))
    return best


def perfect_placement_strategy():
    """Deterministic placement (molecular self-assembly, probe writing): every site good."""
    return 1.0


# --- Monte Carlo --------------------------------------------------------------------


@dataclass(frozen=True)
class YieldEstimate:
    estimate: float
    stderr: float
    sites: int
    seed: int


def monte_carlo_yield(strategy: ImplantStrategy, sites, seed=0):
    """Simulate sense/re-implant on `sites` independent sites."""
    if sites < 1:
        raise ValueError("sites must be >= 1")
    good = 0
    for chunk, start in enumerate(range(0, sites, MC_CHUNK)):
        size = min(MC_CHUNK, sites - start)
        rng = _generator(seed, chunk)
        counts = np.zeros(size, dtype=np.int64)
        for p in strategy.doses:
            if p == 0.0:
                continue
            empty = counts == 0
            counts[empty] = rng.poisson(p, int(empty.sum()))
        good += int(np.count_nonzero(counts == 1))
    q = good / sites
    return YieldEstimate(q, float(np.sqrt(q * (1.0 - q) / sites)), int(sites), int(seed))


# --- percolation --------------------------------------------------------------------

# Triangular lattice on a rhombus: (i, j) touches (i, j±1), (i±1, j), (i-1, j+1), (i+1, j-1).
_NEIGHBOURS = np.array([[0, 1], [0, -1], [1, 0], [-1, 0], [-1, 1], [1, -1]], dtype=np.int64)


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True)
def _union(parent, rank, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if rank[ra] < rank[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    if rank[ra] == rank[rb]:
        rank[ra] += 1


@numba.njit(cache=True)
def _spans(occupied, nbrs):
    """Left-right spanning of occupied sites; virtual nodes n (left) and n+1 (right)."""
    h, w = occupied.shape
    n = h * w
    parent = np.arange(n + 2)
    rank = np.zeros(n + 2, dtype=np.int64)
    for i in range(h):
        for j in range(w):
            if not occupied[i, j]:
                continue
            s = i * w + j
            if j == 0:
                _union(parent, rank, s, n)
            if j == w - 1:
                _union(parent, rank, s, n + 1)
            for k in range(nbrs.shape[0]):
                ii = i + nbrs[k, 0]
                jj = j + nbrs[k, 1]
                if 0 <= ii < h and 0 <= jj < w and occupied[ii, jj]:
                    _union(parent, rank, s, ii * w + jj)
    return _find(parent, n) == _find(parent, n + 1)


@numba.njit(cache=True)
def _critical_occupancy(u, nbrs):
    """Smallest occupancy at which sites with u < occupancy span left to right.

    Sites are switched on in increasing order of `u` (Newman-Ziff).
    """
    h, w = u.shape
    n = h * w
    parent = np.arange(n + 2)
    rank = np.zeros(n + 2, dtype=np.int64)
    on = np.zeros(n, dtype=np.bool_)
    order = np.argsort(u.ravel())
    flat = u.ravel()
    for t in range(n):
        s = order[t]
        i = s // w
        j = s % w
        on[s] = True
        if j == 0:
            _union(parent, rank, s, n)
        if j == w - 1:
            _union(parent, rank, s, n + 1)
        for k in range(nbrs.shape[0]):
            ii = i + nbrs[k, 0]
            jj = j + nbrs[k, 1]
            if 0 <= ii < h and 0 <= jj < w and on[ii * w + jj]:
                _union(parent, rank, s, ii * w + jj)
        if _find(parent, n) == _find(parent, n + 1):
            # occupancy must strictly exceed this site's u
            return np.nextafter(flat[s], np.inf)
    return np.inf


def spans(occupied):
    """True if occupied sites connect the left and right edges."""
    return bool(_spans(np.ascontiguousarray(occupied, dtype=np.bool_), _NEIGHBOURS))


@dataclass(frozen=True)
class LatticeSpec:
    width: int
    height: int
    occupancy: float
    seed: int = 0
    topology: str = "triangular"

    def __post_init__(self):
        if self.topology != "triangular":
            raise ValueError("only the triangular topology is supported")
        if self.width < 2 or self.height < 2:
            raise ValueError("lattice must be at least 2x2")
        if not 0.0 <= self.occupancy <= 1.0:
            raise ValueError("occupancy must be in [0, 1]")


def trial_uniforms(spec: LatticeSpec, trial):
    """Per-site uniforms for one trial; site is good when its value < occupancy."""
    return _generator(spec.seed, trial).random((spec.height, spec.width))


@dataclass(frozen=True)
class SpanningEstimate:
    probability: float
    stderr: float
    trials: int


def percolation_probability(spec: LatticeSpec, trials):
    """Fraction of trials with a left-right spanning cluster of good sites."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = 0
    for t in range(trials):
        hits += spans(trial_uniforms(spec, t) < spec.occupancy)
    q = hits / trials
    return SpanningEstimate(q, float(np.sqrt(q * (1.0 - q) / trials)), int(trials))


def critical_occupancies(width, height, trials, seed=0):
    """Per-trial spanning threshold under the same random numbers as :func:`percolation_probability`."""
    spec = LatticeSpec(width, height, 0.0, seed)
    return np.array([_critical_occupancy(trial_uniforms(spec, t), _NEIGHBOURS) for t in range(trials)])


@dataclass(frozen=True)
class ThresholdEstimate:
    estimate: float
    uncertainty: float
    sizes: tuple
    crossings: tuple  # occupancy where spanning probability hits 0.5, per size
    spreads: tuple  # std of per-trial thresholds, per size


def _half_crossing(thresholds, tol=1e-9):
    # bisection on the empirical spanning fraction, monotone by construction
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.mean(thresholds <= mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def percolation_threshold_estimate(sizes, trials, seed=0, min_trials=50):
    """Occupancy where the spanning probability is 1/2, extrapolated to 1/L -> 0.

    Uses L x L lattices. The uncertainty combines the fit residual with the
    standard error of the median at each size.
    """
    sizes = tuple(sorted(int(s) for s in sizes))
    if len(sizes) < 2:
        raise ValueError("need at least two lattice sizes")
    if trials < min_trials:
        raise ValueError(f"{trials} trials is too few for a threshold estimate (need >= {min_trials})")
    crossings, spreads, errs = [], [], []
    for k, L in enumerate(sizes):
        th = critical_occupancies(L, L, trials, seed=seed + k)
        crossings.append(_half_crossing(th))
        spreads.append(float(np.std(th)))
        # standard error of a sample median ~ 1.2533 * sigma / sqrt(n)
        errs.append(1.2533 * spreads[-1] / np.sqrt(trials))
    x = 1.0 / np.array(sizes, dtype=float)
    y = np.array(crossings)
    wts = 1.0 / np.array(errs)
    if len(sizes) == 2:
        coef = np.polyfit(x, y, 1, w=wts)
        cov_intercept = (errs[0] ** 2 * x[1] ** 2 + errs[1] ** 2 * x[0] ** 2) / (x[1] - x[0]) ** 2
    else:
        coef, cov = np.polyfit(x, y, 1, w=wts, cov="unscaled")
        cov_intercept = cov[1, 1]
    return ThresholdEstimate(
        estimate=float(coef[1]),
        uncertainty=float(np.sqrt(cov_intercept)),
        sizes=sizes,
        crossings=tuple(float(c) for c in crossings),
        spreads=tuple(spreads),
    )


# --- tables ---------------------------------------------------------------------


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def yield_table(ns):
    """Rows ``(n, p_star, yield)`` for the best uniform dose at each pass count."""
    return [(int(n), *optimize_uniform(int(n))) for n in ns]


def yield_table_csv(ns):
    return _csv(YIELD_CSV_HEADER, yield_table(ns))


def percolation_sweep(sizes, occupancies, trials, seed=0):
    rows = []
    for L in sizes:
        for occ in occupancies:
            est = percolation_probability(LatticeSpec(L, L, occ, seed), trials)
            rows.append((float(occ), int(L), est.probability, est.stderr))
    return rows


def percolation_sweep_csv(sizes, occupancies, trials, seed=0):
    return _csv(PERCOLATION_CSV_HEADER, percolation_sweep(sizes, occupancies, trials, seed))
