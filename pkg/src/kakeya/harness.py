"""Seeded, persisted Monte Carlo experiments over random slope assignments.

Each experiment sweeps directions over random edge fields and tabulates a
measure statistic against its predicted scaling: pairwise slab
intersections against N*M^(2R-2N), far-window volume against 1/N, the
near-window lower quantile against c/N.  Tiny instances are also evaluated
by exhaustive enumeration over all edge fields, which pins the Monte Carlo
statistics to exact values.

Result files are canonical JSON keyed by (config, seed); rerunning a
config reproduces them byte for byte.  Wall-clock timings go to a sidecar
file so the records stay deterministic.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import kernels
from .cantor import CantorSpec, builtin_curve, direction_set, middle_spec
from .configs import cond_prob_pair
from .percolation import lyons_bounds, resistance
from .sticky import (
    StickyField,
    SlopeAssignment,
    all_fields_exhaustive,
    assignment_from_dirset,
    derive_seed,
)
from .trees import FiniteTree, Vertex, decode_cube, height, leaf_from_index, yca
from .tubes import (
    kappa,
    leaf_centers,
    offset_constant,
    pair_measure,
    pair_sum_over_range,
    poss_set,
    union_volume,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    M: int = 3
    N: int = 6
    d: int = 1
    curve: str = "affine"
    selector: str = "middle"
    samples: int = 200
    slab_offsets: tuple[int, ...] = (2, 3, 4, 5)  # values of N - R to sweep
    quadrature: int = 4  # midpoint samples per M^-N slab
    seed: int = 0
    n_values: tuple[int, ...] | None = None  # overrides N for sweeps
    leaf_budget: int = 10**7
    out_dir: str | None = None

    def ns(self) -> tuple[int, ...]:
        return self.n_values if self.n_values else (self.N,)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["backend"] = kernels.backend()
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def guard(self, N: int) -> None:
        leaves = self.M ** (N * self.d)
        if leaves > self.leaf_budget:
            raise ResourceWarning(
                f"M^(N*d) = {leaves} exceeds the leaf budget {self.leaf_budget}"
            )


def build_spec(cfg: ExperimentConfig, N: int) -> CantorSpec:
    if cfg.selector != "middle":
        raise ValueError(f"unknown selector {cfg.selector!r}")
    return middle_spec(cfg.M, N)


_DIRSET_CACHE: dict = {}


def build_dirset(cfg: ExperimentConfig, N: int):
    key = (cfg.M, N, cfg.d, cfg.curve, cfg.selector)
    if key not in _DIRSET_CACHE:
        spec = build_spec(cfg, N)
        _DIRSET_CACHE[key] = direction_set(spec, builtin_curve(cfg.curve, cfg.d))
    return _DIRSET_CACHE[key]


def sample_assignment(cfg: ExperimentConfig, N: int, index: int) -> SlopeAssignment:
    dirset = build_dirset(cfg, N)
    return assignment_from_dirset(dirset, cfg.d, derive_seed(cfg.seed, index))


# ---------------------------------------------------------------------------
# slab moments
# ---------------------------------------------------------------------------


def _slab_range(M: int, N: int, R: int) -> tuple[float, float]:
    return float(M) ** (R - N), float(M) ** (R + 1 - N)


def _sample_pair_sums(cfg: ExperimentConfig, N: int, R: int) -> np.ndarray:
    cfg.guard(N)
    dirset = build_dirset(cfg, N)
    centers = leaf_centers(cfg.M, N, cfg.d)
    slope_table = dirset.slope_floats()
    side = float(kappa(cfg.d)) * float(cfg.M) ** (-N)
    lo, hi = _slab_range(cfg.M, N, R)
    sums = np.empty(cfg.samples)
    for i in range(cfg.samples):
        assignment = sample_assignment(cfg, N, i)
        slopes = slope_table[assignment.all_slope_indices()]
        sums[i] = pair_sum_over_range(centers, slopes, lo, hi, side)
    return sums


def _exhaustive_pair_sums(cfg: ExperimentConfig, N: int, R: int) -> np.ndarray:
    dirset = build_dirset(cfg, N)
    centers = leaf_centers(cfg.M, N, cfg.d)
    slope_table = dirset.slope_floats()
    side = float(kappa(cfg.d)) * float(cfg.M) ** (-N)
    lo, hi = _slab_range(cfg.M, N, R)
    out = []
    for idx in all_fields_exhaustive(cfg.M**cfg.d, N):
        slopes = slope_table[idx]
        out.append(pair_sum_over_range(centers, slopes, lo, hi, side))
    return np.asarray(out)


def slab_sum_expectation_exact(cfg: ExperimentConfig, N: int, R: int) -> float:
    """Exact expectation of the pairwise slab intersection sum, from the
    closed-form pair probabilities (independent of any sampling)."""
    dirset = build_dirset(cfg, N)
    n_slopes = dirset.n
    side = float(kappa(cfg.d)) * float(cfg.M) ** (-N)
    lo, hi = _slab_range(cfg.M, N, R)
    B = cfg.M**cfg.d
    leaves = [leaf_from_index(i, B, N) for i in range(B**N)]
    centers = leaf_centers(cfg.M, N, cfg.d)
    slope_table = dirset.slope_floats()
    addr = [
        tuple((k >> (N - 1 - j)) & 1 for j in range(N)) for k in range(n_slopes)
    ]
    total = 0.0
    for i1, t1 in enumerate(leaves):
        for i2, t2 in enumerate(leaves):
            if i1 == i2:
                continue
            for k1 in range(n_slopes):
                p_first = Fraction(1, 2**N)
                for k2 in range(n_slopes):
                    p_cond = cond_prob_pair(t1, t2, addr[k1], addr[k2])
                    if p_cond == 0:
                        continue
                    m = pair_measure(
                        centers[i1],
                        slope_table[k1],
                        centers[i2],
                        slope_table[k2],
                        lo,
                        hi,
                        side,
                    )
                    if m:
                        total += float(p_first * p_cond) * m
    return total


def slab_first_moment(cfg: ExperimentConfig, exhaustive: bool = False) -> dict:
    rows = []
    for N in cfg.ns():
        for off in cfg.slab_offsets:
            R = N - off
            if R < 0:
                continue
            sums = (
                _exhaustive_pair_sums(cfg, N, R)
                if exhaustive
                else _sample_pair_sums(cfg, N, R)
            )
            scale = N * float(cfg.M) ** (2 * R - 2 * N)
            rows.append(
                {
                    "N": N,
                    "R": R,
                    "samples": int(sums.size),
                    "mean_sum": float(sums.mean()),
                    "scale": scale,
                    "ratio": float(sums.mean() / scale),
                    "ci99": float(2.5758 * sums.std(ddof=1) / math.sqrt(sums.size))
                    if sums.size > 1
                    else 0.0,
                }
            )
    return {"experiment": "slab-first-moment", "rows": rows}


def slab_second_moment(cfg: ExperimentConfig, exhaustive: bool = False) -> dict:
    rows = []
    for N in cfg.ns():
        for off in cfg.slab_offsets:
            R = N - off
            if R < 0:
                continue
            sums = (
                _exhaustive_pair_sums(cfg, N, R)
                if exhaustive
                else _sample_pair_sums(cfg, N, R)
            )
            sq = sums**2
            scale = (N * float(cfg.M) ** (2 * R - 2 * N)) ** 2
            rows.append(
                {
                    "N": N,
                    "R": R,
                    "samples": int(sums.size),
                    "mean_square": float(sq.mean()),
                    "scale": scale,
                    "ratio": float(sq.mean() / scale),
                    "ci99": float(2.5758 * sq.std(ddof=1) / math.sqrt(sq.size))
                    if sq.size > 1
                    else 0.0,
                }
            )
    return {"experiment": "slab-second-moment", "rows": rows}


# ---------------------------------------------------------------------------
# volume sweeps (lower and upper bound surrogates)
# ---------------------------------------------------------------------------


def volume_sweep(cfg: ExperimentConfig, c0: int | None = None) -> dict:
    """Near- and far-window volumes of every sampled realization."""
    rows = []
    for N in cfg.ns():
        cfg.guard(N)
        dirset = build_dirset(cfg, N)
        if c0 is None:
            c0 = offset_constant(cfg.d, dirset.lip_lo)
        centers = leaf_centers(cfg.M, N, cfg.d)
        slope_table = dirset.slope_floats()
        near = np.empty(cfg.samples)
        far = np.empty(cfg.samples)
        for i in range(cfg.samples):
            assignment = sample_assignment(cfg, N, i)
            slopes = slope_table[assignment.all_slope_indices()]
            near[i], _ = union_volume(
                centers, slopes, 0.0, 1.0, cfg.M, N, samples=cfg.quadrature
            )
            far[i], _ = union_volume(
                centers,
                slopes,
                float(c0),
                float(c0) + 1.0,
                cfg.M,
                N,
                samples=cfg.quadrature,
            )
        rows.append(
            {
                "N": N,
                "c0": c0,
                "samples": cfg.samples,
                "near_mean": float(near.mean()),
                "near_q25": float(np.quantile(near, 0.25)),
                "far_mean": float(far.mean()),
                "far_mean_times_n": float(N * far.mean()),
                "far_ci99": float(2.5758 * far.std(ddof=1) / math.sqrt(cfg.samples)),
                "ratio_mean": float((near / far).mean()),
            }
        )
    return {"experiment": "volume-sweep", "rows": rows}


def lower_bound_experiment(cfg: ExperimentConfig, sweep: dict | None = None) -> dict:
    """Lower quartile of near-window volumes: the value exceeded by three
    quarters of realizations, compared against c/N and c*sqrt(log N)/N."""
    if cfg.samples < 100:
        raise ValueError("lower bound experiment needs >= 100 samples")
    sweep = sweep or volume_sweep(cfg)
    rows = []
    for r in sweep["rows"]:
        N = r["N"]
        q = r["near_q25"]
        rows.append(
            {
                "N": N,
                "quantile75_mass": q,
                "c_over_n": q * N,
                "c_sqrtlog": q * N / math.sqrt(math.log(N)) if N > 1 else q * N,
            }
        )
    cs = [r["c_over_n"] for r in rows]
    return {
        "experiment": "lower-bound",
        "rows": rows,
        "fitted_c": min(cs),
        "spread": max(cs) / min(cs) if min(cs) > 0 else math.inf,
    }


def upper_bound_experiment(cfg: ExperimentConfig, sweep: dict | None = None) -> dict:
    """Mean far-window volume against the 1/N law, plus the independent
    pointwise bound integral min(1, 2/(1+R(Poss(x)))) over the far box."""
    sweep = sweep or volume_sweep(cfg)
    rows = []
    for r in sweep["rows"]:
        rows.append(
            {
                "N": r["N"],
                "far_mean": r["far_mean"],
                "far_ci99": r["far_ci99"],
                "n_times_mean": r["far_mean_times_n"],
            }
        )
    vals = [r["n_times_mean"] for r in rows]
    return {
        "experiment": "upper-bound",
        "rows": rows,
        "spread": max(vals) / min(vals) if min(vals) > 0 else math.inf,
    }


def pointwise_percolation_bound(
    cfg: ExperimentConfig, N: int, grid: int = 200, c0: int | None = None
) -> dict:
    """Monte Carlo integral over the far box of min(1, 2/(1+R(Poss(x)))),
    an upper bound for the expected far-window volume."""
    dirset = build_dirset(cfg, N)
    if c0 is None:
        c0 = offset_constant(cfg.d, dirset.lip_lo)
    rng = np.random.default_rng(derive_seed(cfg.seed, 10_000_019))
    box_lo = np.array([float(c0)] + [-2.0 * c0] * cfg.d)
    box_hi = np.array([float(c0) + 1.0] + [2.0 * c0] * cfg.d)
    box_vol = float(np.prod(box_hi - box_lo))
    vals = np.empty(grid)
    resistances = np.empty(grid)
    for i in range(grid):
        x = rng.uniform(box_lo, box_hi)
        poss = poss_set(x, dirset, N, cfg.d)
        if len(poss) == 0:
            vals[i] = 0.0
            resistances[i] = math.inf
            continue
        tree = FiniteTree.from_leaves(poss.roots())
        r = resistance(tree)
        resistances[i] = float(r)
        vals[i] = min(1.0, float(lyons_bounds(r)[1]))
    est = box_vol * float(vals.mean())
    ci = box_vol * 2.5758 * float(vals.std(ddof=1)) / math.sqrt(grid)
    finite = resistances[np.isfinite(resistances)]
    return {
        "N": N,
        "bound_integral": est,
        "ci99": ci,
        "grid": grid,
        "min_resistance": float(finite.min()) if finite.size else math.inf,
        "mean_resistance": float(finite.mean()) if finite.size else math.inf,
    }


def resistance_growth(cfg: ExperimentConfig, points: int = 100) -> dict:
    """Fitted beta with R(Poss(x)) >= beta*N over random far points.

    Points are drawn from the reachable strip (the far box clipped to the
    cone the tube directions can sweep); points whose possible-root set is
    still empty sit in a gap of the direction set and are skipped.
    """
    rows = []
    for N in cfg.ns():
        dirset = build_dirset(cfg, N)
        c0 = offset_constant(cfg.d, dirset.lip_lo)
        slopes = dirset.slope_floats()
        rng = np.random.default_rng(derive_seed(cfg.seed, 20_000_003 + N))
        ratios = []
        attempts = 0
        while len(ratios) < points and attempts < 20 * points:
            attempts += 1
            x1 = rng.uniform(c0, c0 + 1.0)
            lo = np.maximum(x1 * slopes.min(axis=0), -2.0 * c0)
            hi = np.minimum(1.0 + x1 * slopes.max(axis=0), 2.0 * c0)
            xbar = rng.uniform(lo, hi)
            poss = poss_set((x1, *xbar), dirset, N, cfg.d)
            if len(poss) == 0:
                continue
            tree = FiniteTree.from_leaves(poss.roots())
            ratios.append(float(resistance(tree)) / N)
        if not ratios:
            raise RuntimeError(f"no far point hit any tube at N={N}")
        rows.append(
            {
                "N": N,
                "points": len(ratios),
                "attempts": attempts,
                "beta_min": min(ratios),
                "beta_mean": float(np.mean(ratios)),
            }
        )
    return {
        "experiment": "resistance-growth",
        "rows": rows,
        "fitted_beta": min(r["beta_min"] for r in rows),
    }


# ---------------------------------------------------------------------------
# measure-theoretic union bound
# ---------------------------------------------------------------------------


def measure_union_bound(alpha, n: int, L) -> Fraction:
    """Lower bound alpha^2 n^2 / (16 L) for the measure of a union of n
    equal-measure sets whose pairwise intersection total is at most L."""
    alpha = Fraction(alpha)
    L = Fraction(L)
    if alpha < 0 or n < 1 or L <= 0:
        raise ValueError("need alpha >= 0, n >= 1, L > 0")
    return alpha**2 * n**2 / (16 * L)


# ---------------------------------------------------------------------------
# counting diagnostics
# ---------------------------------------------------------------------------


def _cube_bounds(t: Vertex, M: int, d: int):
    corner, side = decode_cube(t, M, d)
    lo = np.array([float(c) for c in corner])
    return lo, lo + float(side)


def counting_diagnostics(
    cfg: ExperimentConfig, N: int | None = None, k: int | None = None
) -> dict:
    """Cardinalities of the deterministic slab-counting sets against their
    predicted growth rates, with fitted constants.

    For a slab index k and an ancestor cube u:
      near-boundary roots:   roots in u within theta of a child boundary,
                             against (k/M^N) M^(d(N-h(u)));
      close sibling pairs:   t2 with yca u and centre distance <= theta;
      reachable pairs:       (t2, v2) whose tube meets a fixed (t1, v1)
                             tube inside the slab, with address constraint,
                             against 2^(N-h(u)).
    """
    N = N or cfg.ns()[0]
    if cfg.M ** (N * cfg.d) > 4096:
        raise ResourceWarning("counting diagnostics are exhaustive; keep M^(N*d) small")
    dirset = build_dirset(cfg, N)
    M, d = cfg.M, cfg.d
    if k is None:
        k = M ** (N - 1)  # slab at x1 ~ 1/M
    lo_x, hi_x = k * float(M) ** (-N), (k + 1) * float(M) ** (-N)
    side = float(kappa(d)) * float(M) ** (-N)
    lip = dirset.lip_hi
    B = M**d
    leaves = [leaf_from_index(i, B, N) for i in range(B**N)]
    centers = leaf_centers(M, N, d)
    slope_table = dirset.slope_floats()
    n_slopes = dirset.n
    addr_h = lambda k1, k2: N - (k1 ^ k2).bit_length() if k1 != k2 else N

    rows = []
    for hu in range(0, N):
        u = leaves[0][:hu]  # the leftmost cube at each height
        theta = lip * (k + 1) * float(M) ** (-N - hu) + 2 * side * math.sqrt(d)
        in_u = [i for i, t in enumerate(leaves) if t[:hu] == u]
        a_u = []
        for i in in_u:
            child = leaves[i][: hu + 1]
            clo, chi = _cube_bounds(child, M, d)
            tlo, thi = _cube_bounds(leaves[i], M, d)
            dist = min(
                min(tlo[a] - clo[a], chi[a] - thi[a]) for a in range(d)
            )
            if dist <= theta:
                a_u.append(i)
        bound_a = (k / float(M) ** N) * float(M) ** (d * (N - hu))
        t1 = a_u[0] if a_u else in_u[0]
        b_t1 = [
            j
            for j in in_u
            if j != t1
            and height(yca(leaves[t1], leaves[j])) == hu
            and np.linalg.norm(centers[t1] - centers[j]) <= theta
        ]
        v1 = 0
        e_u = 0
        for j in b_t1:
            for k2 in range(n_slopes):
                if addr_h(v1, k2) < hu:
                    continue
                m = pair_measure(
                    centers[t1],
                    slope_table[v1],
                    centers[j],
                    slope_table[k2],
                    lo_x,
                    hi_x,
                    side,
                )
                if m > 0:
                    e_u += 1
        rows.append(
            {
                "h_u": hu,
                "k": k,
                "near_boundary_count": len(a_u),
                "near_boundary_bound": bound_a,
                "near_boundary_constant": len(a_u) / bound_a if bound_a else math.inf,
                "close_pair_count": len(b_t1),
                "reachable_count": e_u,
                "reachable_bound": 2.0 ** (N - hu),
                "reachable_constant": e_u / 2.0 ** (N - hu),
            }
        )
    return {"experiment": "counting-diagnostics", "rows": rows}


def estar_diagnostic(cfg: ExperimentConfig, N: int | None = None) -> dict:
    """Cardinality of the four-point candidate sets behind the second
    moment estimate, stratified by the cross-ancestor height.

    For a fixed pair (t2, v2), (t2', v2') in type-2 position under an
    ancestor u, counts the admissible (t1, v1), (t1', v1') whose tubes
    meet the fixed ones inside a thin slab; the count at cross height
    h(u1) is checked against its predicted ceiling 2^(2N-h(u)-h(u1)).
    """
    N = N or cfg.ns()[0]
    if cfg.d != 1:
        raise ValueError("the candidate-set diagnostic is implemented for d=1")
    if cfg.M**N > 256:
        raise ResourceWarning("candidate-set diagnostic is exhaustive; keep M^N small")
    dirset = build_dirset(cfg, N)
    M = cfg.M
    leaves = [leaf_from_index(i, M, N) for i in range(M**N)]
    centers = leaf_centers(M, N, 1)
    slope_table = dirset.slope_floats()
    n_slopes = dirset.n
    side = float(kappa(1)) * float(M) ** (-N)
    # slab at x1 ~ 1: far enough that candidates on the left can drift in
    k = M**N
    lo_x, hi_x = k * float(M) ** (-N), (k + 1) * float(M) ** (-N)

    def addr(v: int) -> Vertex:
        return tuple((v >> (N - 1 - j)) & 1 for j in range(N))

    rows = []
    for hu in range(0, N - 1):
        u = leaves[0][:hu]
        # fixed deep pair: rightmost siblings inside u, slopes near zero,
        # so left-of-u candidates with larger slopes can reach them
        prefix = u + (M - 1,) * (N - hu - 1)
        t2 = prefix + (0,)
        t2p = prefix + (M - 1,)
        v2, v2p = 0, 1  # addresses sharing N-1 levels, matching h(D(t2, t2'))
        fixed = [(t2, addr(v2)), (t2p, addr(v2p))]

        def reach(t_fix, v_fix):
            out = []
            i_fix = index_of(t_fix)
            for i, t1 in enumerate(leaves):
                if height(yca(t1, t_fix)) != hu:
                    continue
                for k1 in range(n_slopes):
                    if N - (k1 ^ v_fix).bit_length() < hu and k1 != v_fix:
                        continue
                    m = pair_measure(
                        centers[i],
                        slope_table[k1],
                        centers[i_fix],
                        slope_table[v_fix],
                        lo_x,
                        hi_x,
                        side,
                    )
                    if m > 0:
                        out.append((t1, k1))
            return out

        def index_of(t):
            v = 0
            for dig in t:
                v = v * M + dig
            return v

        e1 = reach(t2, v2)
        e2 = reach(t2p, v2p)
        by_height: dict[int, int] = {}
        from .sticky import sticky_admissible

        for t1, k1 in e1:
            for t1p, k1p in e2:
                if t1 == t1p:
                    continue  # four distinct roots required
                pairs = fixed + [(t1, addr(k1)), (t1p, addr(k1p))]
                if not sticky_admissible(pairs):
                    continue
                h_u1 = height(yca(t1, t1p))
                by_height[h_u1] = by_height.get(h_u1, 0) + 1
        for h_u1, count in sorted(by_height.items()):
            bound = 2.0 ** (2 * N - hu - h_u1)
            rows.append(
                {
                    "h_u": hu,
                    "h_u1": h_u1,
                    "count": count,
                    "bound": bound,
                    "constant": count / bound,
                }
            )
    return {"experiment": "candidate-sets", "rows": rows}


# ---------------------------------------------------------------------------
# i.i.d. audit of the induced percolation bits
# ---------------------------------------------------------------------------


def percolation_iid_audit(
    cfg: ExperimentConfig,
    N: int | None = None,
    fields: int = 10_000,
    point: tuple | None = None,
) -> dict:
    """Consistency and uniformity checks for the induced edge bits.

    For a far-box point, every possible root carries a unique binary
    address; an edge bit is "agree" when the field bit matches the address
    bit at that level.  Computed independently through every leaf under
    the edge, the values must coincide (consistency), and across fields
    each edge bit must look like an independent fair coin.
    """
    from scipy.stats import chi2

    N = N or cfg.ns()[0]
    dirset = build_dirset(cfg, N)
    d = cfg.d
    c0 = offset_constant(d, dirset.lip_lo)
    if point is None:
        rng = np.random.default_rng(derive_seed(cfg.seed, 30_000_001))
        while True:
            x = rng.uniform(
                [float(c0)] + [-0.5] * d, [float(c0) + 1.0] + [0.5] * d
            )
            poss = poss_set(x, dirset, N, d)
            if len(poss) >= 4:
                point = tuple(float(v) for v in x)
                break
    else:
        poss = poss_set(point, dirset, N, d)
    roots = poss.roots()
    beta = {}
    for t in roots:
        wit = poss.witnesses[t]
        if len(wit) != 1:
            raise RuntimeError("audit point lacks unique witnesses")
        idx = wit[0]
        beta[t] = tuple((idx >> (N - 1 - j)) & 1 for j in range(N))
    tree = FiniteTree.from_leaves(roots)
    edges = tree.edges()
    edge_index = {e: i for i, e in enumerate(edges)}
    base = cfg.M**d
    from .sticky import node_id

    # (leaf, level) incidence lists: route r computes Y at edge edge_of[r]
    leaf_node_ids = []
    route_edge = []
    route_beta = []
    for t in roots:
        for lvl in range(1, N + 1):
            e = t[:lvl]
            leaf_node_ids.append(node_id(e, base))
            route_edge.append(edge_index[e])
            route_beta.append(beta[t][lvl - 1])
    ids = np.array(leaf_node_ids, dtype=np.uint64)
    route_edge = np.array(route_edge)
    route_beta = np.array(route_beta, dtype=np.uint8)
    E = len(edges)
    ones = np.zeros(E, dtype=np.int64)
    consistency_violations = 0
    pair_cells = np.zeros((min(64, E // 2), 4), dtype=np.int64)
    pair_a = np.arange(pair_cells.shape[0]) * 2
    pair_b = pair_a + 1
    for f in range(fields):
        fld = StickyField(seed=derive_seed(cfg.seed, 40_000_007 + f), base=base)
        bits = kernels.node_bits(fld.key, ids)
        y = (bits == route_beta).astype(np.int8)
        mins = np.full(E, 2, dtype=np.int8)
        maxs = np.full(E, -1, dtype=np.int8)
        np.minimum.at(mins, route_edge, y)
        np.maximum.at(maxs, route_edge, y)
        if np.any(mins != maxs):
            consistency_violations += 1
        ye = mins
        ones += ye
        cell = 2 * ye[pair_a] + ye[pair_b]
        for c in range(4):
            pair_cells[:, c] += cell == c
    half = fields / 2.0
    chi_edges = float((((ones - half) ** 2) / half * 2).sum())
    chi_edges_threshold = float(chi2.ppf(0.99, E))
    quarter = fields / 4.0
    chi_pairs = float((((pair_cells - quarter) ** 2) / quarter).sum())
    chi_pairs_threshold = float(chi2.ppf(0.99, 3 * pair_cells.shape[0]))
    freqs = ones / fields
    return {
        "experiment": "iid-audit",
        "point": list(point),
        "edges": E,
        "fields": fields,
        "consistency_violations": int(consistency_violations),
        "freq_min": float(freqs.min()),
        "freq_max": float(freqs.max()),
        "chi2_edges": chi_edges,
        "chi2_edges_threshold": chi_edges_threshold,
        "chi2_pairs": chi_pairs,
        "chi2_pairs_threshold": chi_pairs_threshold,
        "pass": bool(
            consistency_violations == 0
            and chi_edges <= chi_edges_threshold
            and chi_pairs <= chi_pairs_threshold
        ),
    }


# ---------------------------------------------------------------------------
# operator-norm floor and persistence
# ---------------------------------------------------------------------------


def maximal_norm_floor(ratio: float, p: float, c0: float = 1.0) -> float:
    """Lower bound c0 * ratio^(1/p) on the directional maximal operator
    norm implied by a measured dilate ratio."""
    if ratio < 1:
        raise ValueError("ratio must be >= 1")
    if p < 1:
        raise ValueError("p must be >= 1")
    return c0 * ratio ** (1.0 / p)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def save_result(result: dict, cfg: ExperimentConfig, out_dir: str | Path) -> Path:
    """Persist one experiment result: deterministic JSON records plus a
    CSV summary table and a non-deterministic timing sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = f"{result['experiment']}-{cfg.config_hash()}"
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        **result,
    }
    json_path = out / f"{name}.json"
    json_path.write_text(canonical_json(payload) + "\n")
    rows = result.get("rows", [])
    if rows:
        csv_path = out / f"{name}.csv"
        with csv_path.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=sorted(rows[0]))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: row.get(k) for k in sorted(rows[0])})
    meta_path = out / f"{name}.meta.json"
    meta_path.write_text(
        json.dumps({"written_at": time.time(), "backend": kernels.backend()}) + "\n"
    )
    return json_path
