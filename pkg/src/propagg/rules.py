"""Aggregation rules: map a voter profile to a collective scoring vector
(fixed-vector rules) or to a per-batch collective ranking (per-batch rules).

Fixed-vector rules:
    * arithmetic_mean   -- weighted Euclidean mean, renormalized (closed form)
    * angular_mean      -- minimizer of the weighted squared angular distance
    * geometric_median  -- minimizer of the weighted chord distance (Weiszfeld)

Per-batch rules:
    * borda_ranking     -- weighted positional scoring
    * psb_ranking       -- sequential winner selection with multiplicative
                           weight decay for already-served voters

All randomness (restarts, jitter, probes) is counter-addressed from the
options seed, so every rule is a deterministic function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import (
    FloatArray,
    Profile,
    Ranking,
    pair_count,
    rank_batch,
    unit_vector,
)
from .sampling import ItemDistribution, SeedSpec, generator_at, sample_batch

# Dedicated stream ids for the optimizer's internal randomness.
_RESTART_STREAM = 11
_JITTER_STREAM = 12
_PROBE_STREAM = 13

_STEP_FLOOR = 1e-12          # backtracking line-search floor
_ANTIPODAL_GUARD = 1e-7      # jitter when an iterate is this close to pi
_JITTER_SIZE = 1e-5
_PROBE_COUNT = 64
_PROBE_SIZE = 1e-4
_PROBE_GAIN = 1e-10


class DegenerateMeanError(ValueError):
    """The weighted vector sum has (numerically) zero norm."""


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the iterative rules (angular mean, geometric median)."""

    max_iters: int = 10000
    step_init: float = 1.0
    tol_grad: float = 1e-10
    restarts: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol_grad > 0.0:
            raise ValueError("tol_grad must be > 0")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class OptimizerDiagnostics:
    """Outcome of an angular-mean optimization."""

    iterations: int
    final_grad_norm: float
    objective: float
    restarts_used: int
    converged: bool


def arithmetic_mean(profile: Profile) -> FloatArray:
    """Weighted Euclidean mean of the voter vectors, renormalized to the sphere.

    Raises DegenerateMeanError when the weighted sum has norm <= 1e-12 (for
    example two antipodal voters with equal weight).
    """
    v = profile.weights @ profile.vectors
    n = float(np.linalg.norm(v))
    if n <= 1e-12:
        raise DegenerateMeanError("weighted vector sum is numerically zero")
    return v / n


def angular_objective(profile: Profile, theta: FloatArray) -> float:
    """Weighted sum of squared angular distances from ``theta`` to the voters."""
    c = np.clip(profile.vectors @ np.asarray(theta, dtype=np.float64), -1.0, 1.0)
    d = np.arccos(c)
    return float(profile.weights @ (d * d))


def _eval_angular(
    thetas: FloatArray, alphas: FloatArray, theta: FloatArray
) -> tuple[float, FloatArray, float, float]:
    """Objective, ascent tangent (= sum of weighted log maps), its norm, and
    the largest voter distance at ``theta``."""
    c = np.clip(thetas @ theta, -1.0, 1.0)
    d = np.arccos(c)
    f = float(alphas @ (d * d))
    w = thetas - c[:, None] * theta
    nw = np.linalg.norm(w, axis=1)
    scale = np.where(nw > 1e-300, d / np.maximum(nw, 1e-300), 0.0)
    g = (alphas * scale) @ w
    g = g - theta * float(theta @ g)  # tangent-space hygiene
    return f, g, float(np.linalg.norm(g)), float(d.max())


def _geo_step(theta: FloatArray, tangent: FloatArray, step: float) -> FloatArray:
    v = step * tangent
    t = float(np.linalg.norm(v))
    if t == 0.0:
        return theta
    out = np.cos(t) * theta + np.sin(t) * (v / t)
    return out / float(np.linalg.norm(out))


@dataclass(frozen=True)
class _Run:
    theta: FloatArray
    objective: float
    grad_norm: float
    iterations: int
    converged: bool


def _jittered(
    theta: FloatArray, opts: OptimizerOptions, run_index: int, event: int
) -> FloatArray:
    g = generator_at(SeedSpec(opts.seed, _JITTER_STREAM), run_index, lane=event)
    z = g.standard_normal(theta.shape[0])
    z = z - theta * float(theta @ z)
    nz = float(np.linalg.norm(z))
    if nz <= 1e-300:
        return theta
    return _geo_step(theta, z / nz, _JITTER_SIZE)


def _minimize_angular(
    x0: FloatArray,
    thetas: FloatArray,
    alphas: FloatArray,
    opts: OptimizerOptions,
    run_index: int,
) -> _Run:
    theta = unit_vector(x0)
    jitter_events = 0
    f, g, gn, dmax = _eval_angular(thetas, alphas, theta)
    iters = 0
    # Phase 1: geodesic descent with backtracking on the objective.
    while iters < opts.max_iters and gn > opts.tol_grad:
        if dmax > np.pi - _ANTIPODAL_GUARD:
            theta = _jittered(theta, opts, run_index, jitter_events)
            jitter_events += 1
            f, g, gn, dmax = _eval_angular(thetas, alphas, theta)
            iters += 1
            continue
        step = opts.step_init
        accepted = False
        while step >= _STEP_FLOOR:
            cand = _geo_step(theta, g, step)
            c = np.clip(thetas @ cand, -1.0, 1.0)
            dc = np.arccos(c)
            fc = float(alphas @ (dc * dc))
            if fc < f:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # objective resolution exhausted; polish on gradient norm
        theta = cand
        f, g, gn, dmax = _eval_angular(thetas, alphas, theta)
        iters += 1
    # Phase 2: drive the stationarity residual itself down.  Near the
    # minimizer the objective is flat to machine precision long before the
    # tangent residual reaches tol_grad, so steps are accepted whenever they
    # shrink the residual norm instead of the objective.
    step = opts.step_init
    while iters < opts.max_iters and gn > opts.tol_grad and step >= _STEP_FLOOR:
        if dmax > np.pi - _ANTIPODAL_GUARD:
            theta = _jittered(theta, opts, run_index, jitter_events)
            jitter_events += 1
            f, g, gn, dmax = _eval_angular(thetas, alphas, theta)
            iters += 1
            continue
        cand = _geo_step(theta, g, step)
        fc, gc, gnc, dmc = _eval_angular(thetas, alphas, cand)
        if gnc < gn:
            theta, f, g, gn, dmax = cand, fc, gc, gnc, dmc
            iters += 1
        else:
            step *= 0.5
    return _Run(theta, f, gn, iters, gn <= opts.tol_grad)


def angular_mean(
    profile: Profile, opts: OptimizerOptions | None = None
) -> tuple[FloatArray, OptimizerDiagnostics]:
    """Minimize the weighted squared angular distance to the voters.

    Runs geodesic descent from the arithmetic mean (or voter 1 when the mean
    degenerates) plus ``opts.restarts`` seeded random starts, and returns the
    lowest-objective run that reached the stationarity tolerance (ties go to
    the earliest run).  If no run converged, the best iterate is returned
    with ``converged=False``.  The returned point satisfies
    ``||sum_i alpha_i * log_map(theta, theta_i)|| <= tol_grad * 10``
    whenever ``converged`` is true.
    """
    opts = opts or OptimizerOptions()
    thetas = profile.vectors
    alphas = profile.weights
    try:
        starts = [arithmetic_mean(profile)]
    except DegenerateMeanError:
        starts = [profile.vectors[0].copy()]
    rspec = SeedSpec(opts.seed, _RESTART_STREAM)
    for k in range(opts.restarts):
        z = generator_at(rspec, k).standard_normal(profile.d)
        starts.append(unit_vector(z) if np.linalg.norm(z) > 1e-12 else starts[0])
    runs = [
        _minimize_angular(x0, thetas, alphas, opts, idx)
        for idx, x0 in enumerate(starts)
    ]
    pool = [r for r in runs if r.converged] or runs
    best = pool[0]
    for r in pool[1:]:
        if r.objective < best.objective:
            best = r
    diag = OptimizerDiagnostics(
        iterations=best.iterations,
        final_grad_norm=best.grad_norm,
        objective=best.objective,
        restarts_used=opts.restarts,
        converged=best.converged,
    )
    return best.theta, diag


def median_objective(profile: Profile, theta: FloatArray) -> float:
    """Weighted sum of chord (Euclidean) distances from ``theta`` to voters."""
    diff = np.asarray(theta, dtype=np.float64)[None, :] - profile.vectors
    return float(profile.weights @ np.linalg.norm(diff, axis=1))


def geometric_median(
    profile: Profile, opts: OptimizerOptions | None = None
) -> tuple[FloatArray, OptimizerDiagnostics]:
    """Weighted geometric median of the voters, constrained to the sphere.

    Iterates the Weiszfeld update with renormalization to the sphere after
    each step (distance floor 1e-12), starting from the best of the
    arithmetic mean and the voter vectors, then polishes with 64 seeded
    tangent probes of size 1e-4: any probe improving the objective by more
    than 1e-10 restarts the iteration there.  The returned point's objective
    is therefore never worse than at any voter vector or the arithmetic mean.

    Diagnostics: ``final_grad_norm`` is the largest objective gain any probe
    achieved around the returned point (0.0 when none helped at all), an
    objective-resolution residual rather than a tangent norm —
    the chord objective is non-smooth at voter positions, so probe gain is
    the certificate that applies everywhere; ``converged`` means that gain
    is at most ``tol_grad``; ``restarts_used`` counts probe-triggered
    re-descents.
    """
    opts = opts or OptimizerOptions()
    thetas = profile.vectors
    alphas = profile.weights

    def objective(y: FloatArray) -> float:
        return float(alphas @ np.linalg.norm(y[None, :] - thetas, axis=1))

    candidates = []
    try:
        candidates.append(arithmetic_mean(profile))
    except DegenerateMeanError:
        pass
    candidates.extend(thetas[i].copy() for i in range(profile.n))
    best = candidates[0]
    best_f = objective(best)
    for c in candidates[1:]:
        fc = objective(c)
        if fc < best_f:
            best, best_f = c, fc

    iters_total = 0

    def weiszfeld(y: FloatArray, fy: float) -> tuple[FloatArray, float]:
        nonlocal iters_total
        for _ in range(opts.max_iters):
            iters_total += 1
            dist = np.maximum(np.linalg.norm(y[None, :] - thetas, axis=1), 1e-12)
            pull = (alphas / dist) @ thetas
            npull = float(np.linalg.norm(pull))
            if npull <= 1e-12:
                break  # perfectly balanced pull; current point stands
            y_new = pull / npull
            move = float(np.linalg.norm(y_new - y))
            f_new = objective(y_new)
            if f_new < fy:
                y, fy = y_new, f_new
            if move < 1e-15:
                break
        return y, fy

    y, fy = weiszfeld(best, best_f)
    restarts_used = 0
    final_gain = 0.0
    for round_idx in range(100):
        g = generator_at(SeedSpec(opts.seed, _PROBE_STREAM), round_idx)
        improved = False
        round_gain = 0.0
        for _ in range(_PROBE_COUNT):
            z = g.standard_normal(profile.d)
            z = z - y * float(y @ z)
            nz = float(np.linalg.norm(z))
            if nz <= 1e-300:
                continue
            cand = _geo_step(y, z / nz, _PROBE_SIZE)
            fc = objective(cand)
            round_gain = max(round_gain, fy - fc)
            if fc < fy - _PROBE_GAIN:
                y, fy = weiszfeld(cand, fc)
                restarts_used += 1
                improved = True
                break
        final_gain = round_gain
        if not improved:
            break
    diag = OptimizerDiagnostics(
        iterations=iters_total,
        final_grad_norm=final_gain,
        objective=fy,
        restarts_used=restarts_used,
        converged=final_gain <= opts.tol_grad,
    )
    return y, diag


def borda_ranking(profile: Profile, items: FloatArray) -> Ranking:
    """Weighted positional-scoring ranking of a batch.

    Each voter awards ``m-1-p`` points (scaled by the voter's weight) to the
    item at position ``p`` of the voter's own ranking; items are ordered by
    total points, ties broken by ascending item index.
    """
    items = np.asarray(items, dtype=np.float64)
    m = items.shape[0]
    positions = _voter_positions(profile, items)
    points = (m - 1 - positions).astype(np.float64)  # (m, n)
    totals = points @ profile.weights
    order = np.argsort(-totals, kind="stable")
    sorted_totals = totals[order]
    ties = int(np.count_nonzero(sorted_totals[1:] == sorted_totals[:-1]))
    return Ranking(tuple(int(i) for i in order), ties)


@dataclass(frozen=True)
class PsbState:
    """Trace of a sequential-selection run.

    ``residual_weights`` are the voter weights remaining after the last
    update; ``selected`` lists item indices in selection (rank) order;
    ``weight_history`` holds the weight vector before each selection step, so
    monotone non-increase can be audited.
    """

    residual_weights: FloatArray
    selected: tuple[int, ...]
    weight_history: tuple[tuple[float, ...], ...]


def psb_ranking(profile: Profile, items: FloatArray) -> tuple[Ranking, PsbState]:
    """Fill ranking positions top-down, decaying the influence of voters who
    have already been served.

    At step ``t`` (0-indexed) the winner among remaining items maximizes the
    residual-weighted count of remaining items each voter ranks below it;
    after selection, voter ``i``'s weight is scaled by
    ``max(0, 1 - b_i(winner)/(m-1-t))`` where ``b_i`` is that count.  Weights
    start at the profile weights, never increase, and stay nonnegative.

    Ties in the residual-weighted score are broken by the same count scored
    with the voters' original weights, then by item index.  Once every
    residual weight has been spent, each remaining step therefore falls back
    to the profile's static positional order instead of an arbitrary one; in
    particular a single voter always receives exactly their own ranking.
    """
    items = np.asarray(items, dtype=np.float64)
    m = items.shape[0]
    positions = _voter_positions(profile, items)  # (m, n)
    # below[x, y, i] == True when voter i ranks item x above item y.
    below = positions[:, None, :] < positions[None, :, :]
    remaining = np.ones(m, dtype=bool)
    w = profile.weights.copy()
    selected: list[int] = []
    history = [tuple(float(x) for x in w)]
    ties = 0
    for t in range(m):
        b = np.tensordot(below, remaining.astype(np.float64), axes=([1], [0]))  # (m, n)
        scores = b @ w
        base = b @ profile.weights
        scores[~remaining] = -np.inf
        base[~remaining] = -np.inf
        winner = int(np.lexsort((np.arange(m), -base, -scores))[0])
        ties += int(
            np.count_nonzero(
                (scores == scores[winner]) & (base == base[winner])
            )
            - 1
        )
        selected.append(winner)
        if t < m - 1:
            denom = float(m - 1 - t)
            w = np.maximum(0.0, w * (1.0 - b[winner] / denom))
            history.append(tuple(float(x) for x in w))
        remaining[winner] = False
    ranking = Ranking(tuple(selected), ties)
    state = PsbState(w, tuple(selected), tuple(history))
    return ranking, state


def _voter_positions(profile: Profile, items: FloatArray) -> np.ndarray:
    """positions[x, i] = rank position of item x under voter i (0 = top)."""
    scores = items @ profile.vectors.T  # (m, n)
    order = np.argsort(-scores, axis=0, kind="stable")
    positions = np.empty_like(order)
    m = items.shape[0]
    np.put_along_axis(positions, order, np.arange(m)[:, None], axis=0)
    return positions


def squared_kemeny_objective(
    profile: Profile,
    theta: FloatArray,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
) -> float:
    """Monte Carlo estimate of the expected weighted squared disagreement
    ``sum_i alpha_i * (pairs - agreements_i)^2`` between ``theta`` and each
    voter over random batches of ``m`` items."""
    if m < 2:
        raise ValueError("m must be >= 2")
    if R < 1:
        raise ValueError("R must be >= 1")
    theta = np.asarray(theta, dtype=np.float64)
    spec = SeedSpec(seed, 0)
    total_pairs = pair_count(m)
    iu0, iu1 = np.triu_indices(m, 1)
    vals = np.empty(R)
    for r in range(R):
        items = sample_batch(dist, m, spec, r)
        pos = _voter_positions(profile, items)
        rel_v = pos[iu0, :] < pos[iu1, :]
        rule_pos = rank_batch(theta, items).positions()
        rel_r = rule_pos[iu0] < rule_pos[iu1]
        disagreements = (rel_v != rel_r[:, None]).sum(axis=0)
        vals[r] = float(profile.weights @ (disagreements.astype(np.float64) ** 2))
    return float(vals.mean())


def squared_kemeny_minimize_s1(
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
    grid_size: int = 360,
) -> tuple[FloatArray, float]:
    """Grid-search minimizer of the squared-disagreement objective on the
    circle (dim 2 only).  All grid angles are scored on the same sampled
    batches; ties resolve to the smallest angle."""
    if profile.d != 2:
        raise ValueError("grid minimization is only defined for dim 2")
    spec = SeedSpec(seed, 0)
    iu0, iu1 = np.triu_indices(m, 1)
    batches = [sample_batch(dist, m, spec, r) for r in range(R)]
    rel_voters = []
    for items in batches:
        pos = _voter_positions(profile, items)
        rel_voters.append(pos[iu0, :] < pos[iu1, :])
    best_theta: FloatArray | None = None
    best_val = np.inf
    for gidx in range(grid_size):
        ang = 2.0 * np.pi * gidx / grid_size
        theta = np.array([np.cos(ang), np.sin(ang)])
        acc = 0.0
        for items, rel_v in zip(batches, rel_voters):
            rule_pos = rank_batch(theta, items).positions()
            rel_r = rule_pos[iu0] < rule_pos[iu1]
            dis = (rel_v != rel_r[:, None]).sum(axis=0)
            acc += float(profile.weights @ (dis.astype(np.float64) ** 2))
        val = acc / R
        if val < best_val:
            best_val = val
            best_theta = theta
    assert best_theta is not None
    return best_theta, best_val


@dataclass(frozen=True)
class FixedVectorRule:
    """A rule that aggregates the profile into one scoring vector, evaluated
    once per profile and applied to every batch."""

    name: str
    aggregate: Callable[[Profile], FloatArray]

    def vector(self, profile: Profile) -> FloatArray:
        return self.aggregate(profile)

    def rank(self, profile: Profile, items: FloatArray) -> Ranking:
        return rank_batch(self.vector(profile), np.asarray(items, dtype=np.float64))


@dataclass(frozen=True)
class PerBatchRule:
    """A rule that produces a fresh collective ranking for every batch."""

    name: str
    ranker: Callable[[Profile, FloatArray], Ranking]

    def rank(self, profile: Profile, items: FloatArray) -> Ranking:
        return self.ranker(profile, np.asarray(items, dtype=np.float64))


Rule = Union[FixedVectorRule, PerBatchRule]

RULE_NAMES = ("arith", "angular", "median", "borda", "psb")


def make_rule(name: str, opts: OptimizerOptions | None = None) -> Rule:
    """Build a named rule.

    ``arith`` falls back to voter 1's vector when the weighted sum
    degenerates, so experiment pipelines never abort on symmetric profiles.
    """
    opts = opts or OptimizerOptions()
    if name == "arith":

        def arith_or_first(profile: Profile) -> FloatArray:
            try:
                return arithmetic_mean(profile)
            except DegenerateMeanError:
                return profile.vectors[0].copy()

        return FixedVectorRule("arith", arith_or_first)
    if name == "angular":
        return FixedVectorRule("angular", lambda p: angular_mean(p, opts)[0])
    if name == "median":
        return FixedVectorRule("median", lambda p: geometric_median(p, opts)[0])
    if name == "borda":
        return PerBatchRule("borda", borda_ranking)
    if name == "psb":
        return PerBatchRule("psb", lambda p, items: psb_ranking(p, items)[0])
    raise ValueError(f"unknown rule {name!r}; expected one of {RULE_NAMES}")
