"""Pairwise-agreement metrics and Monte Carlo proportionality estimators.

For a batch of ``m`` items, two rankings *agree* on an unordered item pair
when they order the pair identically; ``kt_agreement_*`` counts agreeing
pairs (out of ``C(m,2)``).  Voter ``i``'s individual proportionality (IP)
level against a collective ranking is

    agreements_i / (alpha_i * C(m, 2))

-- the voter's share of pairwise agreement relative to entitlement.  Over a
distribution of batches, ``long_ip`` is the smallest per-voter mean IP and
``batch_ip`` is the mean of the per-batch minimum IP; computed on a shared
batch set the latter can never exceed the former.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    FloatArray,
    Profile,
    Ranking,
    angular_distance,
    order_to_positions,
    pair_count,
    rank_batch,
)
from .rules import FixedVectorRule, Rule, _voter_positions
from .sampling import ItemDistribution, SeedSpec, sample_batch


class NoContestedPairsError(ValueError):
    """The two voters agree on every pair, so the contested share is undefined."""


class DegenerateBatchError(ValueError):
    """All batch items coincide; no direction separates any pair."""


def kt_agreement_rankings(r1: Ranking, r2: Ranking) -> int:
    """Number of unordered item pairs ordered identically by both rankings."""
    if r1.m != r2.m:
        raise ValueError(f"rankings cover {r1.m} vs {r2.m} items")
    m = r1.m
    p1 = order_to_positions(np.asarray(r1.order, dtype=np.int64))
    p2 = order_to_positions(np.asarray(r2.order, dtype=np.int64))
    iu0, iu1 = np.triu_indices(m, 1)
    rel1 = p1[iu0] < p1[iu1]
    rel2 = p2[iu0] < p2[iu1]
    return int(np.count_nonzero(rel1 == rel2))


def kt_distance_rankings(r1: Ranking, r2: Ranking) -> int:
    """Number of unordered item pairs the two rankings order oppositely."""
    return pair_count(r1.m) - kt_agreement_rankings(r1, r2)


def kt_agreement_vectors(theta: FloatArray, psi: FloatArray, items: FloatArray) -> int:
    """Pairwise agreement between the rankings induced by two scoring vectors.

    Exactly equals ``kt_agreement_rankings(rank_batch(theta, items),
    rank_batch(psi, items))`` -- ties are broken by index on both sides.
    """
    items = np.asarray(items, dtype=np.float64)
    return kt_agreement_rankings(rank_batch(theta, items), rank_batch(psi, items))


def ip_levels(ranking: Ranking, profile: Profile, items: FloatArray) -> FloatArray:
    """Per-voter individual proportionality levels against one ranking."""
    items = np.asarray(items, dtype=np.float64)
    m = items.shape[0]
    if m < 2:
        raise ValueError("proportionality needs at least 2 items")
    if ranking.m != m:
        raise ValueError(f"ranking covers {ranking.m} items but batch has {m}")
    positions = _voter_positions(profile, items)  # (m, n)
    iu0, iu1 = np.triu_indices(m, 1)
    rel_v = positions[iu0, :] < positions[iu1, :]
    rpos = ranking.positions()
    rel_r = rpos[iu0] < rpos[iu1]
    agreements = np.count_nonzero(rel_v == rel_r[:, None], axis=0)
    return agreements / (profile.weights * pair_count(m))


@dataclass(frozen=True)
class IpSample:
    """Per-voter IP levels for one sampled batch."""

    batch_index: int
    per_voter_ip: FloatArray
    min_ip: float

    def __post_init__(self) -> None:
        if self.batch_index < 0:
            raise ValueError("batch_index must be >= 0")
        arr = np.asarray(self.per_voter_ip, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("per_voter_ip must be a non-empty vector")
        if np.any(arr < 0.0):
            raise ValueError("proportionality levels are nonnegative")
        if self.min_ip != float(arr.min()):
            raise ValueError("min_ip must equal the minimum of per_voter_ip")


@dataclass(frozen=True)
class EvalReport:
    """Monte Carlo proportionality estimates for one rule on one profile.

    ``std_errors`` holds, in order: the SE of ``long_ip`` (the SE of the
    arg-min voter's mean, first voter on ties), the SE of ``batch_ip``, then
    the per-voter SEs.  ``long_ip`` is always the minimum of
    ``per_voter_mean_ip`` and ``batch_ip`` never exceeds it, because both are
    computed from the same sampled batches.
    """

    rule_name: str
    dataset: str
    n: int
    d: int
    m: int
    R: int
    seed: int
    long_ip: float
    batch_ip: float
    per_voter_mean_ip: FloatArray
    std_errors: FloatArray
    argmin_voter: int

    def json_dict(self) -> dict:
        """Flat JSON-serializable mapping (scalars only)."""
        out: dict[str, object] = {
            "rule": self.rule_name,
            "dataset": self.dataset,
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "R": self.R,
            "seed": self.seed,
            "long_ip": self.long_ip,
            "batch_ip": self.batch_ip,
            "long_ip_se": float(self.std_errors[0]),
            "batch_ip_se": float(self.std_errors[1]),
            "argmin_voter": self.argmin_voter,
        }
        for i in range(self.n):
            out[f"voter_{i:02d}_mean_ip"] = float(self.per_voter_mean_ip[i])
        for i in range(self.n):
            out[f"voter_{i:02d}_se"] = float(self.std_errors[2 + i])
        return out

    def csv_header(self) -> list[str]:
        head = ["rule", "dataset", "n", "d", "m", "R", "seed", "long_ip", "batch_ip"]
        head += [f"voter_{i:02d}_mean_ip" for i in range(self.n)]
        head += ["long_ip_se", "batch_ip_se"]
        head += [f"voter_{i:02d}_se" for i in range(self.n)]
        return head

    def csv_row(self) -> list[str]:
        row = [
            self.rule_name,
            self.dataset,
            str(self.n),
            str(self.d),
            str(self.m),
            str(self.R),
            str(self.seed),
            repr(self.long_ip),
            repr(self.batch_ip),
        ]
        row += [repr(float(x)) for x in self.per_voter_mean_ip]
        row += [repr(float(self.std_errors[0])), repr(float(self.std_errors[1]))]
        row += [repr(float(x)) for x in self.std_errors[2:]]
        return row


def evaluate_rule(
    rule: Rule,
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
    dataset: str = "synthetic",
) -> EvalReport:
    """Estimate all proportionality summaries for one rule.

    Batches are addressed by ``(seed, batch_index)`` only, so different rules
    evaluated with the same seed see identical batches, and the
    min-of-means / mean-of-mins inequality holds exactly at the estimate
    level.  Fixed-vector rules are aggregated once per profile; per-batch
    rules are re-run on every batch.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if R < 1:
        raise ValueError("R must be >= 1")
    spec = SeedSpec(seed, 0)
    n = profile.n
    total_pairs = pair_count(m)
    denom = profile.weights * total_pairs
    fixed_vec: FloatArray | None = None
    if isinstance(rule, FixedVectorRule):
        fixed_vec = np.asarray(rule.vector(profile), dtype=np.float64)
    iu0, iu1 = np.triu_indices(m, 1)
    ip = np.empty((R, n))
    for r in range(R):
        items = sample_batch(dist, m, spec, r)
        positions = _voter_positions(profile, items)
        rel_v = positions[iu0, :] < positions[iu1, :]
        if fixed_vec is not None:
            scores = items @ fixed_vec
            order = np.argsort(-scores, kind="stable")
            rpos = order_to_positions(order)
        else:
            rpos = rule.rank(profile, items).positions()
        rel_r = rpos[iu0] < rpos[iu1]
        agreements = np.count_nonzero(rel_v == rel_r[:, None], axis=0)
        ip[r] = agreements / denom
    mins = ip.min(axis=1)
    # Reduce the per-voter columns and the row-minimum column through one
    # contiguous mean call so every column shares the same summation tree;
    # row minima never exceed any column row-wise, so batch_ip <= long_ip
    # holds exactly in floating point, not just in expectation.
    stacked = np.ascontiguousarray(np.column_stack([ip, mins]).T)
    col_means = stacked.mean(axis=1)
    per_voter_mean = col_means[:n]
    batch_mean = float(col_means[n])
    argmin_voter = int(np.argmin(per_voter_mean))
    long_val = float(per_voter_mean[argmin_voter])
    if R > 1:
        per_voter_se = ip.std(axis=0, ddof=1) / math.sqrt(R)
        batch_se = float(mins.std(ddof=1) / math.sqrt(R))
    else:
        per_voter_se = np.zeros(n)
        batch_se = 0.0
    std_errors = np.concatenate(
        [[float(per_voter_se[argmin_voter]), batch_se], per_voter_se]
    )
    return EvalReport(
        rule_name=rule.name,
        dataset=dataset,
        n=n,
        d=profile.d,
        m=m,
        R=R,
        seed=seed,
        long_ip=long_val,
        batch_ip=batch_mean,
        per_voter_mean_ip=per_voter_mean,
        std_errors=std_errors,
        argmin_voter=argmin_voter,
    )


def long_ip(
    rule: Rule,
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
    dataset: str = "synthetic",
) -> EvalReport:
    """Full report; the headline figure is ``report.long_ip`` (min over
    voters of the mean IP level)."""
    return evaluate_rule(rule, profile, dist, m, R, seed, dataset)


def batch_ip(
    rule: Rule,
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
    dataset: str = "synthetic",
) -> EvalReport:
    """Full report; the headline figure is ``report.batch_ip`` (mean over
    batches of the per-batch minimum IP level)."""
    return evaluate_rule(rule, profile, dist, m, R, seed, dataset)


def ip_tilde(rule: Rule, profile: Profile, items: FloatArray) -> FloatArray:
    """Two-voter proportionality restricted to contested pairs.

    For a profile with exactly two voters, splits the pairs the voters order
    oppositely: ``s_i`` of them side with voter ``i`` under the rule's
    ranking (``s_1 + s_2`` = number of contested pairs).  Returns
    ``[s_1/(alpha_1*c), s_2/(alpha_2*c)]``.  Raises NoContestedPairsError
    when the voters rank every pair identically.
    """
    if profile.n != 2:
        raise ValueError("contested-pair proportionality requires exactly 2 voters")
    items = np.asarray(items, dtype=np.float64)
    m = items.shape[0]
    if m < 2:
        raise ValueError("need at least 2 items")
    positions = _voter_positions(profile, items)
    iu0, iu1 = np.triu_indices(m, 1)
    rel_v = positions[iu0, :] < positions[iu1, :]
    contested = rel_v[:, 0] != rel_v[:, 1]
    c = int(np.count_nonzero(contested))
    if c == 0:
        raise NoContestedPairsError("the two voters agree on every item pair")
    rpos = rule.rank(profile, items).positions()
    rel_r = rpos[iu0] < rpos[iu1]
    s1 = int(np.count_nonzero(contested & (rel_r == rel_v[:, 0])))
    s2 = c - s1
    return np.array(
        [s1 / (profile.weights[0] * c), s2 / (profile.weights[1] * c)]
    )


def ip_tilde_estimates(
    rule: Rule,
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
) -> tuple[FloatArray, FloatArray, int]:
    """Monte Carlo means and standard errors of the contested-pair
    proportionality levels over ``R`` batches.

    Batches where the two voters agree on every pair carry no information
    about contested splits and are skipped; the number skipped is returned
    as the third element.  Raises NoContestedPairsError if every batch is
    skipped.  Uses the same batch addressing as ``evaluate_rule`` (stream 0,
    one batch per index), so estimates for different rules at the same seed
    share batches.
    """
    if profile.n != 2:
        raise ValueError("contested-pair proportionality requires exactly 2 voters")
    if isinstance(rule, FixedVectorRule):
        vec = rule.vector(profile)
        resolved: Rule = FixedVectorRule(rule.name, lambda p, v=vec: v)
    else:
        resolved = rule
    spec = SeedSpec(seed, 0)
    values = []
    skipped = 0
    for r in range(R):
        items = sample_batch(dist, m, spec, r)
        try:
            values.append(ip_tilde(resolved, profile, items))
        except NoContestedPairsError:
            skipped += 1
    if not values:
        raise NoContestedPairsError(
            "the two voters agreed on every pair in every batch"
        )
    arr = np.stack(values)
    means = arr.mean(axis=0)
    if arr.shape[0] > 1:
        ses = arr.std(axis=0, ddof=1) / np.sqrt(arr.shape[0])
    else:
        ses = np.zeros(2)
    return means, ses, skipped


def expected_agreement_spherical(
    theta: FloatArray, psi: FloatArray, m: int
) -> float:
    """Expected pairwise agreement between two scoring vectors when item
    directions are spherically symmetric: ``(pi - d) / pi * C(m, 2)`` where
    ``d`` is the angular distance between the vectors."""
    if m < 2:
        raise ValueError("m must be >= 2")
    d = angular_distance(theta, psi)
    return (np.pi - d) / np.pi * pair_count(m)


def effective_direction_s1(ranking: Ranking, items: FloatArray) -> float:
    """Angle of a direction on the circle whose induced ranking is closest
    (in pairwise disagreements) to ``ranking``.

    The induced ranking is piecewise constant in the angle, changing only at
    directions orthogonal to some pairwise item difference; those boundary
    normals (2 per distinct pair) cut the circle into arcs.  Arc midpoints --
    plus points offset 1e-9 to either side of each boundary, to cover
    degenerate arcs -- are scored, and the best angle is returned (ties to
    the smallest angle, in [0, 2*pi)).
    """
    items = np.asarray(items, dtype=np.float64)
    if items.ndim != 2 or items.shape[1] != 2:
        raise ValueError("effective direction is defined on the circle (dim 2)")
    m = items.shape[0]
    if ranking.m != m:
        raise ValueError(f"ranking covers {ranking.m} items but batch has {m}")
    if m < 2:
        raise ValueError("need at least 2 items")
    iu0, iu1 = np.triu_indices(m, 1)
    diffs = items[iu0] - items[iu1]
    keep = np.linalg.norm(diffs, axis=1) > 1e-12
    diffs = diffs[keep]
    if diffs.shape[0] == 0:
        raise DegenerateBatchError("all batch items coincide")
    base = np.arctan2(diffs[:, 1], diffs[:, 0])
    boundaries = np.concatenate([base + np.pi / 2, base - np.pi / 2])
    boundaries = np.mod(boundaries, 2.0 * np.pi)
    boundaries = np.unique(boundaries)
    # Midpoints of consecutive arcs (circularly), plus near-boundary probes.
    nexts = np.roll(boundaries, -1).copy()
    nexts[-1] += 2.0 * np.pi
    candidates = np.concatenate(
        [
            np.mod((boundaries + nexts) / 2.0, 2.0 * np.pi),
            np.mod(boundaries + 1e-9, 2.0 * np.pi),
            np.mod(boundaries - 1e-9, 2.0 * np.pi),
        ]
    )
    candidates = np.unique(candidates)
    target_pos = ranking.positions()
    rel_t = target_pos[iu0] < target_pos[iu1]
    best_angle = 0.0
    best_dist = None
    for ang in candidates:
        theta = np.array([np.cos(ang), np.sin(ang)])
        rpos = rank_batch(theta, items).positions()
        rel_r = rpos[iu0] < rpos[iu1]
        dist = int(np.count_nonzero(rel_r != rel_t))
        if best_dist is None or dist < best_dist:
            best_dist = dist
            best_angle = float(ang)
    return best_angle
