"""Profile construction, CSV input/output, and per-voter preference fitting.

Profile CSV format: a required header ``theta_0,...,theta_{d-1}`` with an
optional trailing ``weight`` column; lines starting with ``#`` are comments;
values use ``.`` as the decimal separator.  Rows are normalized to unit
length on load and weights to sum 1 (omitted weights mean uniform).

Pairwise-comparison records (one voter choosing between two items) are
fitted to a linear scorer by L2-penalized logistic regression on the
standardized signed item differences, with no intercept.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import (
    FloatArray,
    Profile,
    ZeroVectorError,
    angular_distance,
    make_profile,
    unit_vector,
)
from .sampling import SeedSpec, generator_at

_SUBSAMPLE_STREAM = 21


class ProfileParseError(ValueError):
    """A profile or comparison CSV row/column failed to parse."""


class DegenerateFitError(ValueError):
    """A voter's comparisons carry no usable direction."""


class NoValidPairError(ValueError):
    """Every coordinate pair loses some voter to a zero projection."""


class FilterExhaustedError(RuntimeError):
    """No subsample met the heterogeneity threshold within the try budget."""


@dataclass(frozen=True)
class ComparisonRecord:
    """One observed choice: ``voter`` preferred ``item_a`` iff ``chose_a``."""

    voter: str
    item_a: FloatArray
    item_b: FloatArray
    chose_a: bool


@dataclass(frozen=True)
class HeterogeneityStats:
    """Summary of pairwise angular distances between voters, in degrees.

    ``std_deg`` is the population standard deviation (ddof=0).
    """

    mean_deg: float
    std_deg: float
    min_deg: float
    max_deg: float


@dataclass(frozen=True)
class FitDiagnostics:
    """Trace of one voter's logistic fit."""

    n_records: int
    iterations: int
    grad_norm: float
    converged: bool
    standardization: str = "signed-differences"


def load_profile_csv(path: str | Path) -> Profile:
    """Load a voter profile from CSV (see module docstring for the format)."""
    path = Path(path)
    rows: list[list[str]] = []
    line_numbers: list[int] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            rows.append(next(csv.reader([raw])))
            line_numbers.append(lineno)
    if not rows:
        raise ProfileParseError(f"{path}: no header row found")
    header = [h.strip() for h in rows[0]]
    has_weight = header and header[-1] == "weight"
    coord_names = header[:-1] if has_weight else header
    expected = [f"theta_{i}" for i in range(len(coord_names))]
    if coord_names != expected or not coord_names:
        raise ProfileParseError(
            f"{path}: line {line_numbers[0]}: header must be "
            f"theta_0..theta_{{d-1}}[,weight]; got {header}"
        )
    d = len(coord_names)
    vectors: list[FloatArray] = []
    weights: list[float] = []
    for row, lineno in zip(rows[1:], line_numbers[1:]):
        want = d + 1 if has_weight else d
        if len(row) != want:
            raise ProfileParseError(
                f"{path}: line {lineno}: expected {want} fields, got {len(row)}"
            )
        values = []
        for col, cell in enumerate(row[:d]):
            try:
                values.append(float(cell))
            except ValueError:
                raise ProfileParseError(
                    f"{path}: line {lineno}: column {header[col]}: "
                    f"not a number: {cell!r}"
                ) from None
        vec = np.asarray(values)
        try:
            vec = unit_vector(vec)
        except ZeroVectorError:
            raise ZeroVectorError(
                f"{path}: line {lineno}: voter vector has zero norm"
            ) from None
        vectors.append(vec)
        if has_weight:
            try:
                w = float(row[d])
            except ValueError:
                raise ProfileParseError(
                    f"{path}: line {lineno}: column weight: not a number: {row[d]!r}"
                ) from None
            if not (w > 0.0 and np.isfinite(w)):
                raise ProfileParseError(
                    f"{path}: line {lineno}: column weight: must be positive, got {w!r}"
                )
            weights.append(w)
    if not vectors:
        raise ProfileParseError(f"{path}: no voter rows")
    return make_profile(np.stack(vectors), weights if has_weight else None)


def save_profile_csv(
    profile: Profile, path: str | Path, comments: Sequence[str] = ()
) -> None:
    """Write a profile in the load format (17-significant-digit floats),
    prefixing optional ``# ...`` comment lines.  ``load(save(p))`` reproduces
    ``p`` bitwise."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        for comment in comments:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"theta_{i}" for i in range(profile.d)] + ["weight"])
        for i in range(profile.n):
            writer.writerow(
                [repr(float(x)) for x in profile.vectors[i]]
                + [repr(float(profile.weights[i]))]
            )


def antipodal_profile(alpha1: float) -> Profile:
    """Two opposed voters on the circle: (-1, 0) with weight ``alpha1`` and
    (1, 0) with weight ``1 - alpha1``."""
    if not 0.0 < alpha1 < 1.0:
        raise ValueError("alpha1 must lie strictly between 0 and 1")
    vectors = np.array([[-1.0, 0.0], [1.0, 0.0]])
    return Profile(vectors, np.array([alpha1, 1.0 - alpha1]))


def two_voter_profile(phi_deg: float, alpha1: float) -> Profile:
    """Two voters on the circle separated by ``phi_deg`` degrees: voter 1 at
    angle 0 with weight ``alpha1``, voter 2 at angle ``phi_deg``."""
    if not 0.0 < alpha1 < 1.0:
        raise ValueError("alpha1 must lie strictly between 0 and 1")
    if not 0.0 <= phi_deg <= 180.0:
        raise ValueError("phi_deg must lie in [0, 180]")
    phi = np.deg2rad(phi_deg)
    vectors = np.array([[1.0, 0.0], [np.cos(phi), np.sin(phi)]])
    return Profile(vectors, np.array([alpha1, 1.0 - alpha1]))


def _sigmoid(x: FloatArray) -> FloatArray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _logistic_loss_grad(
    Z: FloatArray, y: FloatArray, beta: FloatArray, penalty: float
) -> tuple[float, FloatArray]:
    margins = y * (Z @ beta)
    loss = float(np.logaddexp(0.0, -margins).sum() + penalty * float(beta @ beta))
    # d/dbeta of sum log(1 + exp(-y z.beta)) = -Z^T (y * sigmoid(-margins))
    grad = -(Z.T @ (y * _sigmoid(-margins))) + 2.0 * penalty * beta
    return loss, grad


def _fit_logistic_gd(
    Z: FloatArray,
    y: FloatArray,
    penalty: float,
    max_iters: int,
    tol: float,
) -> tuple[FloatArray, float, int]:
    """Full-batch gradient descent with backtracking, then a gradient-norm
    polish phase (steps accepted when they shrink the gradient norm, which
    keeps converging after the loss is flat to machine precision)."""
    beta = np.zeros(Z.shape[1])
    loss, grad = _logistic_loss_grad(Z, y, beta, penalty)
    gn = float(np.linalg.norm(grad))
    iters = 0
    while iters < max_iters and gn > tol:
        step = 1.0
        accepted = False
        while step >= 1e-14:
            cand = beta - step * grad
            cl, cg = _logistic_loss_grad(Z, y, cand, penalty)
            if cl < loss:
                beta, loss, grad = cand, cl, cg
                gn = float(np.linalg.norm(grad))
                accepted = True
                break
            step *= 0.5
        iters += 1
        if not accepted:
            break
    step = 1.0
    while iters < max_iters and gn > tol and step >= 1e-14:
        cand = beta - step * grad
        cl, cg = _logistic_loss_grad(Z, y, cand, penalty)
        cgn = float(np.linalg.norm(cg))
        if cgn < gn:
            beta, loss, grad, gn = cand, cl, cg, cgn
            iters += 1
        else:
            step *= 0.5
    return beta, gn, iters


def fit_voter_logistic_with_diagnostics(
    records: Iterable[ComparisonRecord],
    l2_c: float = 1.0,
    *,
    max_iters: int = 10000,
    tol: float = 1e-8,
) -> tuple[FloatArray, FitDiagnostics]:
    """Fit one voter's scoring vector from pairwise choices.

    The model scores the probability of choosing item a over item b as the
    sigmoid of ``<beta, x_a - x_b>``; signed differences are standardized per
    coordinate (zero-variance coordinates pass through untouched) and the
    loss carries a quadratic penalty ``1/(2*l2_c) * ||beta||^2``.  There is
    no intercept.  The fitted direction (in standardized coordinates) is
    returned normalized to unit length.

    Raises DegenerateFitError when there are no records, every difference is
    zero, or the fitted coefficient norm is below 1e-10.
    """
    recs = list(records)
    if not recs:
        raise DegenerateFitError("no comparison records")
    if l2_c <= 0.0:
        raise ValueError("l2_c must be positive")
    diffs = np.stack(
        [
            np.asarray(r.item_a, dtype=np.float64)
            - np.asarray(r.item_b, dtype=np.float64)
            for r in recs
        ]
    )
    y = np.array([1.0 if r.chose_a else -1.0 for r in recs])
    if not np.any(diffs != 0.0):
        raise DegenerateFitError("all item differences are zero")
    mu = diffs.mean(axis=0)
    sd = diffs.std(axis=0, ddof=0)
    varying = sd > 1e-12
    Z = diffs.copy()
    Z[:, varying] = (diffs[:, varying] - mu[varying]) / sd[varying]
    penalty = 1.0 / (2.0 * l2_c)
    beta, gn, iters = _fit_logistic_gd(Z, y, penalty, max_iters, tol)
    norm = float(np.linalg.norm(beta))
    if norm < 1e-10:
        raise DegenerateFitError(f"fitted coefficient norm {norm!r} is below 1e-10")
    diag = FitDiagnostics(
        n_records=len(recs),
        iterations=iters,
        grad_norm=gn,
        converged=gn <= tol,
    )
    return beta / norm, diag


def fit_voter_logistic(
    records: Iterable[ComparisonRecord],
    l2_c: float = 1.0,
    *,
    max_iters: int = 10000,
    tol: float = 1e-8,
) -> FloatArray:
    """Fitted unit scoring vector for one voter's comparison records."""
    vec, _ = fit_voter_logistic_with_diagnostics(
        records, l2_c, max_iters=max_iters, tol=tol
    )
    return vec


def _pairwise_angles_deg(vectors: FloatArray) -> FloatArray:
    n = vectors.shape[0]
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append(np.degrees(angular_distance(vectors[i], vectors[j])))
    return np.asarray(out)


def pairwise_angle_stats(profile: Profile) -> HeterogeneityStats:
    """Mean/std/min/max of all pairwise voter angles, in degrees."""
    if profile.n < 2:
        raise ValueError("need at least 2 voters for pairwise statistics")
    angles = _pairwise_angles_deg(profile.vectors)
    return HeterogeneityStats(
        mean_deg=float(angles.mean()),
        std_deg=float(angles.std(ddof=0)),
        min_deg=float(angles.min()),
        max_deg=float(angles.max()),
    )


def select_2d_pair(profile: Profile) -> tuple[int, int, Profile]:
    """Choose the coordinate pair that maximizes the spread (population
    variance) of pairwise voter angles after projecting to that plane.

    A pair is disqualified if any voter's projection has norm <= 1e-10.
    Ties resolve to the lexicographically smallest ``(j, k)``.  Raises
    NoValidPairError when every pair is disqualified.
    """
    if profile.n < 2:
        raise ValueError("need at least 2 voters")
    if profile.d < 2:
        raise ValueError("need at least 2 coordinates")
    best: tuple[int, int] | None = None
    best_var = -np.inf
    best_rows: FloatArray | None = None
    for j in range(profile.d):
        for k in range(j + 1, profile.d):
            proj = profile.vectors[:, [j, k]]
            norms = np.linalg.norm(proj, axis=1)
            if np.any(norms <= 1e-10):
                continue
            rows = proj / norms[:, None]
            var = float(_pairwise_angles_deg(rows).var(ddof=0))
            if var > best_var:
                best = (j, k)
                best_var = var
                best_rows = rows
    if best is None:
        raise NoValidPairError("every coordinate pair loses a voter to zero norm")
    assert best_rows is not None
    return best[0], best[1], Profile(best_rows, profile.weights.copy())


def heterogeneity_subsample(
    profile: Profile,
    n_sub: int,
    threshold_deg: float = 65.0,
    seed: int = 0,
    max_tries: int = 10000,
) -> Profile:
    """Draw voters without replacement until the subsample's pairwise-angle
    standard deviation reaches ``threshold_deg``; weights become uniform.

    Attempts are counter-addressed by ``(seed, attempt)``, so the accepted
    subsample is the first qualifying attempt index and reruns reproduce it.
    Raises FilterExhaustedError after ``max_tries`` failures.
    """
    if not 2 <= n_sub <= profile.n:
        raise ValueError(f"n_sub must lie in [2, {profile.n}]")
    spec = SeedSpec(seed, _SUBSAMPLE_STREAM)
    if n_sub == profile.n:
        stats = pairwise_angle_stats(profile)
        if stats.std_deg >= threshold_deg:
            return make_profile(profile.vectors.copy(), None)
        raise FilterExhaustedError(
            f"full profile spread {stats.std_deg:.2f} deg is below "
            f"{threshold_deg:.2f} deg"
        )
    for attempt in range(max_tries):
        g = generator_at(spec, attempt)
        idx = np.sort(g.choice(profile.n, size=n_sub, replace=False))
        rows = profile.vectors[idx]
        if _pairwise_angles_deg(rows).std(ddof=0) >= threshold_deg:
            return make_profile(rows.copy(), None)
    raise FilterExhaustedError(
        f"no subsample of size {n_sub} reached {threshold_deg:.2f} deg "
        f"within {max_tries} tries"
    )
