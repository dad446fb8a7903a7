"""Command-line front end.

Subcommands
-----------
evaluate
    Proportionality estimates for a set of rules on one profile: writes
    ``results.csv`` (one row per rule and batch size), ``results.json``, and
    ``manifest.json`` into the output directory.
sweep
    Long-form sweep CSV over one variable (``phi``, ``alpha1``, ``m``,
    ``n_sub``, or ``lambda``): columns ``sweep_var, value, rule,
    voter_or_min, estimate, se, metric, q25, q75`` (the quartile columns are
    filled only for subsample sweeps, which aggregate over resampled voter
    subsets).
verify
    Run the guarantee checks; exit 0 iff every hard check passes
    (WARN-class results never fail a run).  ``--out`` additionally writes
    ``verify.xml`` (JUnit) and ``verify.csv``.
fit
    Fit per-voter scoring vectors from a pairwise-comparison CSV and write
    them as a profile CSV with uniform weights.

All randomness is derived from ``--seed`` through counter-based streams, so
rerunning any command with the same arguments produces byte-identical output
files.  ``--threads`` is accepted for interface compatibility; execution is
always in canonical serial order, which makes every run bit-reproducible.

A config file (``--config``) holds flat ``key = value`` lines (INI-style
section headers and ``#``/``;`` comments are ignored); explicit flags win
over config values, which win over built-in defaults.

Exit codes: 0 success, 1 failed checks or I/O / data errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from ._version import __version__
from .core import Profile, make_profile
from .data import (
    ComparisonRecord,
    DegenerateFitError,
    FilterExhaustedError,
    ProfileParseError,
    antipodal_profile,
    fit_voter_logistic_with_diagnostics,
    heterogeneity_subsample,
    load_profile_csv,
    save_profile_csv,
    two_voter_profile,
)
from .metrics import (
    EvalReport,
    NoContestedPairsError,
    evaluate_rule,
    ip_tilde_estimates,
)
from .rules import RULE_NAMES, OptimizerOptions, Rule, make_rule
from .sampling import Acg, ItemDistribution, distribution_label, parse_distribution
from .verify import CHECK_NAMES, hard_failures, run_checks, write_junit_xml
from .verify import write_reports_csv

METRIC_NAMES = ("long_ip", "batch_ip", "ip_tilde", "per_voter")
SWEEP_VARS = ("phi", "alpha1", "m", "n_sub", "lambda")

_DEFAULTS: dict[str, object] = {
    "rules": "arith,angular,median,borda,psb",
    "dist": "uniform-sphere",
    "m": "10",
    "R": 2000,
    "seed": 0,
    "out": "propagg-out",
    "threads": 1,
    "metrics": "long_ip,batch_ip,per_voter",
    "resamples": 100,
    "threshold": 65.0,
    "l2_c": 1.0,
    "profile": None,
    "synthetic": None,
    "values": None,
    "only": None,
    "fast": False,
}

_INT_KEYS = {"R", "seed", "threads", "resamples"}
_FLOAT_KEYS = {"threshold", "l2_c"}
_BOOL_KEYS = {"fast"}


class UsageError(Exception):
    """Bad command-line/config input (exit code 2)."""


def _read_config(path: str) -> dict[str, str]:
    """Parse a flat key=value config file; unknown keys are usage errors."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            continue  # section headers are accepted and ignored
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _DEFAULTS:
            raise UsageError(
                f"{path}:{lineno}: unknown config key {key!r} "
                f"(known: {', '.join(sorted(_DEFAULTS))})"
            )
        values[key] = value.strip()
    return values


def _resolve(ns: argparse.Namespace, config: dict[str, str], key: str) -> object:
    """Flag value if given, else config value, else default."""
    cli_value = getattr(ns, key, None)
    if key in _BOOL_KEYS:
        if cli_value:
            return True
        if key in config:
            return config[key].strip().lower() in ("1", "true", "yes", "on")
        return _DEFAULTS[key]
    if cli_value is not None:
        return cli_value
    if key in config:
        raw = config[key]
        try:
            if key in _INT_KEYS:
                return int(raw)
            if key in _FLOAT_KEYS:
                return float(raw)
        except ValueError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
        return raw
    return _DEFAULTS[key]


def _parse_rules(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if not names:
        raise UsageError("at least one rule is required")
    unknown = [n for n in names if n not in RULE_NAMES]
    if unknown:
        raise UsageError(
            f"unknown rule(s) {', '.join(unknown)}; choose from {', '.join(RULE_NAMES)}"
        )
    return names


def _parse_metrics(text: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [n for n in names if n not in METRIC_NAMES]
    if unknown:
        raise UsageError(
            f"unknown metric(s) {', '.join(unknown)}; "
            f"choose from {', '.join(METRIC_NAMES)}"
        )
    if not names:
        raise UsageError("at least one metric is required")
    return names


def _parse_m_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part.strip()) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"--m expects integers: {exc}") from exc
    if not values or any(v < 2 for v in values):
        raise UsageError("--m expects batch sizes >= 2")
    return values


_SYNTHETIC_RE = re.compile(r"^([a-z0-9_-]+):(.*)$")


def _parse_synthetic(text: str) -> tuple[str, dict[str, float]]:
    match = _SYNTHETIC_RE.match(text.strip())
    if not match:
        raise UsageError(
            f"bad synthetic spec {text!r}; expected e.g. antipodal:alpha1=0.3 "
            "or two-voter:phi=45,alpha1=0.7"
        )
    kind = match.group(1).replace("_", "-")
    params: dict[str, float] = {}
    body = match.group(2).strip()
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise UsageError(f"bad synthetic parameter {part!r} in {text!r}")
            key, _, value = part.partition("=")
            try:
                params[key.strip()] = float(value)
            except ValueError as exc:
                raise UsageError(f"bad synthetic parameter {part!r}: {exc}") from exc
    return kind, params


def _synthetic_profile(kind: str, params: dict[str, float]) -> Profile:
    if kind == "antipodal":
        extra = set(params) - {"alpha1"}
        if extra or "alpha1" not in params:
            raise UsageError("antipodal spec takes exactly alpha1=<weight>")
        return antipodal_profile(params["alpha1"])
    if kind == "two-voter":
        extra = set(params) - {"phi", "alpha1"}
        if extra or {"phi", "alpha1"} - set(params):
            raise UsageError("two-voter spec takes exactly phi=<deg>,alpha1=<weight>")
        return two_voter_profile(params["phi"], params["alpha1"])
    raise UsageError(f"unknown synthetic family {kind!r} (antipodal, two-voter)")


def _load_source(
    profile_path: str | None, synthetic: str | None
) -> tuple[Profile, str]:
    """Resolve --profile/--synthetic into a profile and a dataset label."""
    if (profile_path is None) == (synthetic is None):
        raise UsageError("exactly one of --profile or --synthetic is required")
    if profile_path is not None:
        return load_profile_csv(profile_path), Path(profile_path).name
    kind, params = _parse_synthetic(synthetic)
    return _synthetic_profile(kind, params), synthetic.strip()


def _build_rules(names: Sequence[str], seed: int) -> list[Rule]:
    return [make_rule(name, OptimizerOptions(seed=seed)) for name in names]


def _write_manifest(outdir: Path, command: str, config: dict[str, object]) -> None:
    manifest = {"command": command, "version": __version__, "config": config}
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_evaluate(ns: argparse.Namespace, config: dict[str, str]) -> int:
    rules = _parse_rules(str(_resolve(ns, config, "rules")))
    metrics = _parse_metrics(str(_resolve(ns, config, "metrics")))
    m_list = _parse_m_list(str(_resolve(ns, config, "m")))
    R = int(_resolve(ns, config, "R"))
    seed = int(_resolve(ns, config, "seed"))
    out = str(_resolve(ns, config, "out"))
    threads = int(_resolve(ns, config, "threads"))
    profile_path = _resolve(ns, config, "profile")
    synthetic = _resolve(ns, config, "synthetic")
    dist_text = str(_resolve(ns, config, "dist"))

    profile, label = _load_source(profile_path, synthetic)
    dist = parse_distribution(dist_text, profile.d)
    if "ip_tilde" in metrics and profile.n != 2:
        raise UsageError("metric ip_tilde requires a profile with exactly 2 voters")

    reports: list[EvalReport] = []
    for m in m_list:
        for name, rule in zip(rules, _build_rules(rules, seed)):
            report = evaluate_rule(rule, profile, dist, m=m, R=R, seed=seed, dataset=label)
            reports.append(report)
            print(
                f"{name:8s} m={m:<4d} long_ip={report.long_ip:.4f} "
                f"batch_ip={report.batch_ip:.4f} (argmin voter {report.argmin_voter})"
            )

    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "results.csv",
        reports[0].csv_header(),
        [r.csv_row() for r in reports],
    )
    (outdir / "results.json").write_text(
        json.dumps([r.json_dict() for r in reports], sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    _write_manifest(
        outdir,
        "evaluate",
        {
            "rules": list(rules),
            "profile": profile_path,
            "synthetic": synthetic,
            "dist": distribution_label(dist),
            "m": list(m_list),
            "R": R,
            "seed": seed,
            "out": out,
            "threads": threads,
            "metrics": list(metrics),
        },
    )
    print(f"wrote {outdir / 'results.csv'}")
    return 0


_SWEEP_HEADER = [
    "sweep_var",
    "value",
    "rule",
    "voter_or_min",
    "estimate",
    "se",
    "metric",
    "q25",
    "q75",
]


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _point_rows(
    var: str,
    value_text: str,
    rule_name: str,
    rule: Rule,
    profile: Profile,
    dist: ItemDistribution,
    m: int,
    R: int,
    seed: int,
    metrics: Sequence[str],
    label: str,
) -> list[list[str]]:
    """Rows for one sweep point and one rule (non-subsample sweeps)."""
    rows: list[list[str]] = []
    need_eval = any(k in metrics for k in ("long_ip", "batch_ip", "per_voter"))
    if need_eval:
        report = evaluate_rule(rule, profile, dist, m=m, R=R, seed=seed, dataset=label)
        if "long_ip" in metrics:
            rows.append(
                [var, value_text, rule_name, "min", _fmt(report.long_ip),
                 _fmt(report.std_errors[0]), "long_ip", "", ""]
            )
        if "batch_ip" in metrics:
            rows.append(
                [var, value_text, rule_name, "min", _fmt(report.batch_ip),
                 _fmt(report.std_errors[1]), "batch_ip", "", ""]
            )
        if "per_voter" in metrics:
            for i in range(profile.n):
                rows.append(
                    [var, value_text, rule_name, f"voter_{i:02d}",
                     _fmt(report.per_voter_mean_ip[i]),
                     _fmt(report.std_errors[2 + i]), "per_voter", "", ""]
                )
    if "ip_tilde" in metrics:
        try:
            means, ses, _skipped = ip_tilde_estimates(rule, profile, dist, m, R, seed)
        except NoContestedPairsError:
            for i in range(2):
                rows.append(
                    [var, value_text, rule_name, f"voter_{i:02d}", "", "",
                     "ip_tilde", "", ""]
                )
        else:
            for i in range(2):
                rows.append(
                    [var, value_text, rule_name, f"voter_{i:02d}", _fmt(means[i]),
                     _fmt(ses[i]), "ip_tilde", "", ""]
                )
    return rows


def cmd_sweep(ns: argparse.Namespace, config: dict[str, str]) -> int:
    var = ns.var
    rules = _parse_rules(str(_resolve(ns, config, "rules")))
    metrics = _parse_metrics(str(_resolve(ns, config, "metrics")))
    m_list = _parse_m_list(str(_resolve(ns, config, "m")))
    R = int(_resolve(ns, config, "R"))
    seed = int(_resolve(ns, config, "seed"))
    out = str(_resolve(ns, config, "out"))
    threads = int(_resolve(ns, config, "threads"))
    resamples = int(_resolve(ns, config, "resamples"))
    threshold = float(_resolve(ns, config, "threshold"))
    profile_path = _resolve(ns, config, "profile")
    synthetic = _resolve(ns, config, "synthetic")
    dist_text = str(_resolve(ns, config, "dist"))
    values_text = _resolve(ns, config, "values")

    if values_text is None:
        raise UsageError("sweep requires --values (comma-separated)")
    try:
        values = [float(part) for part in str(values_text).split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"--values expects numbers: {exc}") from exc
    if not values:
        raise UsageError("sweep requires at least one value")
    if len(m_list) != 1:
        raise UsageError("sweep uses a single --m batch size")
    m = m_list[0]

    if var in ("m", "n_sub"):
        int_values = []
        for v in values:
            if v != int(v):
                raise UsageError(f"{var} sweep values must be integers, got {v}")
            int_values.append(int(v))

    rows: list[list[str]] = []
    built_rules = _build_rules(rules, seed)

    if var == "n_sub":
        if profile_path is None:
            raise UsageError("n_sub sweeps require --profile (a real dataset)")
        profile, label = _load_source(profile_path, None)
        dist = parse_distribution(dist_text, profile.d)
        usable = [k for k in metrics if k in ("long_ip", "batch_ip")]
        dropped = [k for k in metrics if k not in usable]
        if dropped:
            print(
                f"note: metrics {', '.join(dropped)} are per-voter and are skipped "
                "for n_sub sweeps (voter identity changes across resamples)",
                file=sys.stderr,
            )
        if not usable:
            raise UsageError("n_sub sweeps need long_ip and/or batch_ip metrics")
        for n_sub in int_values:
            if not 2 <= n_sub <= profile.n:
                raise UsageError(
                    f"n_sub={n_sub} outside 2..{profile.n} for this profile"
                )
            subprofiles = []
            exhausted = 0
            for ridx in range(resamples):
                try:
                    subprofiles.append(
                        heterogeneity_subsample(
                            profile, n_sub, threshold_deg=threshold, seed=seed + ridx
                        )
                    )
                except FilterExhaustedError:
                    exhausted += 1
            if exhausted:
                print(
                    f"note: n_sub={n_sub}: {exhausted}/{resamples} resamples "
                    "exhausted the heterogeneity filter",
                    file=sys.stderr,
                )
            for rule_name, rule in zip(rules, built_rules):
                if not subprofiles:
                    for metric in usable:
                        rows.append(
                            [var, str(n_sub), rule_name, "min", "", "", metric, "", ""]
                        )
                    continue
                estimates = {k: [] for k in usable}
                for sub in subprofiles:
                    report = evaluate_rule(
                        rule, sub, dist, m=m, R=R, seed=seed, dataset=label
                    )
                    if "long_ip" in estimates:
                        estimates["long_ip"].append(report.long_ip)
                    if "batch_ip" in estimates:
                        estimates["batch_ip"].append(report.batch_ip)
                for metric in usable:
                    arr = np.asarray(estimates[metric])
                    se = (
                        float(arr.std(ddof=1) / np.sqrt(arr.size))
                        if arr.size > 1
                        else 0.0
                    )
                    rows.append(
                        [
                            var, str(n_sub), rule_name, "min",
                            _fmt(float(arr.mean())), _fmt(se), metric,
                            _fmt(float(np.percentile(arr, 25))),
                            _fmt(float(np.percentile(arr, 75))),
                        ]
                    )
            print(f"n_sub={n_sub}: {len(subprofiles)} subsamples evaluated")
    else:
        if var in ("phi", "alpha1"):
            if synthetic is None:
                raise UsageError(f"{var} sweeps require --synthetic")
            kind, params = _parse_synthetic(str(synthetic))
            if var == "phi" and (kind != "two-voter" or "alpha1" not in params):
                raise UsageError(
                    "phi sweeps require --synthetic two-voter:phi=...,alpha1=..."
                )
            if kind not in ("antipodal", "two-voter"):
                raise UsageError(f"unknown synthetic family {kind!r}")
            if var == "alpha1" and kind == "two-voter" and "phi" not in params:
                raise UsageError(
                    "alpha1 sweeps over two-voter need phi= in --synthetic"
                )
            label = str(synthetic).strip()
        else:
            profile, label = _load_source(profile_path, synthetic)
            dist = parse_distribution(dist_text, profile.d)
        if var == "lambda":
            if not isinstance(dist, Acg):
                raise UsageError(
                    "lambda sweeps require an --dist acg:... template "
                    f"(got {distribution_label(dist)})"
                )

        for v in values:
            if var == "phi":
                if not 0.0 < v <= 180.0:
                    raise UsageError(f"phi value {v} outside (0, 180]")
                point_profile = two_voter_profile(v, params["alpha1"])
                point_dist = parse_distribution(dist_text, point_profile.d)
                point_m = m
                value_text = _fmt(v)
            elif var == "alpha1":
                if not 0.0 < v < 1.0:
                    raise UsageError(f"alpha1 value {v} outside (0, 1)")
                if kind == "antipodal":
                    point_profile = antipodal_profile(v)
                else:
                    point_profile = two_voter_profile(params["phi"], v)
                point_dist = parse_distribution(dist_text, point_profile.d)
                point_m = m
                value_text = _fmt(v)
            elif var == "m":
                point_profile = profile
                point_dist = dist
                point_m = int(v)
                value_text = str(int(v))
            else:  # lambda
                if not 0.0 < v <= 1.0:
                    raise UsageError(f"lambda value {v} outside (0, 1]")
                point_profile = profile
                point_dist = Acg(dist.axis, v)
                point_m = m
                value_text = _fmt(v)
            if "ip_tilde" in metrics and point_profile.n != 2:
                raise UsageError("metric ip_tilde requires a 2-voter profile")
            for rule_name, rule in zip(rules, built_rules):
                rows.extend(
                    _point_rows(
                        var, value_text, rule_name, rule, point_profile,
                        point_dist, point_m, R, seed, metrics, label,
                    )
                )
            print(f"{var}={value_text}: {len(rules)} rules evaluated")

    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(outdir / "sweep.csv", _SWEEP_HEADER, rows)
    _write_manifest(
        outdir,
        "sweep",
        {
            "sweep_var": var,
            "values": values,
            "rules": list(rules),
            "profile": profile_path,
            "synthetic": synthetic,
            "dist": dist_text,
            "m": m,
            "R": R,
            "seed": seed,
            "out": out,
            "threads": threads,
            "metrics": list(metrics),
            "resamples": resamples,
            "threshold": threshold,
        },
    )
    print(f"wrote {outdir / 'sweep.csv'}")
    return 0


def cmd_verify(ns: argparse.Namespace, config: dict[str, str]) -> int:
    seed = int(_resolve(ns, config, "seed"))
    only = _resolve(ns, config, "only")
    fast = bool(_resolve(ns, config, "fast"))
    out = getattr(ns, "out", None)
    if only is not None:
        only = str(only).replace("-", "_")
        if only not in CHECK_NAMES:
            raise UsageError(
                f"unknown check {only!r}; choose from {', '.join(CHECK_NAMES)}"
            )
    reports = run_checks(seed=seed, only=only, fast=fast)
    for r in reports:
        line = (
            f"{r.name:22s} {r.status:12s} measured={r.measured:.6g} "
            f"bound={r.bound:.6g} slack={r.slack:.6g} ({r.elapsed_s:.1f}s)"
        )
        print(line)
        if r.detail:
            print(f"{'':22s} {r.detail}")
    if out is not None:
        outdir = Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_junit_xml(reports, outdir / "verify.xml")
        write_reports_csv(reports, outdir / "verify.csv")
        _write_manifest(
            outdir,
            "verify",
            {"seed": seed, "only": only, "fast": fast, "out": str(out)},
        )
        print(f"wrote {outdir / 'verify.xml'}")
    failures = hard_failures(reports)
    if failures:
        for r in failures:
            print(
                f"FAILED {r.name}: measured={r.measured!r} bound={r.bound!r} "
                f"{r.detail}".rstrip(),
                file=sys.stderr,
            )
        return 1
    return 0


_FIT_HEADER_RE = re.compile(r"^(a|b)_(\d+)$")


def _read_comparisons(path: str) -> tuple[dict[str, list[ComparisonRecord]], int]:
    """Read a comparisons CSV: voter,a_0..a_{d-1},b_0..b_{d-1},chose_a."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ProfileParseError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ProfileParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 4 or header[0] != "voter" or header[-1] != "chose_a":
            raise ProfileParseError(
                f"{path}: header must be voter,a_0..a_(d-1),b_0..b_(d-1),chose_a"
            )
        coord_cols = header[1:-1]
        if len(coord_cols) % 2 != 0:
            raise ProfileParseError(f"{path}: unpaired coordinate columns")
        d = len(coord_cols) // 2
        expected = [f"a_{i}" for i in range(d)] + [f"b_{i}" for i in range(d)]
        if coord_cols != expected:
            raise ProfileParseError(
                f"{path}: coordinate columns must be {','.join(expected)}"
            )
        grouped: dict[str, list[ComparisonRecord]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise ProfileParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            voter = row[0].strip()
            try:
                a = np.array([float(x) for x in row[1 : 1 + d]])
                b = np.array([float(x) for x in row[1 + d : 1 + 2 * d]])
            except ValueError as exc:
                raise ProfileParseError(f"{path}:{lineno}: {exc}") from exc
            flag = row[-1].strip().lower()
            if flag in ("1", "true"):
                chose_a = True
            elif flag in ("0", "false"):
                chose_a = False
            else:
                raise ProfileParseError(
                    f"{path}:{lineno}: chose_a must be 0/1/true/false, got {row[-1]!r}"
                )
            grouped.setdefault(voter, []).append(
                ComparisonRecord(voter, a, b, chose_a)
            )
        if not grouped:
            raise ProfileParseError(f"{path}: no comparison records")
        return grouped, d


def cmd_fit(ns: argparse.Namespace, config: dict[str, str]) -> int:
    l2_c = float(_resolve(ns, config, "l2_c"))
    grouped, _d = _read_comparisons(ns.input)
    fitted: list[tuple[str, np.ndarray, object]] = []
    skipped: list[str] = []
    for voter in sorted(grouped):
        try:
            vec, diag = fit_voter_logistic_with_diagnostics(grouped[voter], l2_c)
        except DegenerateFitError as exc:
            print(f"warning: voter {voter!r} skipped: {exc}", file=sys.stderr)
            skipped.append(voter)
            continue
        fitted.append((voter, vec, diag))
    if not fitted:
        print("error: every voter was degenerate; nothing to write", file=sys.stderr)
        return 1
    profile = make_profile(np.stack([vec for _, vec, _ in fitted]), None)
    comments = [
        f"fitted from {ns.input} with l2_c={l2_c!r} (uniform weights)",
    ]
    for voter, _, diag in fitted:
        comments.append(
            f"voter {voter}: records={diag.n_records} iterations={diag.iterations} "
            f"grad_norm={diag.grad_norm:.3e} converged={diag.converged} "
            f"standardization={diag.standardization}"
        )
    for voter in skipped:
        comments.append(f"voter {voter}: skipped (degenerate fit)")
    save_profile_csv(profile, ns.output, comments)
    print(f"wrote {ns.output} ({len(fitted)} voters, {len(skipped)} skipped)")
    return 0


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--profile", help="voter profile CSV path")
    sub.add_argument(
        "--synthetic",
        help="synthetic profile, e.g. antipodal:alpha1=0.3 or "
        "two-voter:phi=45,alpha1=0.7",
    )
    sub.add_argument(
        "--dist",
        help="item distribution: uniform-sphere | gaussian:sigma=S | "
        "acg:lambda=L,axis=...  (default uniform-sphere)",
    )
    sub.add_argument("--m", help="batch size, or comma list for evaluate (default 10)")
    sub.add_argument("--R", type=int, help="number of Monte Carlo batches (default 2000)")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")
    sub.add_argument("--rules", help="comma list from: " + ", ".join(RULE_NAMES))
    sub.add_argument(
        "--metrics", help="comma list from: " + ", ".join(METRIC_NAMES)
    )
    sub.add_argument("--out", help="output directory (default propagg-out)")
    sub.add_argument(
        "--threads",
        type=int,
        help="worker threads (accepted for compatibility; runs are serial)",
    )
    sub.add_argument("--config", help="flat key=value config file; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propagg",
        description="Aggregate voters' scoring vectors into collective ranking "
        "rules and measure per-voter proportionality by seeded Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=f"propagg {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("evaluate", help="proportionality report for one profile")
    _add_common_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = subs.add_parser("sweep", help="sweep one variable, long-form CSV out")
    p_sweep.add_argument("var", choices=SWEEP_VARS, help="variable to sweep")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--values", help="comma-separated sweep values")
    p_sweep.add_argument(
        "--resamples", type=int, help="subsample count for n_sub sweeps (default 100)"
    )
    p_sweep.add_argument(
        "--threshold",
        type=float,
        help="heterogeneity threshold in degrees for n_sub sweeps (default 65)",
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = subs.add_parser("verify", help="run the guarantee checks")
    p_verify.add_argument("--only", help="run a single named check")
    p_verify.add_argument("--seed", type=int, help="master seed (default 0)")
    p_verify.add_argument("--out", help="directory for verify.xml / verify.csv")
    p_verify.add_argument(
        "--fast", action="store_true", help="reduced trial counts (smoke mode)"
    )
    p_verify.add_argument("--config", help="flat key=value config file; flags win")
    p_verify.set_defaults(func=cmd_verify)

    p_fit = subs.add_parser(
        "fit", help="fit voter vectors from pairwise comparisons"
    )
    p_fit.add_argument("input", help="comparisons CSV (voter,a_*,b_*,chose_a)")
    p_fit.add_argument("output", help="profile CSV to write")
    p_fit.add_argument(
        "--l2-c", dest="l2_c", type=float, help="inverse penalty strength (default 1.0)"
    )
    p_fit.add_argument("--config", help="flat key=value config file; flags win")
    p_fit.set_defaults(func=cmd_fit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = _read_config(ns.config) if getattr(ns, "config", None) else {}
        return ns.func(ns, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ProfileParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
