"""Command-line front end orchestrating the pipeline and emitting reports.

Exit codes: 0 success, 1 validation error, 2 undefined statistic, 3 I/O
error. Every run writes a JSON manifest (config echo, input digests, tool
version) alongside its outputs. A JSON config file may supply any flag;
explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from ._version import __version__
from .aggregation import (
    LEVEL_SDS,
    LEVEL_UDA,
    PSTAR_MEAN_OF_UNITS,
    PSTAR_POOLED,
    national_averages,
    rank_units,
    sds_unit_scores,
    uda_unit_scores,
)
from .corpus import DEFAULT_WINDOW, load_corpus
from .errors import (
    CalibrationError,
    MeritrankError,
    UndefinedStatisticError,
    ValidationError,
)
from .funding import FundingPolicy, allocate, national_top_census, paradox_report
from .indicators import productivity_stats, score_corpus
from .normalization import EQUAL_FRACTIONAL, POSITIONAL, CreditScheme
from .scenario import (
    SCOPE_NATIONAL,
    SCOPE_UNIT,
    counterfactual_rankings,
    select_top,
    shift_gini_scatter,
)
from .stats import bottom_top_ratio
from . import reports
from .synth import CalibrationTargets, GeneratorProfile, calibrate, generate, write_corpus

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UNDEFINED_STATISTIC = 2
EXIT_IO = 3

CREDIT_MODES = {"equal": EQUAL_FRACTIONAL, "positional": POSITIONAL}

CORPUS_DEFAULTS = {
    "corpus": None,
    "window": DEFAULT_WINDOW,
    "credit": "equal",
    "first_w": 2.0,
    "last_w": 2.0,
    "middle_w": 1.0,
    "extramural_discount": 1.0,
    "min_staff": 5,
    "pstar": PSTAR_MEAN_OF_UNITS,
}

GEN_DEFAULTS = {"profile": None, "seed": None, "out": None}

CALIBRATE_DEFAULTS = {
    "profile": None,
    "seed": None,
    "out": None,
    "target_non_productive": 0.17,
    "target_nil_impact": 0.25,
    "target_top20_share": 0.77,
    "tolerance": 0.03,
}

INDICATORS_DEFAULTS = {**CORPUS_DEFAULTS, "out": None}

RANK_DEFAULTS = {**CORPUS_DEFAULTS, "level": None, "field": None, "out": None, "json": None}

COUNTERFACTUAL_DEFAULTS = {
    **CORPUS_DEFAULTS,
    "level": None,
    "field": None,
    "share": 0.2,
    "classes": 5,
    "refit_pstar": False,
    "out": None,
    "svg": None,
    "transition": None,
}

FUND_DEFAULTS = {
    **CORPUS_DEFAULTS,
    "uda": None,
    "budget": Fraction(1_000_000),
    "classes": 4,
    "ratio": Fraction(3),
    "bottom_funded": False,
    "share": 0.2,
    "out": None,
    "census": None,
    "findings": None,
}

REPORT_ALL_DEFAULTS = {
    **CORPUS_DEFAULTS,
    "profile": None,
    "seed": None,
    "out": None,
    "budget": Fraction(1_000_000),
    "global_budget": None,
    "classes": 4,
    "ratio": Fraction(3),
    "bottom_funded": False,
    "share": 0.2,
    "transition_classes": 5,
}

_CONFIG_COERCIONS = {
    "window": lambda v: tuple(int(x) for x in v),
    "budget": lambda v: Fraction(str(v)),
    "global_budget": lambda v: Fraction(str(v)),
    "ratio": lambda v: Fraction(str(v)),
}


def _load_config_file(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path}: expected a JSON object")
    return data


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge flag > config-file > default; reject unknown config keys."""
    config = _load_config_file(args.config) if args.config else {}
    unknown = set(config) - set(defaults)
    if unknown:
        raise ValidationError(f"config file {args.config}: unknown keys {sorted(unknown)}")
    resolved = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            resolved[key] = cli_value
        elif key in config:
            value = config[key]
            coerce = _CONFIG_COERCIONS.get(key)
            resolved[key] = coerce(value) if coerce else value
        else:
            resolved[key] = default
    if resolved.get("window") is not None and len(resolved["window"]) != 2:
        raise ValidationError(f"--window needs exactly 2 years, got {resolved['window']}")
    return resolved


def _required(cfg: dict, key: str, flag: str):
    if cfg[key] is None:
        raise ValidationError(f"{flag} is required (flag or config file)")
    return cfg[key]


def _credit_scheme(cfg: dict) -> CreditScheme:
    return CreditScheme(
        mode=CREDIT_MODES.get(cfg["credit"], cfg["credit"]),
        first_weight=cfg["first_w"],
        last_weight=cfg["last_w"],
        middle_weight=cfg["middle_w"],
        extramural_discount=cfg["extramural_discount"],
    )


def _corpus_paths(corpus_dir) -> list[Path]:
    d = Path(corpus_dir)
    return [d / "publications.jsonl", d / "researchers.csv", d / "taxonomy.csv"]


def _load(cfg: dict):
    corpus_dir = _required(cfg, "corpus", "--corpus")
    pub, res, tax = _corpus_paths(corpus_dir)
    return load_corpus(pub, res, tax, tuple(cfg["window"]))


def _manifest_path(out_path) -> Path:
    p = Path(out_path)
    return p.parent / (p.stem + ".manifest.json")


def _load_profile(cfg: dict) -> GeneratorProfile:
    profile = GeneratorProfile.from_json(cfg["profile"]) if cfg["profile"] else GeneratorProfile()
    if cfg.get("seed") is not None:
        profile = replace(profile, seed=int(cfg["seed"]))
    return profile


def cmd_gen(args) -> int:
    cfg = _resolve(args, GEN_DEFAULTS)
    out = _required(cfg, "out", "--out")
    profile = _load_profile(cfg)
    corpus = generate(profile)
    write_corpus(corpus, out, profile)
    inputs = [Path(cfg["profile"])] if cfg["profile"] else []
    reports.write_manifest(Path(out) / "manifest.json", "gen", cfg, inputs)
    print(
        f"wrote corpus to {out}: {len(corpus.researchers)} researchers, "
        f"{len(corpus.publications)} publications, "
        f"{len(corpus.universities)} universities, seed {profile.seed}"
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _resolve(args, CALIBRATE_DEFAULTS)
    out = _required(cfg, "out", "--out")
    profile = _load_profile(cfg)
    targets = CalibrationTargets(
        non_productive_share=cfg["target_non_productive"],
        nil_impact_share=cfg["target_nil_impact"],
        top20_impact_share=cfg["target_top20_share"],
    )
    result = calibrate(profile, targets, tolerance=cfg["tolerance"])
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(result.profile.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    inputs = [Path(cfg["profile"])] if cfg["profile"] else []
    reports.write_manifest(_manifest_path(out_path), "calibrate", cfg, inputs)
    for name, residual in sorted(result.residuals.items()):
        print(f"{name}: residual {residual:+.4f} (tolerance {cfg['tolerance']})")
    if not result.converged:
        print("calibration did not converge; best-effort profile written", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"calibrated profile written to {out} after {result.evaluations} evaluations")
    return EXIT_OK


def cmd_indicators(args) -> int:
    cfg = _resolve(args, INDICATORS_DEFAULTS)
    out = _required(cfg, "out", "--out")
    corpus = _load(cfg)
    scored = score_corpus(corpus, _credit_scheme(cfg))
    reports.write_scores_csv(out, scored.scores)
    reports.write_manifest(_manifest_path(out), "indicators", cfg, _corpus_paths(cfg["corpus"]))
    print(f"wrote {len(scored.scores)} researcher scores ({len(scored.active_sds)} active SDSs) to {out}")
    return EXIT_OK


def _ranked_units(scored, level: str, cfg: dict):
    units = sds_unit_scores(scored.scores)
    if level == LEVEL_SDS:
        return rank_units(units, LEVEL_SDS, cfg["min_staff"])
    p_stars = national_averages(units, cfg["pstar"])
    area_units = uda_unit_scores(units, p_stars, scored.corpus.taxonomy)
    return rank_units(area_units, LEVEL_UDA, cfg["min_staff"])


def cmd_rank(args) -> int:
    cfg = _resolve(args, RANK_DEFAULTS)
    level = _required(cfg, "level", "--level")
    out = _required(cfg, "out", "--out")
    corpus = _load(cfg)
    scored = score_corpus(corpus, _credit_scheme(cfg))
    rankings = _ranked_units(scored, level, cfg)
    field = cfg["field"]
    if field is not None and field not in rankings:
        raise ValidationError(f"--field {field!r}: no ranked units at level {level}")
    reports.write_ranking_csv(out, rankings, field)
    if cfg["json"]:
        reports.write_ranking_json(cfg["json"], rankings, field)
    reports.write_manifest(_manifest_path(out), "rank", cfg, _corpus_paths(cfg["corpus"]))
    n_rows = sum(len(r) for r in ([rankings[field]] if field else rankings.values()))
    print(f"wrote {n_rows} ranked units to {out}")
    return EXIT_OK


def cmd_counterfactual(args) -> int:
    cfg = _resolve(args, COUNTERFACTUAL_DEFAULTS)
    level = _required(cfg, "level", "--level")
    out = _required(cfg, "out", "--out")
    corpus = _load(cfg)
    scored = score_corpus(corpus, _credit_scheme(cfg))
    selection = select_top(scored.scores, SCOPE_UNIT, cfg["share"], cfg["min_staff"])
    cf = counterfactual_rankings(
        corpus,
        scored.scores,
        selection,
        level,
        min_staff=cfg["min_staff"],
        k_classes=cfg["classes"],
        pstar_mode=cfg["pstar"],
        refit_pstar=bool(cfg["refit_pstar"]),
    )
    field = cfg["field"]
    if field is not None and field not in cf:
        raise ValidationError(f"--field {field!r}: no counterfactual report at level {level}")
    selected = [cf[field]] if field else [cf[code] for code in sorted(cf)]
    reports.write_counterfactual_csv(out, selected, with_field=field is None)
    if cfg["svg"]:
        if field is None:
            raise ValidationError("--svg needs --field to pick one scatter")
        reports.write_scatter_svg(cfg["svg"], shift_gini_scatter(cf[field]), title=field)
    if cfg["transition"]:
        if field is None:
            raise ValidationError("--transition needs --field to pick one matrix")
        if cf[field].transition is None:
            raise UndefinedStatisticError(
                f"field {field!r}: fewer ranked units than {cfg['classes']} classes"
            )
        reports.write_transition_csv(cfg["transition"], cf[field])
    reports.write_manifest(_manifest_path(out), "counterfactual", cfg, _corpus_paths(cfg["corpus"]))
    print(f"wrote counterfactual report for {len(selected)} field(s) to {out}")
    return EXIT_OK


def cmd_fund(args) -> int:
    cfg = _resolve(args, FUND_DEFAULTS)
    uda = _required(cfg, "uda", "--uda")
    out = _required(cfg, "out", "--out")
    corpus = _load(cfg)
    scored = score_corpus(corpus, _credit_scheme(cfg))
    rankings = _ranked_units(scored, LEVEL_UDA, cfg)
    if uda not in rankings:
        raise ValidationError(f"--uda {uda!r}: no ranked universities in that area")
    policy = FundingPolicy(
        n_classes=cfg["classes"],
        adjacent_ratio=cfg["ratio"],
        bottom_class_funded=bool(cfg["bottom_funded"]),
        budget=cfg["budget"],
    )
    allocation = allocate(rankings[uda], policy, uda)
    selection = select_top(scored.scores, SCOPE_NATIONAL, cfg["share"], cfg["min_staff"])
    census = national_top_census(
        scored.scores,
        corpus.taxonomy,
        uda,
        allocation.class_of(),
        n_classes=cfg["classes"],
        share=cfg["share"],
        min_staff=cfg["min_staff"],
        selection=selection,
    )
    findings = paradox_report(census, allocation)
    reports.write_allocation_csv(out, allocation)
    if cfg["census"]:
        reports.write_census_csv(cfg["census"], census, allocation)
    if cfg["findings"]:
        reports.write_findings_json(cfg["findings"], {uda: findings})
    reports.write_manifest(_manifest_path(out), "fund", cfg, _corpus_paths(cfg["corpus"]))
    print(
        f"allocated {float(allocation.total):g} across {len(allocation.units)} universities in {uda}; "
        f"{census.stranded_count}/{census.total_tops} top scientists stranded "
        f"({census.stranded_share:.1%}); {len(findings)} paradox finding(s)"
    )
    return EXIT_OK


def cmd_report_all(args) -> int:
    cfg = _resolve(args, REPORT_ALL_DEFAULTS)
    out_dir = Path(_required(cfg, "out", "--out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    inputs: list[Path] = []
    if cfg["corpus"]:
        corpus = _load(cfg)
        inputs = _corpus_paths(cfg["corpus"])
    else:
        profile = _load_profile(cfg)
        corpus = generate(profile)
        write_corpus(corpus, out_dir / "corpus", profile)
        if cfg["profile"]:
            inputs = [Path(cfg["profile"])]
        log.info("generated corpus: %d researchers", len(corpus.researchers))

    scored = score_corpus(corpus, _credit_scheme(cfg))
    reports.write_scores_csv(out_dir / "scores.csv", scored.scores)

    stats = productivity_stats(scored.scores, corpus.taxonomy)
    reports.write_productivity_csv(out_dir / "productivity_uda.csv", stats)

    ss_by_sds: dict[str, list[float]] = {}
    for score in scored.scores.values():
        ss_by_sds.setdefault(score.sds, []).append(score.ss)
    concentration_rows = []
    for sds in sorted(ss_by_sds):
        values = ss_by_sds[sds]
        if len(values) < 5:
            continue
        try:
            ratio = bottom_top_ratio(values)
        except UndefinedStatisticError:
            ratio = None
        concentration_rows.append((sds, len(values), ratio))
    reports.write_concentration_csv(out_dir / "concentration_sds.csv", concentration_rows)

    units = sds_unit_scores(scored.scores)
    rankings_sds = rank_units(units, LEVEL_SDS, cfg["min_staff"])
    reports.write_ranking_csv(out_dir / "ranks_sds.csv", rankings_sds)
    p_stars = national_averages(units, cfg["pstar"])
    area_units = uda_unit_scores(units, p_stars, corpus.taxonomy)
    rankings_uda = rank_units(area_units, LEVEL_UDA, cfg["min_staff"])
    reports.write_ranking_csv(out_dir / "ranks_uda.csv", rankings_uda)

    selection = select_top(scored.scores, SCOPE_UNIT, cfg["share"], cfg["min_staff"])
    cf_uda = counterfactual_rankings(
        corpus,
        scored.scores,
        selection,
        LEVEL_UDA,
        min_staff=cfg["min_staff"],
        k_classes=cfg["transition_classes"],
        pstar_mode=cfg["pstar"],
    )
    reports.write_counterfactual_csv(
        out_dir / "counterfactual_uda.csv", [cf_uda[c] for c in sorted(cf_uda)], with_field=True
    )
    for code in sorted(cf_uda):
        report = cf_uda[code]
        if report.transition is not None:
            reports.write_transition_csv(out_dir / f"transition_{code}.csv", report)
        if len(report.units) >= 5:
            reports.write_scatter_svg(
                out_dir / f"scatter_{code}.svg", shift_gini_scatter(report), title=code
            )
    cf_sds = counterfactual_rankings(
        corpus,
        scored.scores,
        selection,
        LEVEL_SDS,
        min_staff=cfg["min_staff"],
        k_classes=cfg["transition_classes"],
        pstar_mode=cfg["pstar"],
    )
    reports.write_counterfactual_summary_csv(
        out_dir / "counterfactual_sds_summary.csv", [cf_sds[c] for c in sorted(cf_sds)]
    )

    # A global budget splits across areas proportionally to their ranked staff;
    # otherwise every area gets the per-UDA budget.
    if cfg["global_budget"] is not None:
        staff_by_uda = {
            uda: sum(u.staff for u in ranking) for uda, ranking in rankings_uda.items()
        }
        total_staff = sum(staff_by_uda.values())
        budgets = {
            uda: cfg["global_budget"] * staff / total_staff
            for uda, staff in staff_by_uda.items()
        }
    else:
        budgets = {uda: cfg["budget"] for uda in rankings_uda}
    national_selection = select_top(scored.scores, SCOPE_NATIONAL, cfg["share"], cfg["min_staff"])
    census_entries = []
    findings_by_uda = {}
    skipped_udas = []
    for uda in sorted(rankings_uda):
        try:
            policy = FundingPolicy(
                n_classes=cfg["classes"],
                adjacent_ratio=cfg["ratio"],
                bottom_class_funded=bool(cfg["bottom_funded"]),
                budget=budgets[uda],
            )
            allocation = allocate(rankings_uda[uda], policy, uda)
        except (UndefinedStatisticError, MeritrankError) as exc:
            skipped_udas.append({"uda": uda, "reason": str(exc)})
            continue
        census = national_top_census(
            scored.scores,
            corpus.taxonomy,
            uda,
            allocation.class_of(),
            n_classes=cfg["classes"],
            share=cfg["share"],
            min_staff=cfg["min_staff"],
            selection=national_selection,
        )
        findings_by_uda[uda] = paradox_report(census, allocation)
        census_entries.append((uda, census, allocation))
    reports.write_combined_census_csv(out_dir / "funding_census.csv", census_entries)
    reports.write_findings_json(out_dir / "paradoxes.json", findings_by_uda)

    ss_values = sorted((s.ss for s in scored.scores.values()), reverse=True)
    total_ss = sum(ss_values)
    n_top = max(1, round(0.2 * len(ss_values))) if ss_values else 0
    summary = {
        "researchers": len(corpus.researchers),
        "publications": len(corpus.publications),
        "universities": len(corpus.universities),
        "active_sds": len(scored.active_sds),
        "scored_researchers": len(scored.scores),
        "non_productive_share": stats.overall_non_productive,
        "nil_impact_share": stats.overall_nil_impact,
        "top20_impact_share": (sum(ss_values[:n_top]) / total_ss) if total_ss else 0.0,
        "stranded_top_scientists": sum(c.stranded_count for _, c, _ in census_entries),
        "total_top_scientists": sum(c.total_tops for _, c, _ in census_entries),
        "skipped_udas": skipped_udas,
    }
    with open(out_dir / "summary.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    reports.write_manifest(out_dir / "manifest.json", "report-all", cfg, inputs)
    print(
        f"report-all complete in {out_dir}: {summary['scored_researchers']} scored researchers, "
        f"{len(rankings_sds)} SDS rankings, {len(rankings_uda)} UDA rankings"
    )
    return EXIT_OK


def _add_corpus_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", metavar="DIR", help="directory with publications.jsonl, researchers.csv, taxonomy.csv")
    parser.add_argument("--window", nargs=2, type=int, metavar=("START", "END"), help="observation window years")
    parser.add_argument("--credit", choices=sorted(CREDIT_MODES), help="author credit mode")
    parser.add_argument("--first-w", dest="first_w", type=float, help="positional weight of the first author")
    parser.add_argument("--last-w", dest="last_w", type=float, help="positional weight of the last author")
    parser.add_argument("--middle-w", dest="middle_w", type=float, help="positional weight of middle authors")
    parser.add_argument("--extramural-discount", dest="extramural_discount", type=float, help="multiplier for extramural author slots, in (0, 1]")
    parser.add_argument("--min-staff", dest="min_staff", type=int, help="minimum unit staff for rankings and selections")
    parser.add_argument("--pstar", choices=[PSTAR_MEAN_OF_UNITS, PSTAR_POOLED], help="national average mode")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meritrank",
        description="Field-normalized research performance indicators, counterfactual rankings, and funding simulation.",
    )
    parser.add_argument("--version", action="version", version=f"meritrank {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("--profile", metavar="FILE", help="generator profile JSON")
    p.add_argument("--seed", type=int, help="override the profile seed")
    p.add_argument("--out", metavar="DIR", help="output corpus directory")
    _add_common(p)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("calibrate", help="tune a generator profile toward target shares")
    p.add_argument("--profile", metavar="FILE")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="FILE", help="calibrated profile JSON")
    p.add_argument("--target-non-productive", dest="target_non_productive", type=float)
    p.add_argument("--target-nil-impact", dest="target_nil_impact", type=float)
    p.add_argument("--target-top20-share", dest="target_top20_share", type=float)
    p.add_argument("--tolerance", type=float)
    _add_common(p)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("indicators", help="per-researcher scores CSV")
    _add_corpus_options(p)
    p.add_argument("--out", metavar="FILE", help="scores CSV path")
    _add_common(p)
    p.set_defaults(handler=cmd_indicators)

    p = sub.add_parser("rank", help="university rankings per field")
    _add_corpus_options(p)
    p.add_argument("--level", choices=[LEVEL_SDS, LEVEL_UDA])
    p.add_argument("--field", metavar="CODE", help="restrict to one SDS/UDA code")
    p.add_argument("--out", metavar="FILE", help="ranking CSV path")
    p.add_argument("--json", metavar="FILE", help="also write the ranking as JSON")
    _add_common(p)
    p.set_defaults(handler=cmd_rank)

    p = sub.add_parser("counterfactual", help="observed vs top-removed rankings")
    _add_corpus_options(p)
    p.add_argument("--level", choices=[LEVEL_SDS, LEVEL_UDA])
    p.add_argument("--field", metavar="CODE")
    p.add_argument("--share", type=float, help="top share removed per unit (default 0.2)")
    p.add_argument("--classes", type=int, help="quantile classes for the transition matrix")
    p.add_argument(
        "--refit-pstar",
        dest="refit_pstar",
        action="store_true",
        default=None,
        help="recompute national averages in the hypothetical scenario (sensitivity analysis)",
    )
    p.add_argument("--out", metavar="FILE", help="rank-shift CSV path")
    p.add_argument("--svg", metavar="FILE", help="rank shift vs Gini scatter (needs --field)")
    p.add_argument("--transition", metavar="FILE", help="class transition CSV (needs --field)")
    _add_common(p)
    p.set_defaults(handler=cmd_counterfactual)

    p = sub.add_parser("fund", help="class-weighted funding simulation for one UDA")
    _add_corpus_options(p)
    p.add_argument("--uda", metavar="CODE")
    p.add_argument("--budget", type=Fraction, help="budget for the area (exact rational)")
    p.add_argument("--classes", type=int, help="number of funding classes (default 4)")
    p.add_argument("--ratio", type=Fraction, help="per-capita ratio between adjacent classes (default 3)")
    p.add_argument("--bottom-funded", dest="bottom_funded", action="store_true", default=None, help="fund the bottom class too")
    p.add_argument("--share", type=float, help="national top share per SDS (default 0.2)")
    p.add_argument("--out", metavar="FILE", help="allocation CSV path")
    p.add_argument("--census", metavar="FILE", help="top-scientist census CSV path")
    p.add_argument("--findings", metavar="FILE", help="paradox findings JSON path")
    _add_common(p)
    p.set_defaults(handler=cmd_fund)

    p = sub.add_parser("report-all", help="full pipeline into one output directory")
    _add_corpus_options(p)
    p.add_argument("--profile", metavar="FILE", help="generate a corpus from this profile instead of --corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--budget", type=Fraction, help="budget per discipline area")
    p.add_argument(
        "--global-budget",
        dest="global_budget",
        type=Fraction,
        help="single budget split across areas proportionally to ranked staff",
    )
    p.add_argument("--classes", type=int)
    p.add_argument("--ratio", type=Fraction)
    p.add_argument("--bottom-funded", dest="bottom_funded", action="store_true", default=None)
    p.add_argument("--share", type=float)
    p.add_argument("--transition-classes", dest="transition_classes", type=int)
    _add_common(p)
    p.set_defaults(handler=cmd_report_all)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on flag errors; the spec reserves 2 for undefined
        # statistics, so flag problems map to the validation code.
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    if getattr(args, "command", None) is None:
        parser.print_help()
        return EXIT_VALIDATION
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except UndefinedStatisticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED_STATISTIC
    except (ValidationError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MeritrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
