"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 config error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import itertools
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .construct import (
    OVERALL,
    ConfigError,
    ConstructConfig,
    LikertResponse,
    ResponseError,
    default_construct,
    evaluate,
    load_config,
)
from .fuzzy_core import EmptyAggregateError
from .inference import FisConfig
from .rulebase import ANY, DuplicateRuleWarning, RuleSyntaxError, parse_rules, render_rules
from .survey import DataError, emit_plot_data, load_csv, report_to_csv, report_to_json, score_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONFIG = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _config(args) -> ConstructConfig:
    if args.config is None:
        return default_construct(args.profile)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DuplicateRuleWarning)
            return load_config(args.config, strict=getattr(args, "strict", False))
    except ValueError as exc:
        raise _Fail(EXIT_CONFIG, str(exc)) from None


def _stage(config: ConstructConfig, name: str):
    stages = config.stages
    if name not in stages:
        raise _Fail(EXIT_USAGE, f"unknown stage {name!r}; choose from {', '.join(stages)}")
    return stages[name]


def cmd_score(args) -> int:
    config = _config(args)
    try:
        ds = load_csv(args.input, config.scale, config.n_items, strict=args.strict)
        report = score_dataset(config, ds, impute=args.impute_neutral, strict=args.strict)
    except DataError as exc:
        raise _Fail(EXIT_DATA, str(exc)) from None
    for d in ds.diagnostics:
        print(f"{args.input}: {d}", file=sys.stderr)
    for o in report.rows:
        if not o.ok:
            print(f"{args.input}: respondent {o.respondent_id}: {o.error}", file=sys.stderr)
    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    out = Path(args.output)
    try:
        out.write_text(text, encoding="utf-8")
        meta = {
            "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            "version": __version__,
            "input": str(args.input),
            "config": str(args.config) if args.config else f"default:{args.profile}",
            "rows_scored": sum(o.ok for o in report.rows),
            "rows_failed": sum(not o.ok for o in report.rows),
            "rows_rejected": len({d.row for d in ds.diagnostics}),
        }
        out.with_name(out.name + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n")
    except OSError as exc:
        raise _Fail(EXIT_DATA, f"{out}: {exc.strerror}") from None
    return EXIT_OK


def _ruspini_gap(var, resolution=10_001) -> float:
    x = var.grid(resolution)
    return float(np.max(np.abs(sum(mf(x) for _, mf in var.labels) - 1.0)))


def cmd_validate(args) -> int:
    config = _config(args)
    stages = config.stages
    print(f"scale: {config.scale.name} [{config.scale.lo}, {config.scale.hi}]")
    print(f"operators: {' '.join(f'{k}={v}' for k, v in config.ops.as_dict().items())}")
    print(f"resolution: {config.resolution}")
    print("rules: " + "+".join(str(len(f.rules)) for f in stages.values()))
    problems = []
    for name, fis in stages.items():
        c_min, c_max = fis.calibration
        covered = _coverage(fis)
        total = 3 ** len(fis.inputs)
        print(f"  {name}: {len(fis.inputs)} inputs, {len(fis.rules)} rules ({fis.rules.source}), "
              f"coverage {covered}/{total}, calibration c_min={c_min:.6f} c_max={c_max:.6f}")
        if covered < total:
            problems.append(f"{name}: {total - covered} antecedent patterns fire no rule")
        for var in fis.inputs:
            if _ruspini_gap(var) > 1e-9:
                problems.append(f"{name}: variable {var.name} is not a Ruspini partition")
    for p in problems:
        print(f"warning: {p}", file=sys.stderr)
    return EXIT_OK


def _coverage(fis) -> int:
    """Label patterns (one label per input) matched by at least one rule."""
    names = fis.input_names
    patterns = [r.pattern(names) for r in fis.rules]
    count = 0
    for combo in itertools.product(*(v.label_names for v in fis.inputs)):
        if any(all(p == ANY or p == c for p, c in zip(pat, combo)) for pat in patterns):
            count += 1
    return count


def cmd_explain(args) -> int:
    config = _config(args)
    try:
        items = tuple(None if v.strip() == "" else int(v) for v in args.response.split(","))
        response = LikertResponse(args.id, items)
        result = evaluate(config, response, impute=args.impute_neutral)
    except ValueError as exc:
        raise _Fail(EXIT_DATA, f"response: {exc}") from None
    except EmptyAggregateError as exc:
        raise _Fail(EXIT_CONFIG, str(exc)) from None
    for d in config.dimensions:
        print(f"{d.name}: {result.dimensions[d.name]:.6f}")
    print(f"{OVERALL}: {result.overall:.6f}")
    print(f"baseline_mean: {result.baseline:.6f}")
    print(f"divergence: {result.divergence:+.6f}")
    for name, trace in result.traces.items():
        fired = sorted(trace.fired(), key=lambda rs: -rs[1])
        print(f"\n[{name}] raw centroid {trace.crisp_output:.6f}, "
              f"{len(fired)} of {len(trace.rules)} rules fired")
        for rule, s in fired[: args.top]:
            print(f"  {s:<9.6g} {render_rules([rule]).strip()}")
        if len(fired) > args.top:
            print(f"  ... {len(fired) - args.top} more")
    return EXIT_OK


def cmd_plot_data(args) -> int:
    config = _config(args)
    try:
        paths = emit_plot_data(config, args.out)
    except DataError as exc:
        raise _Fail(EXIT_DATA, str(exc)) from None
    print(f"wrote {len(paths)} files to {args.out}")
    return EXIT_OK


def cmd_rules_generate(args) -> int:
    config = _config(args)
    names = [args.stage] if args.stage else list(config.stages)
    if args.out is None:
        if len(names) != 1:
            raise _Fail(EXIT_USAGE, "--stage is required when writing to stdout")
        sys.stdout.write(render_rules(_stage(config, names[0]).rules))
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in names:
        (out / f"{name}.rules").write_text(render_rules(_stage(config, name).rules), encoding="utf-8")
    print(f"wrote {len(names)} rule files to {out}")
    return EXIT_OK


def cmd_rules_check(args) -> int:
    config = _config(args)
    fis = _stage(config, args.stage)
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_DATA, f"{path}: {exc.strerror}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DuplicateRuleWarning)
        try:
            rb = parse_rules(text, fis.inputs, fis.output, strict=args.strict, source=str(path))
        except RuleSyntaxError as exc:
            raise _Fail(EXIT_CONFIG, str(exc)) from None
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    checked = FisConfig(fis.inputs, fis.output, rb, fis.ops, fis.resolution)
    total = 3 ** len(fis.inputs)
    print(f"{path}: {len(rb)} rules, coverage {_coverage(checked)}/{total} patterns")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fuzzysuccess", description="Hierarchical fuzzy scoring of project-success surveys.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="construct configuration (JSON); default construct if omitted")
        sp.add_argument("--profile", choices=["five_point", "seven_point"], default="five_point",
                        help="scale profile of the default construct")

    sp = sub.add_parser("score", help="score a CSV of responses")
    common(sp)
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--impute-neutral", action="store_true")
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("validate", help="check a configuration and print its rule counts")
    common(sp)
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("explain", help="score one response and show the firing trace")
    common(sp)
    sp.add_argument("--response", required=True, help='comma-separated items, e.g. "5,4,3,..."')
    sp.add_argument("--id", default="response")
    sp.add_argument("--top", type=int, default=20, help="fired rules listed per stage")
    sp.add_argument("--impute-neutral", action="store_true")
    sp.set_defaults(func=cmd_explain)

    sp = sub.add_parser("plot-data", help="write membership and aggregate curves as CSV")
    common(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_plot_data)

    rules = sub.add_parser("rules", help="emit or lint rule files")
    rsub = rules.add_subparsers(dest="rules_command", required=True, parser_class=_Parser)
    sp = rsub.add_parser("generate", help="write the configured rule bases")
    common(sp)
    sp.add_argument("--stage", help="stage name (dimension or overall_success)")
    sp.add_argument("--out", help="directory for <stage>.rules files; stdout if omitted")
    sp.set_defaults(func=cmd_rules_generate)
    sp = rsub.add_parser("check", help="parse and validate a rule file against a stage")
    common(sp)
    sp.add_argument("--stage", required=True)
    sp.add_argument("--strict", action="store_true", help="duplicate patterns are errors")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_rules_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"fuzzysuccess: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, RuleSyntaxError) as exc:
        print(f"fuzzysuccess: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ResponseError) as exc:
        print(f"fuzzysuccess: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
