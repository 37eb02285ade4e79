"""The two-level project-success construct.

Fourteen Likert items are grouped into three dimensions, each scored by its
own Mamdani stage; the three calibrated dimension scores are fuzzified again
and combined by a top-level stage into the overall score.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .fuzzy_core import LARSEN_OPS, OperatorSet, likert_variable, output_variable
from .inference import FiringTrace, FisConfig
from .rulebase import RuleBase, WeightProfile, generate_rulebase, parse_rules, render_rules

__all__ = [
    "Scale",
    "FIVE_POINT",
    "SEVEN_POINT",
    "SCALES",
    "DIMENSIONS",
    "OVERALL",
    "LikertResponse",
    "DimensionSpec",
    "ConstructConfig",
    "EvaluationResult",
    "ResponseError",
    "ConfigError",
    "build_construct",
    "default_construct",
    "evaluate",
    "impute_neutral",
    "baseline_mean",
    "mirror",
    "item_name",
    "load_config",
    "save_config",
    "config_to_dict",
    "config_from_dict",
]

DIMENSIONS = ("project_management_success", "project_impact_success", "stakeholder_satisfaction")
OVERALL = "overall_success"
DEFAULT_MAPPING = {
    "project_management_success": (1, 2, 3, 4, 5),
    "project_impact_success": (6, 7, 8, 9, 10),
    "stakeholder_satisfaction": (11, 12, 13, 14),
}
# End-user impact first, then satisfaction, then internal management.
DEFAULT_DIMENSION_WEIGHTS = {
    "project_management_success": 0.2,
    "project_impact_success": 0.5,
    "stakeholder_satisfaction": 0.3,
}
CONFIG_FORMAT = "fuzzysuccess-construct/1"


class ResponseError(ValueError):
    """A response is incomplete or off the active scale."""


class ConfigError(ValueError):
    """A construct configuration is malformed or violates an invariant."""


@dataclass(frozen=True)
class Scale:
    name: str
    lo: int
    hi: int

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def points(self) -> int:
        return self.hi - self.lo + 1


FIVE_POINT = Scale("five_point", 1, 5)
SEVEN_POINT = Scale("seven_point", 1, 7)
SCALES = {s.name: s for s in (FIVE_POINT, SEVEN_POINT)}


def item_name(index: int) -> str:
    return f"item_{index:02d}"


@dataclass(frozen=True)
class LikertResponse:
    """One respondent's answers; ``None`` marks a missing item."""

    respondent_id: str
    items: tuple[int | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "respondent_id", str(self.respondent_id))
        items = []
        for v in self.items:
            if v is None:
                items.append(None)
            elif isinstance(v, bool) or int(v) != v:
                raise ResponseError(f"item value {v!r} is not an integer")
            else:
                items.append(int(v))
        object.__setattr__(self, "items", tuple(items))

    @property
    def missing(self) -> list[int]:
        return [i for i, v in enumerate(self.items, 1) if v is None]


@dataclass(frozen=True, eq=False)
class DimensionSpec:
    name: str
    items: tuple[int, ...]
    item_weights: WeightProfile
    fis: FisConfig
    rules_file: str | None = None


@dataclass(frozen=True, eq=False)
class ConstructConfig:
    dimensions: tuple[DimensionSpec, ...]
    top: FisConfig
    dimension_weights: WeightProfile
    scale: Scale = FIVE_POINT
    ops: OperatorSet = LARSEN_OPS
    resolution: int = 1001
    output_labels: int = 5
    top_rules_file: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate dimension names {names}")
        covered = sorted(i for d in self.dimensions for i in d.items)
        if covered != list(range(1, len(covered) + 1)):
            raise ConfigError(f"dimension items must partition 1..n exactly, got {covered}")
        for d in self.dimensions:
            if len(d.items) < 2:
                raise ConfigError(f"dimension {d.name!r} needs at least two items")
        if self.top.input_names != tuple(names):
            raise ConfigError(f"top stage inputs {self.top.input_names} do not match dimensions {names}")
        if set(self.dimension_weights.raw) != set(names):
            raise ConfigError("dimension weights must name exactly the dimensions")

    @property
    def n_items(self) -> int:
        return sum(len(d.items) for d in self.dimensions)

    @property
    def stages(self) -> dict[str, FisConfig]:
        out = {d.name: d.fis for d in self.dimensions}
        out[self.top.output.name] = self.top
        return out

    @property
    def calibration(self) -> dict[str, tuple[float, float]]:
        return {name: fis.calibration for name, fis in self.stages.items()}

    def dimension(self, name: str) -> DimensionSpec:
        for d in self.dimensions:
            if d.name == name:
                return d
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    respondent_id: str
    dimensions: dict[str, float]
    overall: float
    baseline: float
    traces: dict[str, FiringTrace]

    @property
    def divergence(self) -> float:
        return self.overall - self.baseline


def _dimension_fis(name, items, weights, scale, ops, resolution, n_out, rules=None):
    inputs = tuple(likert_variable(item_name(i), scale.lo, scale.hi) for i in items)
    output = output_variable(name, scale.lo, scale.hi, n_out)
    if rules is None:
        rules = generate_rulebase(inputs, weights, output)
    return FisConfig(inputs, output, rules, ops, resolution)


def build_construct(scale: Scale | str = FIVE_POINT,
                    mapping: Mapping[str, Sequence[int]] | None = None,
                    item_weights: Mapping[str, Sequence[float]] | None = None,
                    dimension_weights: Mapping[str, float] | None = None,
                    ops: OperatorSet | None = None,
                    resolution: int = 1001,
                    output_labels: int | None = None,
                    rules: Mapping[str, RuleBase] | None = None,
                    rules_files: Mapping[str, str] | None = None) -> ConstructConfig:
    """Assemble and calibrate a construct; rule bases not supplied in ``rules`` are generated."""
    if isinstance(scale, str):
        try:
            scale = SCALES[scale]
        except KeyError:
            raise ConfigError(f"unknown scale profile {scale!r}; choose from {sorted(SCALES)}") from None
    mapping = dict(DEFAULT_MAPPING if mapping is None else mapping)
    item_weights = dict(item_weights or {})
    dimension_weights = dict(DEFAULT_DIMENSION_WEIGHTS if dimension_weights is None else dimension_weights)
    ops = ops or LARSEN_OPS
    n_out = output_labels or scale.points
    rules = dict(rules or {})
    rules_files = dict(rules_files or {})

    try:
        dims = []
        for name, items in mapping.items():
            items = tuple(int(i) for i in items)
            ws = item_weights.get(name, [1.0] * len(items))
            if len(ws) != len(items):
                raise ConfigError(f"dimension {name!r}: {len(ws)} weights for {len(items)} items")
            wp = WeightProfile({item_name(i): w for i, w in zip(items, ws)})
            fis = _dimension_fis(name, items, wp, scale, ops, resolution, n_out, rules.get(name))
            dims.append(DimensionSpec(name, items, wp, fis, rules_files.get(name)))

        names = [d.name for d in dims]
        dw = WeightProfile({n: dimension_weights[n] for n in names})
        top_inputs = tuple(likert_variable(n, scale.lo, scale.hi) for n in names)
        top_output = output_variable(OVERALL, scale.lo, scale.hi, n_out)
        top_rules = rules.get(OVERALL) or generate_rulebase(top_inputs, dw, top_output)
        top = FisConfig(top_inputs, top_output, top_rules, ops, resolution)
    except KeyError as exc:
        raise ConfigError(f"missing dimension weight for {exc.args[0]!r}") from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    config = ConstructConfig(tuple(dims), top, dw, scale, ops, resolution, n_out,
                             rules_files.get(OVERALL))
    config.calibration  # fail early on a degenerate partition
    return config


def default_construct(profile: Scale | str = FIVE_POINT) -> ConstructConfig:
    """The 5/5/4 item split with impact-first dimension weights (0.2, 0.5, 0.3).

    Every stage uses generated rule bases and product/max/product/max operators.
    """
    return build_construct(profile)


def _check(config: ConstructConfig, r: LikertResponse) -> None:
    if len(r.items) != config.n_items:
        raise ResponseError(f"response {r.respondent_id!r} has {len(r.items)} items, "
                            f"expected {config.n_items}")
    lo, hi = config.scale.lo, config.scale.hi
    for i, v in enumerate(r.items, 1):
        if v is not None and not lo <= v <= hi:
            raise ResponseError(f"{item_name(i)} value {v} out of range {lo}..{hi}")


def impute_neutral(r: LikertResponse, scale: Scale = FIVE_POINT) -> LikertResponse:
    """Replace missing items with the scale midpoint."""
    if not r.missing:
        return r
    mid = scale.midpoint
    if mid != int(mid):
        raise ResponseError(f"scale {scale.name} has no integer midpoint")
    items = tuple(int(mid) if v is None else v for v in r.items)
    return LikertResponse(r.respondent_id, items)


def baseline_mean(r: LikertResponse) -> float:
    """Arithmetic mean of the items, the classical Likert summary."""
    if r.missing:
        raise ResponseError(f"response {r.respondent_id!r} is missing items {r.missing}")
    return sum(r.items) / len(r.items)


def mirror(r: LikertResponse, scale: Scale = FIVE_POINT) -> LikertResponse:
    return LikertResponse(r.respondent_id,
                          tuple(None if v is None else scale.lo + scale.hi - v for v in r.items))


def evaluate(config: ConstructConfig, r: LikertResponse, impute: bool = False) -> EvaluationResult:
    _check(config, r)
    if r.missing:
        if not impute:
            raise ResponseError(f"response {r.respondent_id!r} is missing items {r.missing}")
        r = impute_neutral(r, config.scale)

    scores: dict[str, float] = {}
    traces: dict[str, FiringTrace] = {}
    for d in config.dimensions:
        values = {item_name(i): float(r.items[i - 1]) for i in d.items}
        scores[d.name], traces[d.name] = d.fis.score(values)
    overall, traces[OVERALL] = config.top.score(scores)
    return EvaluationResult(r.respondent_id, scores, overall, baseline_mean(r), traces)


# --- configuration file ------------------------------------------------------

def _rules_entry(rb: RuleBase, rules_file: str | None) -> dict:
    if rules_file is not None:
        return {"rules_file": rules_file}
    if rb.source == "parsed":
        return {"rules": render_rules(rb)}
    return {}


def config_to_dict(config: ConstructConfig) -> dict:
    dims = []
    for d in config.dimensions:
        entry = {
            "name": d.name,
            "items": list(d.items),
            "item_weights": [d.item_weights.raw[item_name(i)] for i in d.items],
        }
        entry.update(_rules_entry(d.fis.rules, d.rules_file))
        dims.append(entry)
    top = {"weights": dict(config.dimension_weights.raw)}
    top.update(_rules_entry(config.top.rules, config.top_rules_file))
    return {
        "format": CONFIG_FORMAT,
        "scale": config.scale.name,
        "resolution": config.resolution,
        "output_labels": config.output_labels,
        "operators": config.ops.as_dict(),
        "dimensions": dims,
        "top": top,
    }


def config_from_dict(data: Mapping, base_dir: str | Path | None = None,
                     strict: bool = False) -> ConstructConfig:
    """Build a construct from its dictionary form.

    ``rules_file`` paths resolve relative to ``base_dir``; dimensions or the
    top stage without ``rules``/``rules_file`` get generated rule bases.
    """
    fmt = data.get("format", CONFIG_FORMAT)
    if fmt != CONFIG_FORMAT:
        raise ConfigError(f"unsupported config format {fmt!r}")
    known = {"format", "scale", "resolution", "output_labels", "operators", "dimensions", "top"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    scale = SCALES.get(data.get("scale", "five_point"))
    if scale is None:
        raise ConfigError(f"unknown scale profile {data.get('scale')!r}")
    try:
        ops = OperatorSet.from_dict(data.get("operators", {}), LARSEN_OPS)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    resolution = int(data.get("resolution", 1001))
    n_out = int(data.get("output_labels", scale.points))

    dim_entries = data.get("dimensions")
    if dim_entries is None:
        dim_entries = [{"name": n, "items": list(i)} for n, i in DEFAULT_MAPPING.items()]
    mapping, item_weights = {}, {}
    texts: dict[str, tuple[str, str | None]] = {}
    for entry in dim_entries:
        if not {"name", "items"} <= set(entry):
            raise ConfigError(f"dimension entry needs 'name' and 'items': {entry!r}")
        name = entry["name"]
        mapping[name] = entry["items"]
        if "item_weights" in entry:
            item_weights[name] = entry["item_weights"]
        texts[name] = _rules_text(entry, base)
    top = data.get("top", {})
    texts[OVERALL] = _rules_text(top, base)
    weights = top.get("weights", DEFAULT_DIMENSION_WEIGHTS)

    # Parse hand-written rules against the stage variables they target.
    scaffold = build_construct(scale, mapping, item_weights, weights, ops, resolution, n_out)
    rules, files = {}, {}
    for name, (text, path) in texts.items():
        if text is None:
            continue
        fis = scaffold.stages[name]
        try:
            rules[name] = parse_rules(text, fis.inputs, fis.output, strict=strict, source=path)
        except ValueError as exc:
            raise ConfigError(f"rules for {name!r}: {exc}") from exc
        if path is not None:
            files[name] = path
    if not rules:
        return scaffold
    return build_construct(scale, mapping, item_weights, weights, ops, resolution, n_out,
                           rules, files)


def _rules_text(entry: Mapping, base: Path) -> tuple[str | None, str | None]:
    if "rules_file" in entry:
        path = entry["rules_file"]
        try:
            return (base / path).read_text(encoding="utf-8"), path
        except OSError as exc:
            raise ConfigError(f"cannot read rules file {path!r}: {exc.strerror}") from None
    return entry.get("rules"), None


def load_config(path: str | Path, strict: bool = False) -> ConstructConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(data, path.parent, strict)


def save_config(config: ConstructConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n", encoding="utf-8")
