"""Batch scoring: CSV ingestion, score reports and plot data."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .construct import (
    FIVE_POINT,
    OVERALL,
    ConstructConfig,
    EvaluationResult,
    LikertResponse,
    ResponseError,
    Scale,
    evaluate,
    item_name,
)
from .fuzzy_core import EmptyAggregateError, LinguisticVariable
from .inference import FiringTrace
from .rulebase import render_rules

__all__ = [
    "Diagnostic",
    "Dataset",
    "DataError",
    "RowOutcome",
    "ScoreReport",
    "load_csv",
    "score_dataset",
    "report_to_json",
    "report_to_csv",
    "summarize",
    "divergence_histogram",
    "emit_plot_data",
    "worked_examples",
    "REPORT_FORMAT",
]

REPORT_FORMAT = "fuzzysuccess-report/1"


class DataError(ValueError):
    """Input data cannot be read or fails validation."""


@dataclass(frozen=True)
class Diagnostic:
    row: int
    column: str
    message: str

    def __str__(self):
        return f"row {self.row}, column {self.column}: {self.message}"


@dataclass
class Dataset:
    rows: list[LikertResponse]
    source: str | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)


def load_csv(path: str | Path, scale: Scale = FIVE_POINT, n_items: int = 14,
             strict: bool = False) -> Dataset:
    """Read ``id,item_01..item_NN`` rows; a blank cell is a missing item.

    Bad rows are rejected with a diagnostic, or abort the load under
    ``strict``. Rows are numbered by file line, the header being line 1.
    Without an ``id`` column the data-row number becomes the id.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None

    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise DataError(f"{path}: empty file, header row required")
    header = [h.strip() for h in header]
    columns = [item_name(i) for i in range(1, n_items + 1)]
    for col in columns:
        if col not in header:
            raise DataError(f"{path}: missing required column {col!r}")
    positions = [header.index(c) for c in columns]
    id_pos = header.index("id") if "id" in header else None

    ds = Dataset([], str(path))
    for data_index, record in enumerate(reader, 1):
        line = data_index + 1
        if not any(cell.strip() for cell in record):
            continue
        problems = []
        values: list[int | None] = []
        for col, pos in zip(columns, positions):
            cell = record[pos].strip() if pos < len(record) else ""
            if cell == "":
                values.append(None)
                continue
            try:
                v = int(cell)
            except ValueError:
                problems.append(Diagnostic(line, col, f"non-integer value {cell!r}"))
                continue
            if not scale.lo <= v <= scale.hi:
                problems.append(Diagnostic(line, col, f"value {v} out of range {scale.lo}..{scale.hi}"))
                continue
            values.append(v)
        if problems:
            if strict:
                raise DataError(f"{path}: {problems[0]}")
            ds.diagnostics.extend(problems)
            continue
        rid = record[id_pos].strip() if id_pos is not None and id_pos < len(record) else str(data_index)
        ds.rows.append(LikertResponse(rid, tuple(values)))
    return ds


@dataclass(frozen=True)
class RowOutcome:
    respondent_id: str
    result: EvaluationResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass
class ScoreReport:
    config: ConstructConfig
    rows: list[RowOutcome]
    rejected: list[Diagnostic] = field(default_factory=list)

    @property
    def results(self) -> list[EvaluationResult]:
        return [r.result for r in self.rows if r.result is not None]

    @property
    def summary(self) -> dict[str, dict[str, float]]:
        return summarize(self.config, self.results)

    @property
    def histogram(self) -> list[dict]:
        return divergence_histogram(r.divergence for r in self.results)


def score_dataset(config: ConstructConfig, ds: Dataset | Iterable[LikertResponse],
                  impute: bool = False, strict: bool = False) -> ScoreReport:
    """Evaluate every row in input order; failures are recorded per row unless ``strict``."""
    rows = ds.rows if isinstance(ds, Dataset) else list(ds)
    rejected = list(ds.diagnostics) if isinstance(ds, Dataset) else []
    outcomes = []
    for r in rows:
        try:
            outcomes.append(RowOutcome(r.respondent_id, evaluate(config, r, impute)))
        except (ResponseError, EmptyAggregateError) as exc:
            if strict:
                raise DataError(f"respondent {r.respondent_id!r}: {exc}") from exc
            outcomes.append(RowOutcome(r.respondent_id, error=str(exc)))
    return ScoreReport(config, outcomes, rejected)


def _stats(values: Sequence[float]) -> dict[str, float]:
    n = len(values)
    if n == 0:
        return {"n": 0, "mean": None, "std": None, "min": None, "max": None}
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return {"n": n, "mean": mean, "std": math.sqrt(var), "min": min(values), "max": max(values)}


def summarize(config: ConstructConfig, results: Sequence[EvaluationResult]) -> dict[str, dict]:
    """Population mean, standard deviation, min and max of every score column."""
    out = {}
    for d in config.dimensions:
        out[d.name] = _stats([r.dimensions[d.name] for r in results])
    out[OVERALL] = _stats([r.overall for r in results])
    out["baseline"] = _stats([r.baseline for r in results])
    out["divergence"] = _stats([r.divergence for r in results])
    return out


def divergence_histogram(divergences: Iterable[float], width: float = 0.1) -> list[dict]:
    """Counts of ``overall - baseline`` in half-open bins ``[k*width, (k+1)*width)``."""
    counts: dict[int, int] = {}
    for d in divergences:
        # Round first so 0.3 - 0.2 style noise does not drop a value into the bin below.
        k = math.floor(round(d / width, 9))
        counts[k] = counts.get(k, 0) + 1
    return [{"lo": round(k * width, 10), "hi": round((k + 1) * width, 10), "count": counts[k]}
            for k in sorted(counts)]


def _trace_json(trace: FiringTrace, calibrated: float) -> dict:
    return {
        "raw_output": trace.crisp_output,
        "score": calibrated,
        "aggregate_mass": trace.aggregate_mass,
        "fired": [{"rule": render_rules([rule]).strip(), "strength": s} for rule, s in trace.fired()],
    }


def _row_json(outcome: RowOutcome, traces: bool) -> dict:
    if not outcome.ok:
        return {"id": outcome.respondent_id, "status": "failed", "error": outcome.error}
    r = outcome.result
    scores = dict(r.dimensions)
    scores[OVERALL] = r.overall
    row = {"id": r.respondent_id, "status": "ok", "scores": scores,
           "baseline": r.baseline, "divergence": r.divergence}
    if traces:
        row["traces"] = {name: _trace_json(t, scores[name]) for name, t in r.traces.items()}
    return row


def report_to_json(report: ScoreReport, traces: bool = True) -> str:
    """Deterministic JSON document; floats carry full precision."""
    doc = {
        "format": REPORT_FORMAT,
        "scale": report.config.scale.name,
        "stages": [d.name for d in report.config.dimensions] + [OVERALL],
        "rows": [_row_json(o, traces) for o in report.rows],
        "rejected": [{"row": d.row, "column": d.column, "message": d.message}
                     for d in report.rejected],
        "summary": report.summary,
        "divergence_histogram": report.histogram,
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def report_to_csv(report: ScoreReport) -> str:
    """Flat score table at six decimals, one line per input row."""
    names = [d.name for d in report.config.dimensions]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "status", *names, OVERALL, "baseline", "divergence", "error"])
    for o in report.rows:
        if o.ok:
            r = o.result
            nums = [r.dimensions[n] for n in names] + [r.overall, r.baseline, r.divergence]
            w.writerow([o.respondent_id, "ok", *(f"{v:.6f}" for v in nums), ""])
        else:
            w.writerow([o.respondent_id, "failed", *([""] * (len(names) + 3)), o.error])
    return buf.getvalue()


# --- plot data ---------------------------------------------------------------

def _write_variable(var: LinguisticVariable, resolution: int, path: Path) -> None:
    x = var.grid(resolution)
    cols = [mf(x) for _, mf in var.labels]
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", *var.label_names])
        for i in range(resolution):
            w.writerow([repr(float(x[i]))] + [repr(float(c[i])) for c in cols])


def worked_examples(config: ConstructConfig) -> dict[str, LikertResponse]:
    """All-lowest, all-neutral, all-highest and a mixed profile (low, high, neutral by dimension)."""
    s = config.scale
    n = config.n_items
    examples = {
        "all_low": LikertResponse("all_low", (s.lo,) * n),
        "all_high": LikertResponse("all_high", (s.hi,) * n),
    }
    if s.midpoint == int(s.midpoint):
        examples["all_neutral"] = LikertResponse("all_neutral", (int(s.midpoint),) * n)
        pattern = (s.lo + 1, s.hi - 1, int(s.midpoint))
        items = [0] * n
        for k, d in enumerate(config.dimensions):
            for i in d.items:
                items[i - 1] = pattern[k % 3]
        examples["mixed"] = LikertResponse("mixed", tuple(items))
    return examples


def emit_plot_data(config: ConstructConfig, out_dir: str | Path,
                   examples: dict[str, LikertResponse] | None = None) -> list[Path]:
    """Write membership curves and per-example aggregated output sets as CSV.

    ``variables/`` holds one file per item variable plus one per stage
    output; ``aggregates/`` holds one file per worked example with a column
    per stage.
    """
    out = Path(out_dir)
    try:
        (out / "variables").mkdir(parents=True, exist_ok=True)
        (out / "aggregates").mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"{out}: cannot create output directory: {exc.strerror}") from None
    res = config.resolution
    written = []
    variables = []
    for d in config.dimensions:
        variables.extend(d.fis.inputs)
    variables.sort(key=lambda v: v.name)
    variables += [d.fis.output for d in config.dimensions] + [config.top.output]
    for var in variables:
        path = out / "variables" / f"{var.name}.csv"
        _write_variable(var, res, path)
        written.append(path)

    examples = worked_examples(config) if examples is None else examples
    stages = [d.name for d in config.dimensions] + [OVERALL]
    x = config.top.output.grid(res)
    for name, response in examples.items():
        result = evaluate(config, response)
        path = out / "aggregates" / f"{name}.csv"
        cols = [result.traces[s].aggregate.mu for s in stages]
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", *stages])
            for i in range(res):
                w.writerow([repr(float(x[i]))] + [repr(float(c[i])) for c in cols])
        written.append(path)
    return written
