"""A single Mamdani stage: fire rules, aggregate, defuzzify, rescale."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .fuzzy_core import (
    DEFAULT_OPS,
    EmptyAggregateError,
    LinguisticVariable,
    OperatorSet,
    SampledFuzzySet,
    clip,
    defuzzify_centroid,
    fuzzify,
    sample,
)
from .rulebase import ANY, Rule, RuleBase

__all__ = ["FisConfig", "FiringTrace", "infer", "calibrate", "rescale", "InputError"]


class InputError(ValueError):
    """Crisp inputs do not match the stage's declared variables."""


@dataclass(frozen=True, eq=False)
class FisConfig:
    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rules: RuleBase
    ops: OperatorSet = DEFAULT_OPS
    resolution: int = 1001
    _tables: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.resolution < 101 or self.resolution % 2 == 0:
            raise ValueError(f"resolution must be odd and >= 101, got {self.resolution}")
        names = [v.name for v in self.inputs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate input names {names}")
        if not self.rules.rules:
            raise ValueError("rule base is empty")
        self.rules.validate(self.inputs, self.output)

        width = max(len(v.labels) for v in self.inputs)
        antecedents = np.full((len(self.rules), len(self.inputs)), width, dtype=np.intp)
        for r, rule in enumerate(self.rules):
            for i, label in enumerate(rule.pattern(names)):
                if label != ANY:
                    antecedents[r, i] = self.inputs[i].label_index(label)
        consequents = np.array([self.output.label_index(rule.consequent[1]) for rule in self.rules])
        grid = self.output.grid(self.resolution)
        out_sets = np.stack([mf(grid) for _, mf in self.output.labels])
        out_sets.setflags(write=False)
        object.__setattr__(self, "_tables", {
            "width": width,
            "antecedents": antecedents,
            "consequents": consequents,
            "weights": np.array([rule.weight for rule in self.rules]),
            "out_sets": out_sets,
        })
        object.__setattr__(self, "_calibration", None)

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.inputs)

    @property
    def calibration(self) -> tuple[float, float]:
        if self._calibration is None:
            object.__setattr__(self, "_calibration", calibrate(self))
        return self._calibration

    def score(self, values: Mapping[str, float]) -> tuple[float, "FiringTrace"]:
        """Calibrated crisp output on the output universe, plus the trace."""
        raw, trace = infer(self, values)
        c_min, c_max = self.calibration
        return rescale(raw, c_min, c_max, self.output.universe), trace


@dataclass(frozen=True, eq=False)
class FiringTrace:
    rules: tuple[Rule, ...]
    strengths: np.ndarray
    aggregate: SampledFuzzySet
    aggregate_mass: float
    crisp_output: float

    def __iter__(self) -> Iterator[tuple[Rule, float]]:
        return zip(self.rules, self.strengths.tolist())

    def fired(self) -> list[tuple[Rule, float]]:
        return [(r, s) for r, s in self if s > 0.0]


def _memberships(fis: FisConfig, values: Mapping[str, float]) -> np.ndarray:
    names = fis.input_names
    missing = [n for n in names if n not in values]
    extra = [n for n in values if n not in names]
    if missing or extra:
        raise InputError(f"inputs do not match stage variables: missing {missing}, unexpected {extra}")
    width = fis._tables["width"]
    table = np.ones((len(names), width + 1))
    for i, var in enumerate(fis.inputs):
        table[i, : len(var.labels)] = fuzzify(var, values[var.name])
    return table


def infer(fis: FisConfig, values: Mapping[str, float]) -> tuple[float, FiringTrace]:
    """Raw centroid of the aggregated consequents for one set of crisp inputs.

    Wildcard terms contribute the t-norm's neutral element. Rules that do not
    fire appear in the trace with strength 0 and are left out of the aggregate.
    """
    t = fis._tables
    table = _memberships(fis, values)
    terms = table[np.arange(table.shape[0]), t["antecedents"]]
    if fis.ops.and_op == "min":
        strengths = terms.min(axis=1)
    else:
        strengths = terms.prod(axis=1)
    strengths = strengths * t["weights"]

    fired = strengths > 0.0
    if not fired.any():
        raise EmptyAggregateError("empty aggregate; no rule fired")
    shapes = t["out_sets"][t["consequents"][fired]]
    clipped = fis.ops.implicate(shapes, strengths[fired][:, None])
    if fis.ops.aggregation == "max":
        mu = clipped.max(axis=0)
    else:
        mu = np.minimum(clipped.sum(axis=0), 1.0)
    agg = SampledFuzzySet(fis.output.lo, fis.output.hi, mu)
    crisp = defuzzify_centroid(agg)
    strengths.setflags(write=False)
    return crisp, FiringTrace(fis.rules.rules, strengths, agg, agg.mass(), crisp)


def calibrate(fis: FisConfig) -> tuple[float, float]:
    """Centroids of the lowest and highest output labels at full activation."""
    names = fis.output.label_names
    ends = []
    for label in (names[0], names[-1]):
        full = clip(sample(fis.output, label, fis.resolution), 1.0, fis.ops)
        ends.append(defuzzify_centroid(full))
    c_min, c_max = ends
    if not c_min < c_max:
        raise ValueError(f"degenerate output partition for {fis.output.name!r}: "
                         f"c_min={c_min}, c_max={c_max}")
    return c_min, c_max


def rescale(x: float, c_min: float, c_max: float, universe: Sequence[float]) -> float:
    """Affine map sending ``c_min`` to ``lo`` and ``c_max`` to ``hi``, clamped."""
    lo, hi = universe
    if x == c_max:
        return float(hi)
    if x == c_min:
        return float(lo)
    y = lo + (hi - lo) * (x - c_min) / (c_max - c_min)
    return float(min(max(y, lo), hi))
