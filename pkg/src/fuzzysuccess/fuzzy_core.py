"""Membership functions, sampled fuzzy sets and the Mamdani operator set."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Triangular",
    "Trapezoidal",
    "MembershipFunction",
    "LinguisticVariable",
    "SampledFuzzySet",
    "OperatorSet",
    "EmptyAggregateError",
    "membership",
    "fuzzify",
    "sample",
    "clip",
    "aggregate",
    "defuzzify_centroid",
    "likert_variable",
    "output_variable",
    "ITEM_LABELS",
]

ITEM_LABELS = ("failure", "neutral", "success")
OUTPUT_LABELS = {
    3: ("low", "medium", "high"),
    5: ("very_low", "low", "medium", "high", "very_high"),
    7: ("very_low", "low", "somewhat_low", "medium", "somewhat_high", "high", "very_high"),
}


class EmptyAggregateError(ValueError):
    """Raised when an aggregate carries no mass to defuzzify."""


@dataclass(frozen=True)
class Triangular:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c and self.a < self.c):
            raise ValueError(f"triangular parameters need a <= b <= c and a < c, got {self.params}")

    @property
    def params(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c)

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.c)

    @property
    def core(self) -> tuple[float, float]:
        return (self.b, self.b)

    def __call__(self, x):
        return _piecewise(np.asarray(x, dtype=float), self.a, self.b, self.b, self.c)

    def centroid(self) -> float:
        return (self.a + self.b + self.c) / 3.0


@dataclass(frozen=True)
class Trapezoidal:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d and self.a < self.d):
            raise ValueError(
                f"trapezoidal parameters need a <= b <= c <= d and a < d, got {self.params}"
            )

    @property
    def params(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d)

    @property
    def support(self) -> tuple[float, float]:
        return (self.a, self.d)

    @property
    def core(self) -> tuple[float, float]:
        return (self.b, self.c)

    def __call__(self, x):
        return _piecewise(np.asarray(x, dtype=float), self.a, self.b, self.c, self.d)

    def centroid(self) -> float:
        # Decompose into rising triangle, plateau and falling triangle.
        a, b, c, d = self.params
        parts = [
            ((b - a) / 2.0, (a + 2.0 * b) / 3.0),
            (c - b, (b + c) / 2.0),
            ((d - c) / 2.0, (2.0 * c + d) / 3.0),
        ]
        area = sum(p[0] for p in parts)
        return sum(w * x for w, x in parts) / area


MembershipFunction = Triangular | Trapezoidal


def _piecewise(x: np.ndarray, a: float, b: float, c: float, d: float):
    mu = np.zeros_like(x)
    if b > a:
        rising = (x > a) & (x < b)
        mu = np.where(rising, (x - a) / (b - a), mu)
    if d > c:
        falling = (x > c) & (x < d)
        mu = np.where(falling, (d - x) / (d - c), mu)
    mu = np.where((x >= b) & (x <= c), 1.0, mu)
    if mu.ndim == 0:
        return float(mu)
    return mu


def membership(mf: MembershipFunction, x: float) -> float:
    """Degree of membership of ``x`` in ``mf``; zero outside the support."""
    return float(mf(x))


@dataclass(frozen=True)
class LinguisticVariable:
    """A named Likert universe ``[lo, hi]`` carrying ordered labelled sets."""

    name: str
    lo: float
    hi: float
    labels: tuple[tuple[str, MembershipFunction], ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple((str(n), mf) for n, mf in self.labels))
        if not self.lo < self.hi:
            raise ValueError(f"variable {self.name!r}: need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.labels:
            raise ValueError(f"variable {self.name!r} has no labels")
        names = self.label_names
        if len(set(names)) != len(names):
            raise ValueError(f"variable {self.name!r} has duplicate labels")
        for name, mf in self.labels:
            s0, s1 = mf.support
            if s0 < self.lo or s1 > self.hi:
                raise ValueError(
                    f"label {name!r} of {self.name!r} has support [{s0}, {s1}] "
                    f"outside [{self.lo}, {self.hi}]"
                )

    @property
    def universe(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.labels)

    def label_index(self, label: str) -> int:
        try:
            return self.label_names.index(label)
        except ValueError:
            raise KeyError(f"variable {self.name!r} has no label {label!r}") from None

    def mf(self, label: str) -> MembershipFunction:
        return self.labels[self.label_index(label)][1]

    def grid(self, resolution: int) -> np.ndarray:
        return np.linspace(self.lo, self.hi, resolution)

    def renamed(self, name: str) -> "LinguisticVariable":
        return LinguisticVariable(name, self.lo, self.hi, self.labels)


def fuzzify(var: LinguisticVariable, x: float) -> np.ndarray:
    """Membership vector of ``x`` across the labels of ``var``, in label order."""
    x = float(x)
    if not (var.lo <= x <= var.hi) or np.isnan(x):
        raise ValueError(f"value {x} outside universe [{var.lo}, {var.hi}] of variable {var.name!r}")
    return np.array([mf(x) for _, mf in var.labels])


def likert_variable(name: str, lo: float = 1.0, hi: float = 5.0) -> LinguisticVariable:
    """Shouldered failure/neutral/success partition of a Likert universe."""
    mid = (lo + hi) / 2.0
    return LinguisticVariable(
        name,
        lo,
        hi,
        (
            ("failure", Triangular(lo, lo, mid)),
            ("neutral", Triangular(lo, mid, hi)),
            ("success", Triangular(mid, hi, hi)),
        ),
    )


def output_variable(name: str, lo: float = 1.0, hi: float = 5.0, n_labels: int | None = None,
                    label_names: Sequence[str] | None = None) -> LinguisticVariable:
    """Evenly spaced triangular partition with ``n_labels`` peaks from lo to hi.

    Defaults to one label per scale point.
    """
    if label_names is None:
        if n_labels is None:
            n_labels = int(round(hi - lo)) + 1
        label_names = OUTPUT_LABELS.get(n_labels) or tuple(f"level_{i + 1}" for i in range(n_labels))
    n = len(label_names)
    if n < 2:
        raise ValueError("an output partition needs at least two labels")
    peaks = np.linspace(lo, hi, n)
    labels = []
    for i, label in enumerate(label_names):
        a = peaks[max(i - 1, 0)]
        c = peaks[min(i + 1, n - 1)]
        labels.append((label, Triangular(float(a), float(peaks[i]), float(c))))
    return LinguisticVariable(name, lo, hi, tuple(labels))


@dataclass(frozen=True, eq=False)
class SampledFuzzySet:
    """Membership samples on a uniform grid spanning ``[lo, hi]``."""

    lo: float
    hi: float
    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim != 1 or mu.size < 2:
            raise ValueError("need a 1-d sample vector of at least two points")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def resolution(self) -> int:
        return self.mu.size

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.resolution)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.mu.tolist()))

    def mass(self) -> float:
        return float(np.trapezoid(self.mu, self.x))

    def same_grid(self, other: "SampledFuzzySet") -> bool:
        return (self.lo, self.hi, self.resolution) == (other.lo, other.hi, other.resolution)

    def __eq__(self, other):
        if not isinstance(other, SampledFuzzySet):
            return NotImplemented
        return self.same_grid(other) and bool(np.array_equal(self.mu, other.mu))

    __hash__ = None


def sample(var: LinguisticVariable, label: str, resolution: int = 1001) -> SampledFuzzySet:
    return SampledFuzzySet(var.lo, var.hi, var.mf(label)(var.grid(resolution)))


def _t_min(a, b):
    return np.minimum(a, b)


def _t_product(a, b):
    return a * b


def _s_max(a, b):
    return np.maximum(a, b)


def _s_probsum(a, b):
    return a + b - a * b


def _agg_sum(a, b):
    return np.minimum(a + b, 1.0)


_AND = {"min": _t_min, "product": _t_product}
_OR = {"max": _s_max, "probabilistic_sum": _s_probsum}
_IMPLICATION = {"min": _t_min, "product": _t_product}
_AGGREGATION = {"max": _s_max, "sum": _agg_sum}


@dataclass(frozen=True)
class OperatorSet:
    """Operator choices for one Mamdani stage; defaults are classical Mamdani.

    ``implication`` is ``min`` (clip) or ``product`` (scale); ``aggregation`` is
    ``max`` or ``sum`` (bounded at 1).
    """

    and_op: str = "min"
    or_op: str = "max"
    implication: str = "min"
    aggregation: str = "max"

    def __post_init__(self):
        for value, table, what in (
            (self.and_op, _AND, "and"),
            (self.or_op, _OR, "or"),
            (self.implication, _IMPLICATION, "implication"),
            (self.aggregation, _AGGREGATION, "aggregation"),
        ):
            if value not in table:
                raise ValueError(f"unknown {what} operator {value!r}; choose from {sorted(table)}")

    def t_norm(self, a, b):
        return _AND[self.and_op](a, b)

    def s_norm(self, a, b):
        return _OR[self.or_op](a, b)

    def implicate(self, mu, activation):
        return _IMPLICATION[self.implication](mu, activation)

    def combine(self, a, b):
        return _AGGREGATION[self.aggregation](a, b)

    def conjunction(self, values: Iterable[float]) -> float:
        out = 1.0
        for v in values:
            out = float(self.t_norm(out, v))
        return out

    def as_dict(self) -> dict[str, str]:
        return {"and": self.and_op, "or": self.or_op,
                "implication": self.implication, "aggregation": self.aggregation}

    @classmethod
    def from_dict(cls, d: dict, base: "OperatorSet | None" = None) -> "OperatorSet":
        base = base or cls()
        unknown = set(d) - {"and", "or", "implication", "aggregation"}
        if unknown:
            raise ValueError(f"unknown operator keys {sorted(unknown)}")
        return cls(d.get("and", base.and_op), d.get("or", base.or_op),
                   d.get("implication", base.implication), d.get("aggregation", base.aggregation))


DEFAULT_OPS = OperatorSet()
# Product conjunction and product (Larsen) implication keep clipped edge
# labels from shifting their centroid inward, which min-clip does.
LARSEN_OPS = OperatorSet("product", "max", "product", "max")


def clip(fs: SampledFuzzySet, activation: float, ops: OperatorSet = DEFAULT_OPS) -> SampledFuzzySet:
    """Implication of ``activation`` onto a consequent set (min-clip by default)."""
    if not 0.0 <= activation <= 1.0:
        raise ValueError(f"activation {activation} outside [0, 1]")
    return SampledFuzzySet(fs.lo, fs.hi, ops.implicate(fs.mu, activation))


def aggregate(sets: Sequence[SampledFuzzySet], ops: OperatorSet = DEFAULT_OPS) -> SampledFuzzySet:
    if not sets:
        raise EmptyAggregateError("no activated consequents")
    first = sets[0]
    mu = first.mu
    for s in sets[1:]:
        if not first.same_grid(s):
            raise ValueError("cannot aggregate sets sampled on different grids")
        mu = ops.combine(mu, s.mu)
    return SampledFuzzySet(first.lo, first.hi, mu)


def defuzzify_centroid(fs: SampledFuzzySet) -> float:
    """Centre of gravity by the trapezoidal rule over the samples."""
    x = fs.x
    area = np.trapezoid(fs.mu, x)
    if not area > 0.0:
        raise EmptyAggregateError("empty aggregate; no rule fired")
    value = float(np.trapezoid(x * fs.mu, x) / area)
    return min(max(value, fs.lo), fs.hi)

