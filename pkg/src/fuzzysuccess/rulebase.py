"""Rules, the ``.rules`` text format, and weighted-mean rule-base generation.

Rule files are line oriented::

    # comment
    IF impact IS success AND mgmt IS failure THEN overall IS high WITH 0.9
    IF impact IS * THEN overall IS medium

Keywords are case-insensitive, identifiers are not.
"""
from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .fuzzy_core import LinguisticVariable

__all__ = [
    "ANY",
    "Rule",
    "RuleBase",
    "WeightProfile",
    "RuleSyntaxError",
    "RuleValidationError",
    "DuplicateRuleWarning",
    "parse_rules",
    "render_rules",
    "generate_rulebase",
    "round_toward_middle",
]

ANY = "*"
KEYWORDS = ("IF", "AND", "THEN", "IS", "WITH")


class RuleSyntaxError(ValueError):
    """A rule document failed to parse; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: Sequence[str] = (), source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.source = source
        where = f"{source or '<rules>'}:{line}:{column}: " if line else ""
        tail = f" (expected {' or '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{tail}")


class RuleValidationError(RuleSyntaxError):
    """A well-formed rule references an unknown variable or label."""


class DuplicateRuleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[tuple[str, str], ...]
    consequent: tuple[str, str]
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple((str(v), str(l)) for v, l in self.antecedent))
        object.__setattr__(self, "consequent", (str(self.consequent[0]), str(self.consequent[1])))
        object.__setattr__(self, "weight", float(self.weight))
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"rule weight {self.weight} outside (0, 1]")
        if not self.antecedent:
            raise ValueError("a rule needs at least one antecedent term")
        names = [v for v, _ in self.antecedent]
        if len(set(names)) != len(names):
            raise ValueError(f"variable repeated in antecedent: {names}")

    def pattern(self, inputs: Sequence[str]) -> tuple[str, ...]:
        """Antecedent spread over ``inputs``; absent variables are wildcards."""
        terms = dict(self.antecedent)
        return tuple(terms.get(name, ANY) for name in inputs)


@dataclass(frozen=True)
class RuleBase:
    rules: tuple[Rule, ...]
    source: str = "parsed"

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.source not in ("generated", "parsed"):
            raise ValueError(f"unknown rule-base source {self.source!r}")

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def validate(self, inputs: Sequence[LinguisticVariable], output: LinguisticVariable) -> "RuleBase":
        by_name = {v.name: v for v in inputs}
        for i, rule in enumerate(self.rules, 1):
            for var, label in rule.antecedent:
                if var not in by_name:
                    raise RuleValidationError(f"rule {i}: unknown input variable {var!r}")
                if label != ANY and label not in by_name[var].label_names:
                    raise RuleValidationError(f"rule {i}: unknown label {label!r} for {var!r}")
            var, label = rule.consequent
            if var != output.name:
                raise RuleValidationError(f"rule {i}: consequent variable {var!r} is not {output.name!r}")
            if label not in output.label_names:
                raise RuleValidationError(f"rule {i}: unknown label {label!r} for {var!r}")
        return self


class WeightProfile:
    """Non-negative importance weights per input, normalised to sum to 1.

    Normalisation is exact: weights are read through their shortest decimal
    form, so ``0.2`` means exactly one fifth.
    """

    def __init__(self, weights: Mapping[str, float]):
        raw = {str(k): float(v) for k, v in weights.items()}
        if not raw:
            raise ValueError("weight profile is empty")
        if any(v < 0 or v != v for v in raw.values()):
            raise ValueError(f"weights must be non-negative, got {raw}")
        exact = {k: Fraction(repr(v)) for k, v in raw.items()}
        total = sum(exact.values())
        if total == 0:
            raise ValueError("weights are all zero")
        self.raw = raw
        self.exact = {k: v / total for k, v in exact.items()}

    @classmethod
    def equal(cls, names: Sequence[str]) -> "WeightProfile":
        return cls({n: 1.0 for n in names})

    @property
    def normalized(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.exact.items()}

    def __getitem__(self, name: str) -> float:
        return float(self.exact[name])

    def __eq__(self, other):
        return isinstance(other, WeightProfile) and self.raw == other.raw

    def __repr__(self):
        return f"WeightProfile({self.raw!r})"


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<star>\*)"
    r"|(?P<bad>.)"
)


def _tokenize(line: str, lineno: int, source):
    tokens = []
    for m in _TOKEN.finditer(line):
        kind = m.lastgroup
        if kind == "ws":
            continue
        col = m.start() + 1
        text = m.group()
        if kind == "bad":
            raise RuleSyntaxError(f"unexpected character {text!r}", lineno, col, source=source)
        if kind == "word" and text.upper() in KEYWORDS:
            kind, text = "kw", text.upper()
        tokens.append((kind, text, col))
    tokens.append(("eol", "end of line", len(line) + 1))
    return tokens


class _LineParser:
    def __init__(self, line: str, lineno: int, source):
        self.tokens = _tokenize(line, lineno, source)
        self.pos = 0
        self.lineno = lineno
        self.source = source

    def _fail(self, expected):
        kind, text, col = self.tokens[self.pos]
        shown = text if kind == "eol" else repr(text)
        raise RuleSyntaxError(f"unexpected token {shown}", self.lineno, col, expected, self.source)

    def peek(self):
        return self.tokens[self.pos]

    def keyword(self, kw):
        kind, text, col = self.peek()
        if kind == "kw" and text == kw:
            self.pos += 1
            return col
        self._fail([kw])

    def ident(self, what):
        kind, text, col = self.peek()
        if kind == "word":
            self.pos += 1
            return text, col
        self._fail([what])

    def parse(self):
        self.keyword("IF")
        terms = [self.term()]
        while self.peek()[:2] == ("kw", "AND"):
            self.pos += 1
            terms.append(self.term())
        if self.peek()[:2] != ("kw", "THEN"):
            self._fail(["AND", "THEN"])
        self.pos += 1
        var = self.ident("variable")
        self.keyword("IS")
        label = self.ident("label")
        weight = None
        if self.peek()[:2] == ("kw", "WITH"):
            self.pos += 1
            kind, text, col = self.peek()
            if kind != "number":
                self._fail(["weight"])
            self.pos += 1
            weight = (float(text), col)
        if self.peek()[0] != "eol":
            self._fail(["WITH", "end of line"] if weight is None else ["end of line"])
        return terms, (var, label), weight

    def term(self):
        var = self.ident("variable")
        self.keyword("IS")
        kind, text, col = self.peek()
        if kind == "word":
            self.pos += 1
            return var, (text, col)
        if kind == "star":
            self.pos += 1
            return var, (ANY, col)
        self._fail(["label", "*"])


def parse_rules(text: str, inputs: Sequence[LinguisticVariable], output: LinguisticVariable,
                strict: bool = False, source: str | None = None) -> RuleBase:
    """Parse a rule document and validate it against the stage's variables.

    A repeated antecedent pattern replaces the earlier rule and emits a
    :class:`DuplicateRuleWarning`; with ``strict`` it is an error.
    """
    by_name = {v.name: v for v in inputs}
    names = [v.name for v in inputs]
    rules: dict[tuple[str, ...], Rule] = {}
    first_seen: dict[tuple[str, ...], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        terms, (cvar, clabel), weight = _LineParser(line, lineno, source).parse()

        seen = set()
        for (var, vcol), (label, lcol) in terms:
            if var not in by_name:
                raise RuleValidationError(f"unknown variable {var!r}", lineno, vcol,
                                          sorted(by_name), source)
            if var in seen:
                raise RuleValidationError(f"variable {var!r} repeated", lineno, vcol, source=source)
            seen.add(var)
            if label != ANY and label not in by_name[var].label_names:
                raise RuleValidationError(f"unknown label {label!r} for variable {var!r}",
                                          lineno, lcol, by_name[var].label_names, source)
        if cvar[0] != output.name:
            raise RuleValidationError(f"unknown output variable {cvar[0]!r}", lineno, cvar[1],
                                      [output.name], source)
        if clabel[0] not in output.label_names:
            raise RuleValidationError(f"unknown label {clabel[0]!r} for variable {output.name!r}",
                                      lineno, clabel[1], output.label_names, source)
        w = 1.0
        if weight is not None:
            w, wcol = weight
            if not 0.0 < w <= 1.0:
                raise RuleValidationError(f"weight {w} outside (0, 1]", lineno, wcol, source=source)

        rule = Rule(tuple((v, l) for (v, _), (l, _) in terms), (cvar[0], clabel[0]), w)
        key = rule.pattern(names)
        if key in rules:
            msg = f"antecedent pattern already defined on line {first_seen[key]}"
            if strict:
                raise RuleValidationError(msg, lineno, 1, source=source)
            warnings.warn(f"{source or '<rules>'}:{lineno}: {msg}; later rule wins",
                          DuplicateRuleWarning, stacklevel=2)
            del rules[key]
        rules[key] = rule
        first_seen[key] = lineno
    if not rules:
        raise RuleSyntaxError("no rules", source=source)
    return RuleBase(tuple(rules.values()), "parsed")


def render_rules(rb: RuleBase | Sequence[Rule]) -> str:
    lines = []
    for rule in rb:
        terms = " AND ".join(f"{v} IS {l}" for v, l in rule.antecedent)
        line = f"IF {terms} THEN {rule.consequent[0]} IS {rule.consequent[1]}"
        if rule.weight != 1.0:
            line += f" WITH {rule.weight!r}"
        lines.append(line)
    return "".join(line + "\n" for line in lines)


# --- generation --------------------------------------------------------------

def round_toward_middle(value: Fraction, middle: int) -> int:
    """Nearest integer; exact halves go toward ``middle``."""
    floor = value.numerator // value.denominator
    frac = value - floor
    if frac > Fraction(1, 2):
        return floor + 1
    if frac < Fraction(1, 2):
        return floor
    return floor + 1 if floor < middle else floor


def _peak(var: LinguisticVariable, label: str) -> Fraction:
    lo, hi = var.mf(label).core
    return (Fraction(repr(float(lo))) + Fraction(repr(float(hi)))) / 2


def generate_rulebase(inputs: Sequence[LinguisticVariable], weights: WeightProfile,
                      output: LinguisticVariable) -> RuleBase:
    """Complete rule base whose consequents track the weighted mean of label peaks.

    Each input must carry three labels; the consequent is the output label
    whose index is the weighted mean of antecedent peaks rounded to the
    nearest output peak, exact halves breaking toward the middle label.
    The output peaks must be evenly spaced across the input universe.
    """
    names = [v.name for v in inputs]
    for v in inputs:
        if len(v.labels) != 3:
            raise ValueError(f"input {v.name!r} has {len(v.labels)} labels; generation needs 3")
    missing = set(names) - set(weights.exact)
    if missing:
        raise ValueError(f"no weight for inputs {sorted(missing)}")
    n_out = len(output.labels)
    if n_out < 2:
        raise ValueError("output needs at least two labels")
    peaks_out = [_peak(output, l) for l in output.label_names]
    # Step from the end peaks; interior peaks only need to sit there up to float noise.
    step = (peaks_out[-1] - peaks_out[0]) / (n_out - 1)
    slack = Fraction(1, 10**9) * abs(peaks_out[-1] - peaks_out[0])
    if step <= 0 or any(abs(p - (peaks_out[0] + k * step)) > slack for k, p in enumerate(peaks_out)):
        raise ValueError(f"output {output.name!r} peaks are not evenly spaced")
    if n_out % 2 == 0:
        raise ValueError("output partition needs an odd number of labels")
    middle = (n_out - 1) // 2

    w = [weights.exact[n] for n in names]
    peaks_in = [[_peak(v, l) for l in v.label_names] for v in inputs]
    rules = []
    for combo in itertools.product(range(3), repeat=len(inputs)):
        mean = sum(wi * peaks_in[i][c] for i, (wi, c) in enumerate(zip(w, combo)))
        position = (mean - peaks_out[0]) / step
        idx = min(max(round_toward_middle(position, middle), 0), n_out - 1)
        antecedent = tuple((names[i], inputs[i].label_names[c]) for i, c in enumerate(combo))
        rules.append(Rule(antecedent, (output.name, output.label_names[idx])))
    return RuleBase(tuple(rules), "generated")
