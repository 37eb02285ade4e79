"""Acceptance criteria, one test per criterion.

Each test checks its own runtime limit. The terminal summary prints one
PASS/FAIL line per criterion.
"""
import itertools
import json
import time
import warnings

import numpy as np
import pytest

import oracle
from fuzzysuccess import (
    LikertResponse,
    RuleSyntaxError,
    Triangular,
    Trapezoidal,
    WeightProfile,
    evaluate,
    generate_rulebase,
    infer,
    likert_variable,
    mirror,
    output_variable,
    parse_rules,
    render_rules,
    rescale,
    sample,
)
from fuzzysuccess.cli import main
from fuzzysuccess.fuzzy_core import LinguisticVariable, defuzzify_centroid
from fuzzysuccess.rulebase import Rule, RuleBase

CTX = [likert_variable(n) for n in ("mgmt", "impact", "sat")]
OUT = output_variable("overall")
MIXED = (2,) * 5 + (4,) * 5 + (3,) * 4
PINNED_OVERALL = 3.458181818181817


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self, record):
        elapsed = time.perf_counter() - self.start
        record["detail"] = f"{elapsed:.2f}s of {self.limit}s" + (
            "; " + record["detail"] if record["detail"] else "")
        assert elapsed < self.limit, f"took {elapsed:.1f}s, limit {self.limit}s"


def responses(n, seed, hi=5):
    rng = np.random.default_rng(seed)
    return [LikertResponse(f"r{k}", tuple(int(v) for v in rng.integers(1, hi + 1, 14))) for k in range(n)]


def check_endpoints(config, record):
    lo, hi = config.scale.lo, config.scale.hi
    mid = int(config.scale.midpoint)
    worst = 0.0
    for value in (lo, mid, hi):
        r = evaluate(config, LikertResponse("e", (value,) * 14))
        for s in [*r.dimensions.values(), r.overall]:
            worst = max(worst, abs(s - value))
    record["detail"] = f"max error {worst:.2e}"
    assert worst < 1e-6


def check_mirror(config, record, n=1000):
    axis = config.scale.lo + config.scale.hi
    worst = 0.0
    for r in responses(n, 11, config.scale.hi):
        a = evaluate(config, r).overall
        b = evaluate(config, mirror(r, config.scale)).overall
        worst = max(worst, abs(b - (axis - a)))
    record["detail"] = f"max error {worst:.2e}"
    assert worst < 1e-5


@pytest.mark.criterion(1, "endpoint exactness")
def test_criterion_1_endpoints(five, criterion):
    clock = Clock(1)
    check_endpoints(five, criterion)
    clock.check(criterion)


@pytest.mark.criterion(2, "analytic centroid oracle")
def test_criterion_2_centroids(criterion):
    clock = Clock(1)
    cases = [
        (Triangular(1, 3, 5), 3.0),
        (Triangular(3, 5, 5), 13 / 3),
        (Triangular(1, 1, 3), 5 / 3),
        (Trapezoidal(1, 2, 4, 5), 3.0),
    ]
    worst = shift = 0.0
    for mf, exact in cases:
        var = LinguisticVariable("v", 1, 5, (("s", mf),))
        got = {n: defuzzify_centroid(sample(var, "s", n)) for n in (1001, 2001)}
        worst = max(worst, *(abs(g - exact) for g in got.values()))
        shift = max(shift, abs(got[1001] - got[2001]))
        assert mf.centroid() == pytest.approx(exact, abs=1e-12)
    criterion["detail"] = f"max error {worst:.2e}, doubling shift {shift:.2e}"
    assert worst < 1e-4 and shift < 1e-4
    clock.check(criterion)


@pytest.mark.criterion(3, "fine-grid oracle equivalence")
def test_criterion_3_oracle(five, criterion):
    clock = Clock(120)
    rng = np.random.default_rng(3)
    top_weights = [five.dimension_weights.normalized[d.name] for d in five.dimensions]
    worst = 0.0
    for name, fis in five.stages.items():
        names = fis.input_names
        weights = top_weights if name == "overall_success" else [1.0] * len(names)
        for _ in range(500):
            x = rng.uniform(1, 5, len(names))
            got, _ = fis.score(dict(zip(names, x.tolist())))
            expected = oracle.stage(x.tolist(), weights, 1, 5)
            worst = max(worst, abs(got - expected))
    criterion["detail"] = f"max error {worst:.2e}"
    assert worst < 1e-3
    clock.check(criterion)


@pytest.mark.criterion(4, "mirror symmetry")
def test_criterion_4_mirror(five, criterion):
    clock = Clock(60)
    check_mirror(five, criterion)
    clock.check(criterion)


@pytest.mark.criterion(5, "empirical monotonicity")
def test_criterion_5_monotone(five, criterion):
    clock = Clock(300)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(10_000):
        items = rng.integers(1, 6, 14)
        j = int(rng.choice(np.flatnonzero(items < 5)))
        raised = items.copy()
        raised[j] += 1
        a = evaluate(five, LikertResponse("a", tuple(items.tolist())))
        b = evaluate(five, LikertResponse("b", tuple(raised.tolist())))
        for name in a.dimensions:
            worst = min(worst, b.dimensions[name] - a.dimensions[name])
        worst = min(worst, b.overall - a.overall)
    criterion["detail"] = f"largest decrease {worst:.2e}"
    assert worst >= -1e-9
    clock.check(criterion)


def _rule_table(fis):
    names = fis.input_names
    table = {}
    for r in fis.rules:
        pattern = tuple(fis.inputs[i].label_index(lab) for i, lab in enumerate(r.pattern(names)))
        table[pattern] = fis.output.label_index(r.consequent[1])
    return table


@pytest.mark.criterion(6, "rule-base properties")
def test_criterion_6_rulebases(five, seven, criterion):
    clock = Clock(10)
    assert [len(f.rules) for f in five.stages.values()] == [243, 243, 81, 27]
    checked = 0
    for config in (five, seven):
        for fis in config.stages.values():
            n, top = len(fis.inputs), len(fis.output.labels) - 1
            table = _rule_table(fis)
            assert len(table) == len(fis.rules) == 3 ** n
            assert set(table) == set(itertools.product(range(3), repeat=n))
            for pattern, c in table.items():
                assert table[tuple(2 - p for p in pattern)] == top - c
                for i in range(n):
                    if pattern[i] < 2:
                        assert table[pattern[:i] + (pattern[i] + 1,) + pattern[i + 1:]] >= c
                checked += 1
    criterion["detail"] = f"{checked} patterns"
    clock.check(criterion)


@pytest.mark.criterion(7, "impact-weighted fixture profile")
def test_criterion_7_weighting(five, criterion):
    clock = Clock(1)
    r = evaluate(five, LikertResponse("fixture", MIXED))
    _, expected = oracle.construct(MIXED)
    criterion["detail"] = f"overall {r.overall:.6f}, baseline {r.baseline:.1f}"
    assert expected == pytest.approx(PINNED_OVERALL, abs=1e-9)
    assert r.overall >= r.baseline + 0.1
    assert abs(r.overall - PINNED_OVERALL) < 1e-3
    clock.check(criterion)


def _generated_files(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k = int(rng.integers(1, 4))
        inputs = [CTX[i] for i in sorted(rng.choice(3, k, replace=False))]
        weights = WeightProfile({v.name: float(rng.uniform(0.05, 1)) for v in inputs})
        rb = generate_rulebase(inputs, weights, OUT)
        rules = tuple(Rule(r.antecedent, r.consequent, float(rng.choice([1.0, rng.uniform(0.01, 1)])))
                      for r in rb)
        yield render_rules(RuleBase(rules, "generated"))


@pytest.mark.criterion(8, "rule DSL round-trip and diagnostics")
def test_criterion_8_dsl(fixtures_dir, criterion):
    clock = Clock(5)
    rules_dir = fixtures_dir / "rules"
    generated = list(_generated_files(50, 8))
    for text in generated:
        assert render_rules(parse_rules(text, CTX, OUT)) == text
    hand = sorted((rules_dir / "valid").glob("*.rules"))
    assert len(hand) == 20
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for path in hand:
            rb = parse_rules(path.read_text(), CTX, OUT, source=path.name)
            assert parse_rules(render_rules(rb), CTX, OUT).rules == rb.rules
    expected = json.loads((rules_dir / "malformed.json").read_text())
    assert len(expected) == 15
    for name, position in expected.items():
        with pytest.raises(RuleSyntaxError) as exc:
            parse_rules((rules_dir / "malformed" / name).read_text(), CTX, OUT, source=name)
        assert [exc.value.line, exc.value.column] == position, name
        assert str(exc.value).startswith(f"{name}:{position[0]}:{position[1]}:")
    criterion["detail"] = f"{len(generated)} generated, {len(hand)} hand-written, {len(expected)} malformed"
    clock.check(criterion)


@pytest.mark.criterion(9, "end-to-end determinism")
def test_criterion_9_determinism(five, fixtures_dir, tmp_path, criterion):
    clock = Clock(30)
    src = fixtures_dir / "synthetic_1000.csv"
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}.json"
        assert main(["score", "--input", str(src), "--output", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    rows = json.loads(outputs[0])["rows"]
    assert len(rows) == 1000
    single = tmp_path / "single.csv"
    lines = src.read_text().splitlines()
    for idx in np.random.default_rng(9).choice(1000, 20, replace=False):
        single.write_text(lines[0] + "\n" + lines[idx + 1] + "\n")
        out = tmp_path / "single.json"
        assert main(["score", "--input", str(single), "--output", str(out)]) == 0
        (row,) = json.loads(out.read_text())["rows"]
        assert row == rows[idx]
    criterion["detail"] = "1000 rows, 20 rescored singly"
    clock.check(criterion)


@pytest.mark.criterion(10, "seven-point profile")
def test_criterion_10_seven_point(seven, criterion):
    clock = Clock(120)
    ends = {}
    check_endpoints(seven, ends)
    mirrored = {}
    check_mirror(seven, mirrored)
    criterion["detail"] = f"endpoints {ends['detail']}, mirror {mirrored['detail']}"
    clock.check(criterion)
