"""Operator choice, custom weights and JSON configuration files."""
import json
import tempfile
from pathlib import Path

from fuzzysuccess import (
    DEFAULT_OPS,
    LARSEN_OPS,
    LikertResponse,
    build_construct,
    evaluate,
    load_config,
    save_config,
)

r = LikertResponse("x", (2,) * 5 + (4,) * 5 + (3,) * 4)

# product conjunction and scaling implication is the default; min/min-clip is available
print(LARSEN_OPS.as_dict(), DEFAULT_OPS.as_dict())
for ops in (LARSEN_OPS, DEFAULT_OPS):
    print(ops.and_op, evaluate(build_construct(ops=ops), r).overall)

# shifting weight from management to impact raises the score for this respondent
for w in (0.2, 0.4, 0.6):
    cfg = build_construct(dimension_weights={"project_management_success": 0.8 - w,
                                             "project_impact_success": w,
                                             "stakeholder_satisfaction": 0.2})
    print(w, round(evaluate(cfg, r).overall, 4))

# configurations round-trip through JSON; rule bases are regenerated unless given
path = Path(tempfile.mkdtemp()) / "construct.json"
save_config(build_construct(output_labels=7), path)
print(json.loads(path.read_text())["output_labels"])
print(evaluate(load_config(path), r).overall)
