"""CSV in, reports and plot data out."""
import random
import tempfile
from pathlib import Path

from fuzzysuccess import default_construct, emit_plot_data, load_csv, report_to_csv, report_to_json, score_dataset

work = Path(tempfile.mkdtemp())
rng = random.Random(1)
lines = ["id," + ",".join(f"item_{i:02d}" for i in range(1, 15))]
for k in range(8):
    lines.append(f"p{k}," + ",".join(str(rng.randint(1, 5)) for _ in range(14)))
lines.append("bad," + ",".join(["7"] + ["3"] * 13))  # out of range, rejected
(work / "survey.csv").write_text("\n".join(lines) + "\n")

config = default_construct()
ds = load_csv(work / "survey.csv")
for d in ds.diagnostics:
    print(d)

report = score_dataset(config, ds)
print(report_to_csv(report))
print(report.summary["overall_success"])
print(report.histogram)
(work / "report.json").write_text(report_to_json(report))

paths = emit_plot_data(config, work / "plots")
print(len(paths), "plot files under", work / "plots")
