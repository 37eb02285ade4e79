"""Scoring single responses with the default construct."""
from fuzzysuccess import LikertResponse, render_rules, default_construct, evaluate, impute_neutral, mirror

config = default_construct()
print([(d.name, d.items) for d in config.dimensions])
print(config.dimension_weights.normalized)

# management 2, impact 4, satisfaction 3: impact pulls the score above the plain mean
r = LikertResponse("mixed", (2,) * 5 + (4,) * 5 + (3,) * 4)
res = evaluate(config, r)
print(res.dimensions)
print("overall", round(res.overall, 4), "baseline", res.baseline, "divergence", round(res.divergence, 4))

# reversing every answer reflects the score about 3
print(evaluate(config, mirror(r)).overall, 6 - res.overall)

# rules that fired at the top stage
for rule, s in sorted(res.traces["overall_success"].fired(), key=lambda p: -p[1])[:5]:
    print(f"{s:.3g}", render_rules([rule]).strip())

# a missing item is an error unless neutral imputation is asked for
gap = LikertResponse("gap", (None,) + (5,) * 13)
print(impute_neutral(gap).items)
print(evaluate(config, gap, impute=True).overall)

# seven-point profile
seven = default_construct("seven_point")
print(evaluate(seven, LikertResponse("s", (6,) * 14)).overall)
