"""Rules: writing them by hand, generating them, and reading errors."""
from fuzzysuccess import (
    RuleSyntaxError,
    WeightProfile,
    generate_rulebase,
    likert_variable,
    output_variable,
    parse_rules,
    render_rules,
)

inputs = [likert_variable(n) for n in ("mgmt", "impact", "sat")]
out = output_variable("overall")

text = """
# impact dominates
IF impact IS success AND mgmt IS failure THEN overall IS high WITH 0.9
IF impact IS * THEN overall IS medium
"""
rb = parse_rules(text, inputs, out)
print(render_rules(rb))

# generated bases map each label pattern to the weighted mean of label peaks
weights = WeightProfile({"mgmt": 0.2, "impact": 0.5, "sat": 0.3})
gen = generate_rulebase(inputs, weights, out)
print(len(gen), "rules")
print(render_rules(gen).splitlines()[:5])

# diagnostics carry line and column
try:
    parse_rules("IF mgmt IS success\nIF impact IS grand THEN overall IS high", inputs, out, source="demo.rules")
except RuleSyntaxError as exc:
    print(exc)
