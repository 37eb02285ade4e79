"""Membership functions, fuzzification and centroid defuzzification."""
from fuzzysuccess import LinguisticVariable, Triangular, Trapezoidal, fuzzify, likert_variable, output_variable, sample
from fuzzysuccess.fuzzy_core import defuzzify_centroid

# A Likert item: three triangles that sum to 1 everywhere on [1, 5]
item = likert_variable("item_01")
for name, mf in item.labels:
    print(name, mf.params)

for x in (1, 2, 2.5, 3, 4.2, 5):
    print(x, dict(zip(item.label_names, fuzzify(item, x).round(3).tolist())))

# Output variable, one triangle per scale point
out = output_variable("overall")
print(out.label_names)

# Sampled centroid vs the closed form
for mf in (Triangular(1, 3, 5), Triangular(3, 5, 5), Trapezoidal(1, 2, 4, 5)):
    var = LinguisticVariable("v", 1, 5, (("s", mf),))
    print(mf, "analytic", round(mf.centroid(), 6), "sampled", round(defuzzify_centroid(sample(var, "s")), 6))

# The top label at full activation: this is c_max, the calibration anchor
print("c_max", defuzzify_centroid(sample(out, "very_high", 1001)))
