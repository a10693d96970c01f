"""Map where two outcome readings disagree about a feature's explanation.

Three geometric tools locate the disagreements exactly for a two-feature
model: pairwise classification of explanations at a point, the zero-
attribution curve of one feature, and the lines along which both features
tie in importance.

Run: python3 demos/sign_and_ranking_flips.py
"""

import numpy as np

from lpm_shapley import (
    GaussianLPM,
    Link,
    OutcomeKind,
    OutcomeSpec,
    classify_pair,
    equal_importance_lines,
    shapley_two_feature,
    zero_level_curve,
)

model = GaussianLPM(1.0, (1.0, 1.0), (0.0, 0.0), (2.0, 1.0))
log_odds = OutcomeSpec(OutcomeKind.LOG_ODDS, Link.LOGIT)
probability = OutcomeSpec(OutcomeKind.PROBABILITY, Link.LOGIT)
decision = OutcomeSpec(OutcomeKind.DECISION, Link.LOGIT)

print("1. Classifying one sample's pair of explanations")
x = (-0.05, 0.0)
pair = classify_pair(
    shapley_two_feature(model, log_odds, x),
    shapley_two_feature(model, probability, x),
)
print(f"   at x = {x}: per-feature sign disagreement = {pair.sign_disagree},")
print(
    "   top feature: "
    f"{pair.top_feature_a + 1} under the score, {pair.top_feature_b + 1} under probability\n"
)

print("2. Zero-attribution curve of feature 1 (probability outcome)")
grid = np.linspace(-2.0, 2.0, 5)
curve = zero_level_curve(model, probability, 0, grid)
print("   x2        root x1   (score-scale root is always x1 = 0)")
for x2, root in zip(curve.grid, curve.roots):
    print(f"   {x2:+.2f}  ->  {root:+.5f}")
print("   Between a probability root and x1 = 0 the two readings give the")
print("   same feature opposite signs.\n")

print("3. Equal-importance lines (where |phi_1| = |phi_2|)")
for spec, label in ((log_odds, "score"), (probability, "probability"), (decision, "decision")):
    for line in equal_importance_lines(model, spec).lines:
        print(f"   {label:<12} {line.kind:<14} x2 = {line.slope:+.4f} * x1 {line.intercept:+.4f}")
print()
print("   All same-sign lines pass through (-1, -1) — minus the intercept in")
print("   both coordinates — but their slopes differ, so between any two of")
print("   them the readings rank the features differently.")
