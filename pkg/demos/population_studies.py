"""Measure disagreement rates and global importance over a population.

One seeded Monte Carlo population is explained under all three outcome
readings; the studies tally how often signs and top-feature rankings
disagree and how total importance concentrates, with a closed form checking
the score-scale column.

Run: python3 demos/population_studies.py
"""

from lpm_shapley import (
    RngSpec,
    StudyConfig,
    eta_importance_closed_form,
    run_disagreement_study,
    run_importance_study,
)

config = StudyConfig(
    expected_eta=0.0,
    scaled_sigmas=(2.0, 1.0),
    n_samples=200_000,
    rng=RngSpec(seed=42),
)

print(f"Population: expected score 0, scaled deviations (2, 1), n = {config.n_samples:,}\n")

table = run_disagreement_study(config)
print("Disagreement rates (% of samples):")
print(f"{'pair':<28} {'sign':>6}  {'top feature':>11}")
for pair in ("log_odds_vs_probability", "probability_vs_decision", "log_odds_vs_decision"):
    print(f"{pair:<28} {table.sign_pct[pair]:>6.2f}  {table.top_pct[pair]:>11.2f}")
print()

imp = run_importance_study(config)
print("Global importance (sum of |phi| over the population):")
print(f"{'outcome':<14} {'I1':>12} {'I2':>12} {'I1/I2':>7} {'excess':>7}")
for kind in ("log_odds", "probability", "decision"):
    i1, i2 = imp.importance[kind]
    print(
        f"{kind:<14} {i1:>12.1f} {i2:>12.1f}"
        f" {imp.relative[kind]:>7.3f} {imp.excess_pct[kind]:>6.1f}%"
    )
print()

exact = eta_importance_closed_form(config)
sampled = imp.importance["log_odds"]
print("Score-scale importance has a closed form (folded normal):")
for feat, (got, want) in enumerate(zip(sampled, exact), start=1):
    print(f"  I{feat}: sampled {got:.1f} vs exact {want:.1f} ({100 * (got / want - 1):+.3f}%)")
print()
print("The bounded outcomes concentrate extra importance on the stronger")
print("feature; rerunning with the same seed reproduces every digit.")
