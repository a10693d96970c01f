"""Show how the explanation's reference point depends on the outcome reading.

Every Shapley explanation starts from a baseline — the expected outcome
before any feature is revealed. The three outcome readings have three
different baselines, strictly ordered when the expected score is positive
and the features carry enough variance; a variance sweep shows the
probability baseline sliding between its two limits.

Run: python3 demos/baselines_and_variance.py
"""

from lpm_shapley import GaussianLPM, Link, baseline_report, baseline_sweep

model = GaussianLPM(1.0, (1.0, 1.0), (0.0, 0.0), (2.0, 1.0))
report = baseline_report(model, Link.LOGIT)

print("Baselines for score = 1.0 + x1 + x2, deviations (2, 1), logit link:")
print(f"  score scale            : {report.phi0_eta:+.4f}")
print(f"  score pushed through G : {report.phi0_eta_transformed:.4f}")
print(f"  probability outcome    : {report.phi0_prob:.4f}")
print(f"  decision outcome       : {report.phi0_decision:.4f}")
print(f"  strict chain 0.5 < prob < decision < transformed? {report.chain_holds}")
print()

print("Variance sweep at expected score 1.0 (total feature variance V):")
print(f"{'V':>10}  {'prob':>8}  {'decision':>8}")
for row in baseline_sweep(1.0, [10.0 ** k for k in range(-4, 5)]):
    print(f"{row['variance']:>10.4g}  {row['phi0_prob']:>8.4f}  {row['phi0_decision']:>8.4f}")
print()
print("As V -> 0 the probability baseline climbs to the transformed score")
print(f"({report.phi0_eta_transformed:.4f}); as V grows both transformed baselines sink")
print("toward 1/2. Explanations with different reference points are not")
print("directly comparable across outcome readings.")
