"""
Quickstart: learn where a classifier should say "I don't know"
==============================================================

Generate a synthetic 2-D dataset, calibrate the scores, learn per-class
rejection thresholds, and evaluate the selective classifier.

Run from the repository root:

    python3 demos/01_quickstart.py
"""

import rejopt

# synthetic4: four unit squares on a 2x2 grid that all overlap in a shared
# central region.  Inside the overlap every class is equally likely, so the
# best possible classifier is right only 25% of the time there.  That is
# exactly the kind of region a selective classifier should hand back.
spec = rejopt.preset("synthetic4", seed=13)
data = rejopt.generate(spec)
val, test = data.val, data.test

print(f"dataset: {spec.name}, {len(val)} val rows, "
      f"{len(test)} test rows, {val.class_count} classes")

# Step 1: per-class temperature scaling on the validation split.  The synthetic
# scores are already exact Bayes logits, so the fitted temperatures stay at 1.
cal = rejopt.fit_per_class_temperature(val)
print("temperatures:", [round(t, 3) for t in cal.temperatures])

# Step 2: learn one threshold per predicted class.  A candidate threshold is
# viable only when the examples it would reject look at most random: the
# count of correct predictions among the rejected is small enough that a fair
# coin is a plausible explanation (exact binomial test at level delta).
tv = rejopt.learn_thresholds(val, cal, delta=0.05, method=rejopt.ViabilityMethod.BCDF)
print("thresholds:", [round(t, 4) for t in tv.thresholds])

# Step 3: apply to the held-out test split.  The preset carries an ideal-mask
# column marking rows inside the equal-density overlap, which lets the report
# score how well the learned rejections line up with the truly ambiguous rows.
report = rejopt.evaluate(test, tv, ideal_mask=data.test_mask)

print()
print(f"plain accuracy      {report.accuracy:7.4f}")
print(f"coverage            {report.coverage:7.4f}   (fraction kept)")
print(f"select accuracy     {report.select_accuracy:7.4f}   (accuracy on kept rows)")
print(f"reject accuracy     {report.reject_accuracy:7.4f}   (accuracy on dropped rows)")
print(f"ideal agreement     {report.ida:7.4f}   (rejections inside the overlap)")

# The reject region really is coin-flip territory: the pooled tally (n dropped,
# k of them would have been right) stays within the binomial bound.
n, k = report.reject_tally.n, report.reject_tally.k
print(f"\nreject tally: {k} correct of {n} rejected "
      f"(binomial CDF {rejopt.binom_cdf(k, n, 0.5):.4f})")

# Per-class breakdown.  Every class keeps most of its mass; the drops are
# concentrated where the squares overlap.
print("\nclass  kept-frac  select-acc  rejected")
for row in report.per_class:
    print(f"{row.class_index:5d}  {row.coverage:9.4f}  {row.select_accuracy:10.4f}"
          f"  {row.reject_tally.n:8d}")
