"""
The delta dial: trading coverage for select accuracy
====================================================

delta is the significance level of the randomness test that gates every
candidate reject region: a region is admitted only while its count of
correct predictions is not significantly above coin-flip level at that
significance.  Raising delta excludes a larger upper tail, so the test gets
stricter, the viable reject regions shrink, and coverage climbs while select
accuracy drifts back toward the base accuracy.  This demo sweeps delta on
one dataset and prints the resulting frontier.
"""

import rejopt

# synthetic6: two heavily overlapping Gaussians sampled 2:1.  The Bayes
# classifier tops out around 71% here, which leaves plenty for rejection.
data = rejopt.generate(rejopt.preset("synthetic6", seed=3))
val, test = data.val, data.test
cal = rejopt.fit_per_class_temperature(val)

base_acc = rejopt.accuracy(test)
print(f"base accuracy (no rejection): {base_acc:.4f}\n")

print("delta   coverage  select-acc  reject-acc  rejected(k/n)")
rows = []
for delta in (0.001, 0.01, 0.05, 0.1, 0.25, 0.5):
    tv = rejopt.learn_thresholds(val, cal, delta, rejopt.ViabilityMethod.BCDF)
    rep = rejopt.evaluate(test, tv)
    t = rep.reject_tally
    print(f"{delta:<7g} {rep.coverage:8.4f}  {rep.select_accuracy:10.4f}"
          f"  {rep.reject_accuracy:10.4f}  {t.k}/{t.n}")
    rows.append((delta, rep))

# Dominance on the validation split is exact by construction: every region
# viable at a large delta is also viable at a smaller one, so shrinking delta
# can only improve the optimum.  On the test split the ordering holds up to
# sampling noise.
val_sa = []
for delta in (0.001, 0.01, 0.05, 0.1, 0.25, 0.5):
    tv = rejopt.learn_thresholds(val, cal, delta, rejopt.ViabilityMethod.BCDF)
    val_sa.append(rejopt.evaluate(val, tv).select_accuracy)
ordered = all(a >= b - 1e-12 for a, b in zip(val_sa, val_sa[1:]))
print(f"\nvalidation select accuracy is non-increasing in delta: {ordered}")

# The reject-accuracy column hovers near or below one half: the randomness
# test admits a region only while a fair coin remains a plausible account of
# its correct-prediction count on the validation split.
