"""
Five ways to test a reject region for randomness
================================================

The learner accepts a candidate reject region only if its tally (n rejected,
k of them correct) is statistically compatible with a fair coin.  The exact
route evaluates the binomial CDF directly; the other four compute a lower
confidence bound on the region's true correct-rate and ask whether it still
reaches one half.

This demo shows the bounds side by side on raw tallies, then confirms that
the two conservative intervals reproduce the exact test's thresholds when
learning on real data.
"""

import rejopt
from rejopt import ViabilityMethod as VM

DELTA = 0.05
METHODS = [VM.BCDF, VM.CLOPPER_PEARSON, VM.WILSON_CC, VM.WILSON_NOCC, VM.AGRESTI_COULL]

# Part 1: raw tallies.  For each (n, k) print the lower bound each interval
# assigns to the region's correct-rate, and the verdict (viable = the bound
# does not rule out chance).
print(f"lower confidence bounds at delta={DELTA}")
print(f"{'n':>5} {'k':>4} | " + " ".join(f"{m.value:>16}" for m in METHODS[1:]) + "  exact-CDF")
TALLIES = [(5, 4), (10, 5), (10, 8), (40, 20), (40, 26), (200, 100), (200, 117)]
for n, k in TALLIES:
    bounds = [rejopt.ci_lower_bound(rejopt.RegionTally(n, k), DELTA, m) for m in METHODS[1:]]
    cdf = rejopt.binom_cdf(k, n, 0.5)
    print(f"{n:>5} {k:>4} | " + " ".join(f"{b:>16.6f}" for b in bounds) + f"  {cdf:.6f}")

# Note the 4-of-5 tally: the exact test and both conservative intervals veto
# it, while the normal-approximation bounds still let it through.
print("\nverdicts (True = region may stand):")
print(f"{'n':>5} {'k':>4} | " + " ".join(f"{m.value:>16}" for m in METHODS))
for n, k in TALLIES:
    verdicts = [rejopt.region_viable(rejopt.RegionTally(n, k), DELTA, m) for m in METHODS]
    print(f"{n:>5} {k:>4} | " + " ".join(f"{str(v):>16}" for v in verdicts))

# Part 2: learned thresholds.  The Clopper-Pearson and continuity-corrected
# Wilson bounds invert the same tail as the exact test, so at delta=0.05 they
# land on identical thresholds.  The uncorrected Wilson and Agresti-Coull
# approximations run a little loose and may admit slightly larger regions.
data = rejopt.generate(rejopt.preset("synthetic7", seed=1))
cal = rejopt.fit_per_class_temperature(data.val)

print("\nlearned thresholds on synthetic7 (4:2:1 Gaussians), delta=0.05")
ref = rejopt.learn_thresholds(data.val, cal, DELTA, VM.BCDF)
for m in METHODS:
    tv = rejopt.learn_thresholds(data.val, cal, DELTA, m)
    tag = "== exact" if tv.thresholds == ref.thresholds else "differs"
    print(f"{m.value:>16}: {[round(t, 4) for t in tv.thresholds]}  {tag}")
