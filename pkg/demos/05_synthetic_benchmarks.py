"""
Synthetic benchmarks: approximation ratios and runtime
======================================================

Small versions of the benchmark experiments. The acceptance suite runs the
full-size ones (``pytest tests/test_acceptance.py``); the command line
exposes them as ``classcontrast bench ratio`` and ``classcontrast bench time``.

Run from the repository root::

    python demos/05_synthetic_benchmarks.py
"""

from classcontrast.synthbench import ratio_experiment, runtime_bench

###############################################################################
# Ratios against the brute-force optimum for a few small ``d``, 5 random
# instances each. Top-k only ever assigns ``2k`` attributes, so its ratio
# drops as ``d`` grows, faster for small ``k``.

rows = ratio_experiment([6, 10, 14], ["swa", "simplified", "top3", "top5"], repetitions=5, seed=0)
print(f"{'d':>4s} {'algo':>10s} {'mean':>7s} {'min':>7s}")
for r in rows:
    print(f"{r['d']:4d} {r['algo']:>10s} {r['mean_ratio']:7.4f} {r['min_ratio']:7.4f}")

###############################################################################
# Past brute-force range the reference is the best value any solver reached
# on that instance.

for r in ratio_experiment([200], ["swa", "simplified", "top20"], repetitions=2, seed=0):
    print(f"d=200 {r['algo']:>10s} ratio to best {r['mean_ratio']:.4f}")

###############################################################################
# Runtime as ``d`` doubles. Simplified and the one-pass greedy grow roughly
# linearly; SWA costs about ``steps * samples`` times more.

t = runtime_bench([125, 250, 500], ["simplified", "greedy"], repeats=3)
for r in t:
    print(f"d={r['d']:4d} {r['algo']:>10s} {r['seconds'] * 1000:8.2f} ms")
