"""Classical PCA vs the median covariation matrix under contamination.

Draws Brownian-path Gaussian samples (d=50, n=200), replaces a fraction
delta of the rows with heavy-tailed Student noise, and scores the top-2
eigenspace of each estimator against the truth.  The eigenspace error is
bounded by 2q = 4; values near 4 mean the estimated subspace is
essentially orthogonal to the real one.

Run:  python3 demos/01_contamination_breakdown.py
"""

import time

from medcov import RunConfig, ScenarioConfig, run_benchmark

D, N, Q = 50, 200, 2
REPS = 25  # enough to see the effect; the test suite runs 100

print(f"Monte Carlo: d={D}, n={N}, q={Q}, {REPS} replications per cell")
print()
print(f"{'scenario':<22s} {'delta':>5s} {'pca':>8s} {'mcm_w':>8s} "
      f"{'mcm_r':>8s} {'mcm_rplus':>9s}")

start = time.time()
for delta, law in [(0.0, "none"),
                   (0.05, "student_t1"),
                   (0.10, "student_t1"),
                   (0.10, "student_t2"),
                   (0.20, "student_t2")]:
    cfg = RunConfig(
        scenario=ScenarioConfig(d=D, delta=delta, contamination=law),
        n=N, q=Q, replications=REPS, seed=0,
    )
    med = {row.estimator: row.median_R for row in run_benchmark(cfg)}
    print(f"{law:<22s} {delta:>5.2f} {med['pca']:>8.4f} {med['mcm_w']:>8.4f} "
          f"{med['mcm_r']:>8.4f} {med['mcm_rplus']:>9.4f}")

print()
print(f"done in {time.time() - start:.1f}s")
print("Reading the table: a 10% dose of t1 noise pushes classical PCA's")
print("median error from ~0.02 to ~3.8 (out of a max of 4) while every")
print("median-covariation variant stays below 0.05.  The robust medians")
print("barely move between delta=0 and delta=0.20.")
