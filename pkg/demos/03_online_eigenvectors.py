"""Tracking eigenvectors without eigendecompositions.

A full eigendecomposition of the d x d averaged MCM after every
observation costs O(d^3) each; the online tracker instead nudges q
carrier vectors by one power-type step per observation.  This script
measures the disagreement R(online, batch) between the tracked top-3
projector and the top-3 projector of an exact eigendecomposition of the
very same matrix, along a contaminated stream (d=100, 10% Student-t2).

It also shows the honest fine print.  Early heavy-tail hits leave junk
directions in the averaged matrix that fade like 1/n; when such a
direction decays past the true third eigenvalue, the *batch* top-3 span
swaps a member at some sample size, while the tracker -- whose gain has
also decayed to 1/n -- cannot chase the swap quickly.  Agreement is
therefore excellent on the scale where the averaged matrix has settled
(a few hundred to a few thousand observations here) and can degrade
afterwards before very slowly healing.  The `eigen_lag` knob (default:
one MCM update per dimension) starts the tracker only after the matrix
has taken shape, which removes the same effect at the front of the
stream.
"""

import numpy as np

from medcov import RunConfig, ScenarioConfig, convergence_curve

cfg = RunConfig(
    scenario=ScenarioConfig(d=100, delta=0.10, contamination="student_t2"),
    n=6000, q=3, replications=4, seed=0,
)
checkpoints = [100, 250, 500, 1000, 2000, 4000, 6000]

print("d=100, q=3, 10% t2 contamination, mean over 4 replications")
print("(slow part: 4 streams x 6000 updates)")
points = convergence_curve(cfg, checkpoints, eigen_lag=250)
by = {(p.series, p.checkpoint): p.mean_R for p in points}

print()
print(f"{'n':>6s} {'pca_vs_truth':>13s} {'mcm_vs_truth':>13s} "
      f"{'online_vs_truth':>16s} {'online_vs_batch':>16s}")
for c in checkpoints:
    print(f"{c:>6d} {by[('pca', c)]:>13.3f} {by[('mcm', c)]:>13.3f} "
          f"{by[('mcm_online', c)]:>16.3f} {by[('online_vs_batch', c)]:>16.3f}")

print()
print("Classical PCA never recovers (R stays far above 0.5: the Student")
print("rows own its top eigenvectors).  The MCM curves decrease, and in")
print("the settled window the online tracker sits within R ~ 0.01-0.1 of")
print("the batch decomposition it follows.  The late bump in the")
print("online_vs_batch column is the span-swap effect described above:")
print("the batch span finally sheds a decayed junk direction and jumps")
print("to the truth, and the 1/n-gain tracker cannot jump with it.")
print("Where the crossing lands is seed- and dose-dependent; rerun with")
print("delta=0 to watch the two stay glued for the whole stream.")
