# Does the estimator reach the Cramér-Rao bound?
#
# Repeat the estimate on many independent batches and compare its variance
# with 1 / (n F).  A var_ratio of 1 means the bound is saturated.  Takes a
# few seconds with the reduced repetition count below; the full study uses
# reps=1000 (see `hom-superres study`).

# %%
from hom_superres import GaussianWavepacket, Scene, run_study

wp = GaussianWavepacket(1.0)

for mult in (0.5, 2.0):
    report = run_study(Scene(mult * wp.sigma_x, wp), [250, 1000, 4000], reps=100, seed=7)
    print(f"dx = {mult} sigma_x")
    for row in report.rows:
        print(
            f"  n={row.n:5d}  var_ratio {row.var_ratio:.3f} +- {report.var_ratio_se(row):.3f}"
            f"  mean_ratio {row.mean_ratio:.4f} +- {report.mean_ratio_se(row):.4f}"
        )
