# How much does one detected pair say about the separation?
#
# With momentum-resolving cameras the information per pair is sigma_k^2 / 2
# whatever the separation.  A bucket detector that only records the output
# port reaches the same value for tiny separations and loses it as the
# sources move apart.

# %%
import numpy as np

from hom_superres import GaussianWavepacket, Scene, crb, fisher_aligned, fisher_bucket, fisher_matrix

wp = GaussianWavepacket(1.0)
print("resolved information:", fisher_aligned(wp))

# %%
print(" dx/sigma_x   resolved   bucket   sd bound (n=2000)")
for mult in (0.001, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
    scene = Scene(mult * wp.sigma_x, wp)
    f = fisher_matrix(scene).f11
    fb = fisher_bucket(scene)
    print(f"{mult:10.3f}   {f:.6f}   {fb:.6f}   {np.sqrt(crb(f, 2000)):.4f}")

# %%
# If the reference point x0 misses the centroid, the separation and the
# centroid become entangled in the data and the separation information drops.

for m in (0.0, 0.1, 0.5, 1.0):
    fm = fisher_matrix(Scene(1.0, wp, x0=m))
    print(f"x0 - x_s = {m:3.1f}   f11 = {fm.f11:.4f}   f12 = {fm.f12:+.4f}   f22 = {fm.f22:.4f}")
