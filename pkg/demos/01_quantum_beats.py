# Quantum beats in the two-photon outcome distribution
#
# Two point sources a distance dx apart each emit one photon.  The photons
# meet on a balanced beam splitter and a camera on each output records the
# transverse momentum.  The outcome is the momentum difference dK and
# whether both photons left through the same port (B, bunched) or not
# (A, antibunched).

# %%
import numpy as np

from hom_superres import GaussianWavepacket, Scene, Tag, aligned_density, bucket_probability

wp = GaussianWavepacket(sigma_k=1.0)
print("sigma_x =", wp.sigma_x)

# %%
# With the sources on top of each other the photons are indistinguishable
# and never antibunch.

overlap = Scene(0.0, wp)
dk = np.linspace(-4, 4, 9)
print("P(dK, A) at dx = 0:", aligned_density(overlap, dk, Tag.A))

# %%
# Separating the sources modulates the envelope with a beat of period
# 4 pi / dx.  At dx = 4 the bunching density vanishes at odd multiples of
# pi / 2.

scene = Scene(4.0, wp)
for k in (0.0, np.pi / 2, np.pi, 3 * np.pi / 2):
    pb = aligned_density(scene, k, Tag.B)
    pa = aligned_density(scene, k, Tag.A)
    print(f"dK = {k:5.3f}   P(B) = {pb:.3e}   P(A) = {pa:.3e}   sum = {pb + pa:.3e}")

# %%
# Summing over dK leaves only the port information.  For well-separated
# sources the photons become distinguishable and B and A are equally likely.

for dx in (0.0, 0.5, 1.0, 2.0, 4.0, 10.0):
    print(f"dx = {dx:4.1f}   P(B) = {bucket_probability(Scene(dx, wp), Tag.B):.4f}")
