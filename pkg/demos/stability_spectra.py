"""Stability of the equilibrium branches through two independent lenses.

For each branch the low spectrum of the weighted linearization is computed
by Sturm bisection, and in parallel the comparison criterium shoots the
zero-energy solution across (0, pi): the branch is stable exactly when the
trace stays positive.  The count of negative eigenvalues of psi_j^+ is
j - 1, the dimension of its unstable manifold.
Writes stability_spectra.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hierarg import equilibria as eq
from hierarg import stability as st

ALPHA = 0.15  # all three branches exist: 2/16 <= alpha < 2/9

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.4))

for j, color in ((1, "tab:blue"), (2, "tab:orange"), (3, "tab:green")):
    orbit = eq.reconstruct_orbit(ALPHA, j, "+")
    report = st.smallest_eigenvalues(st.assemble_L(orbit, ALPHA, 512), 4)
    shot = st.criterium_phi(orbit, ALPHA)
    ax1.plot(np.full(4, j), report.richardson, "o", color=color, ms=5)
    ax2.plot(shot.x, shot.phi, color=color, lw=1.3,
             label=f"j = {j} ({shot.verdict})")
    print(f"j = {j}: negative eigenvalues {report.negative_count} "
          f"(unstable manifold dim {j - 1}), criterium {shot.verdict}, "
          f"lowest eigenvalues {np.round(report.richardson[:3], 4)}")

ax1.axhline(0.0, color="k", lw=0.8)
ax1.set_xticks([1, 2, 3])
ax1.set_xlabel("branch j")
ax1.set_ylabel("lowest eigenvalues of the linearization")
ax1.set_title(f"spectra at alpha = {ALPHA}")

ax2.axhline(0.0, color="k", lw=0.8)
ax2.set_xlabel("x")
ax2.set_ylabel("criterium trace phi(x)")
ax2.set_title("shooting test: a zero in (0, pi) means instability")
ax2.legend()

fig.tight_layout()
fig.savefig("stability_spectra.png", dpi=150)
print("wrote stability_spectra.png")
