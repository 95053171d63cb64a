"""Branch diagram of the equilibrium family.

Each branch j lives on 0 < alpha < 2/j^2 and its start value what_j(alpha)
decreases from the separatrix value 1/alpha down to 0 at the threshold,
where it merges with the trivial solution.  The j = 1 branch hugs the
Debye-Hueckel value 1/alpha extremely fast as alpha decreases: the exactly
computed gap 1/alpha - what_1 falls below double-precision spacing already
near alpha ~ 0.27, which is why it is tabulated separately.
Writes bifurcation_diagram.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hierarg import equilibria as eq

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.4))

for j, color in ((1, "tab:blue"), (2, "tab:orange"), (3, "tab:green")):
    threshold = 2.0 / j ** 2
    alphas = np.linspace(0.02, threshold - 1e-6, 160)
    branch = [eq.w_hat(float(a), j) for a in alphas]
    ax1.plot(alphas, branch, color=color, lw=1.4, label=f"j = {j}")
    ax1.axvline(threshold, color=color, ls=":", lw=0.8)
    print(f"branch j={j}: threshold alpha = {threshold:.4f}, "
          f"what({alphas[60]:.3f}) = {branch[60]:.6f}")

alphas = np.linspace(0.02, 1.99, 200)
ax1.plot(alphas, 1.0 / alphas, "k--", lw=1.0, label="1/alpha (separatrix)")
ax1.set_ylim(0, 12)
ax1.set_xlabel("alpha")
ax1.set_ylabel("branch start value  what_j")
ax1.set_title("equilibrium branches and their thresholds 2/j^2")
ax1.legend()

# the exactly computed separation from the separatrix for j = 1
alphas = np.linspace(0.05, 1.95, 150)
gaps = [eq.separatrix_gap(float(a), 1) for a in alphas]
ax2.semilogy(alphas, gaps, lw=1.4)
ax2.axhline(2.2e-16, color="k", ls=":", lw=0.8)
ax2.text(1.0, 4e-16, "double-precision epsilon", fontsize=8)
ax2.set_xlabel("alpha")
ax2.set_ylabel("1/alpha - what_1  (exact)")
ax2.set_title("how fast the stable branch approaches the separatrix")

fig.tight_layout()
fig.savefig("bifurcation_diagram.png", dpi=150)
print("wrote bifurcation_diagram.png")
print(f"gap at alpha=1.0: {eq.separatrix_gap(1.0, 1):.6e}")
print(f"gap at alpha=0.5: {eq.separatrix_gap(0.5, 1):.6e}")
print(f"gap at alpha=0.15: {eq.separatrix_gap(0.15, 1):.6e}")
