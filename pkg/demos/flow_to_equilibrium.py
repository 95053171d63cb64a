"""Time evolution of the flow: decay above the transition, capture below.

Above alpha = 2 every small profile relaxes to zero at rate alpha - 2.
Below, the same initial data is captured by the nontrivial equilibrium
psi_1^+, and the descent functional V decreases monotonically along the
way.  Writes flow_to_equilibrium.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hierarg import equilibria as eq
from hierarg import flow as fl
from hierarg import grid as fg
from hierarg import stability as st

x = fg.grid_points(256)
v0 = fg.transform(0.1 * np.sin(x), fg.Parity.ODD)

runs = {}
for alpha in (3.0, 1.0):
    runs[alpha] = fl.evolve(v0, alpha, 20.0, dt=1e-3, stride=200)
    print(f"alpha={alpha}: final residual {runs[alpha].final_residual:.2e}, "
          f"converged={runs[alpha].converged}")

fig, axes = plt.subplots(1, 3, figsize=(13, 4))

# profiles along the capture run
traj = runs[1.0]
for k in (0, 5, 10, 20, 40, 100):
    s = traj.states[k]
    axes[0].plot(s.v.x, s.v.values, lw=1.0, label=f"t = {s.t:g}")
psi1 = eq.reconstruct_orbit(1.0, 1, "+")
axes[0].plot(psi1.psi.x, psi1.psi.values, "k--", lw=1.2, label="psi_1+")
axes[0].set_xlabel("x")
axes[0].set_ylabel("v(t, x)")
axes[0].set_title("capture by psi_1+ at alpha = 1")
axes[0].legend(fontsize=7)

# norm decay above the transition, rate alpha - 2
traj3 = runs[3.0]
axes[1].semilogy(traj3.times(), traj3.l2_norms(), lw=1.4)
ts = traj3.times()
axes[1].semilogy(ts, 0.1 * np.sqrt(np.pi) * np.exp(-ts), "k:",
                 label="exp(-(alpha-2) t)")
axes[1].set_xlabel("t")
axes[1].set_ylabel("||v(t)||")
axes[1].set_title(f"alpha = 3: decay rate {fl.decay_rate(traj3):.4f}")
axes[1].legend()

# descent functional along both runs
for alpha, traj in runs.items():
    V = [st.liapunov_V(s.v, alpha) for s in traj.states]
    axes[2].plot(traj.times(), V, lw=1.4, label=f"alpha = {alpha:g}")
axes[2].axhline(st.liapunov_V(psi1.psi, 1.0), color="k", ls="--", lw=0.8)
axes[2].set_xlabel("t")
axes[2].set_ylabel("V(v(t))")
axes[2].set_title("descent functional is monotone")
axes[2].legend()

fig.tight_layout()
fig.savefig("flow_to_equilibrium.png", dpi=150)
print("wrote flow_to_equilibrium.png")
print(f"H1 distance of the alpha=1 endpoint to psi_1+: "
      f"{fg.norm(traj.final.v - psi1.psi, fg.NormKind.H1):.2e}")
