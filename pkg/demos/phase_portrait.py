"""Phase portrait of the stationary system w' = 2p(w - 1/alpha), p' = w.

Closed orbits fill the region left of the straight separatrix
{(1/alpha, x/alpha)}; everything to its right escapes.  The equilibrium
profiles psi_j are the p-components of the closed orbits whose period is
2*pi/j.  Writes phase_portrait.png.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.integrate import solve_ivp

from hierarg import equilibria as eq

ALPHA = 1.0

fig, ax = plt.subplots(figsize=(8.5, 5.5))

# a fan of closed orbits, labelled by their w-axis crossing
for w0 in (0.2, 0.5, 0.8, 0.95, eq.w_hat(ALPHA, 1)):
    query = eq.OrbitQuery(ALPHA, w0)
    T = eq.period(query).T
    xs = np.linspace(0.0, T, 600)
    sol = solve_ivp(lambda x, y: [2 * y[1] * (y[0] - 1 / ALPHA), y[0]],
                    (0, T), (w0, 0.0), t_eval=xs, rtol=1e-10, atol=1e-12)
    kind = eq.classify_orbit(query).value
    ax.plot(sol.y[0], sol.y[1], lw=1.2,
            color="tab:red" if abs(w0 - eq.w_hat(ALPHA, 1)) < 1e-9 else "tab:blue")
    print(f"w0 = {w0:.6f}: {kind}, period {T:.6f}")

# the separatrix is the vertical line w = 1/alpha traversed linearly in x
p_line = np.linspace(-3.5, 3.5, 2)
ax.plot([1 / ALPHA, 1 / ALPHA], p_line, "k--", lw=1.0, label="separatrix w = 1/alpha")

# a couple of unbounded orbits on the right of the separatrix
for w0 in (1.05, 1.3):
    sol = solve_ivp(lambda x, y: [2 * y[1] * (y[0] - 1 / ALPHA), y[0]],
                    (0, 2.2), (w0, 0.0), rtol=1e-10, atol=1e-12, dense_output=True)
    xs = np.linspace(0, sol.t[-1], 400)
    w, p = sol.sol(xs)
    keep = w < 8.0
    ax.plot(w[keep], p[keep], lw=1.0, color="tab:gray")
    print(f"w0 = {w0:.2f}: {eq.classify_orbit(eq.OrbitQuery(ALPHA, w0)).value}")

ax.plot([0], [0], "k.", ms=8)  # the center
ax.set_xlabel("w = psi'")
ax.set_ylabel("p = psi")
ax.set_xlim(-8.5, 2.2)
ax.set_ylim(-3.2, 3.2)
ax.set_title(f"orbits of the stationary phase system, alpha = {ALPHA}")
ax.legend(loc="upper left")
fig.tight_layout()
fig.savefig("phase_portrait.png", dpi=150)
print("wrote phase_portrait.png")
