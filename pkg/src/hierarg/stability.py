"""Linearized stability analysis around equilibria of the flow equation.

The linearization around a stationary solution psi is

    L[psi] zeta = -alpha zeta'' + 2 alpha psi zeta' - 2 (1 - alpha psi') zeta,

self-adjoint with respect to the weight p(x) = exp(-2 int_0^x psi):

    p L[psi] zeta = -alpha (p zeta')' - 2 p (1 - alpha psi') zeta.

The spectrum on odd periodic functions is computed from a conservation-form
finite-difference discretization on (0, pi) with Dirichlet ends (equivalent
to the odd-periodic problem), reduced to a standard symmetric tridiagonal
problem and resolved by Sturm-sequence bisection.  A second, independent
route is the comparison criterium: the solution of L[psi] phi = 0 with
phi(0) = 0, phi'(0) = 1 stays positive on (0, pi] exactly when the lowest
eigenvalue is positive.

The module also carries the descent functional

    V(v) = int_{-pi}^{pi} [(1/alpha - v') ln(1 - alpha v') + v' - v^2] dx,

nonincreasing along admissible flow trajectories, whose derivative along
the flow is dV/dt = -int_{-pi}^{pi} rho(v_x) v_t^2 dx with
rho(w) = 1/(1 - alpha w) (full-period convention, matching the domain of V,
so that finite differences of V reproduce liapunov_V_dot).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as fg
from .equilibria import EquilibriumOrbit
from .errors import (DomainError, GridSizeError, IdentityViolationError,
                     UnresolvedSpectrumError)

__all__ = [
    "OperatorMatrix", "SpectrumReport", "CriteriumResult", "IdentityReport",
    "weight_p", "assemble_L", "smallest_eigenvalues", "criterium_phi",
    "identity_checks", "liapunov_V", "liapunov_V_dot",
]


# -- weight and operator assembly ---------------------------------------------


def weight_p(psi: EquilibriumOrbit | None, n: int = fg.DEFAULT_GRID) -> fg.GridFunction:
    """Weight p(x) = exp(-2 int_0^x psi) as an even positive GridFunction."""
    if psi is None:
        return fg.GridFunction(fg.Parity.EVEN, [1.0], n=n)
    phi = fg.integrate_from_zero(psi.psi)
    return fg.transform(np.exp(-2.0 * phi.values), fg.Parity.EVEN)


@dataclass
class OperatorMatrix:
    """Generalized symmetric tridiagonal eigenproblem K x = lambda M x.

    ``diag``/``off`` hold the stiffness (conservation-form discretization of
    p L[psi] on the interior nodes of (0, pi)); ``mass`` is the diagonal
    weight p at the nodes.
    """

    n: int
    h: float
    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    alpha: float
    psi: EquilibriumOrbit | None

    def standard_form(self) -> tuple[np.ndarray, np.ndarray]:
        """Similarity-transform to an ordinary symmetric tridiagonal matrix."""
        s = 1.0 / np.sqrt(self.mass)
        d = self.diag * s * s
        e = self.off * s[:-1] * s[1:]
        return d, e

    def refined(self) -> "OperatorMatrix":
        return assemble_L(self.psi, self.alpha, 2 * self.n)


def assemble_L(psi: EquilibriumOrbit | None, alpha: float, n: int) -> OperatorMatrix:
    """Discretize p L[psi] on (0, pi), Dirichlet ends, interior nodes i*h.

    Second-order conservation form: the flux term -alpha (p zeta')' uses p at
    half nodes, the potential term -2 p (1 - alpha psi') sits on the nodes.
    For psi = None the operator reduces to -alpha zeta'' - 2 zeta whose
    eigenvalues are alpha k^2 - 2.
    """
    if n < 16:
        raise GridSizeError(f"n = {n} < 16 cannot resolve the spectrum")
    h = math.pi / n
    nodes = h * np.arange(1, n)
    halves = h * (np.arange(n) + 0.5)
    if psi is None:
        p_nodes = np.ones(n - 1)
        p_half = np.ones(n)
        dpsi = np.zeros(n - 1)
    else:
        p_nodes = psi.weight_at(nodes)
        p_half = psi.weight_at(halves)
        dpsi = psi.dpsi_at(nodes)
    diag = alpha * (p_half[:-1] + p_half[1:]) / h ** 2 \
        - 2.0 * p_nodes * (1.0 - alpha * dpsi)
    off = -alpha * p_half[1:-1] / h ** 2
    return OperatorMatrix(n=n, h=h, diag=diag, off=off, mass=p_nodes,
                          alpha=alpha, psi=psi)


# -- Sturm-sequence bisection --------------------------------------------------


def _sturm_count(d: np.ndarray, e: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift (vectorized LDL count)."""
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    count = np.zeros(shifts.shape, dtype=int)
    piv = d[0] - shifts
    tiny = 1e-290
    count += piv < 0.0
    e2 = e * e
    for i in range(1, len(d)):
        piv = np.where(np.abs(piv) < tiny, -tiny, piv)
        piv = (d[i] - shifts) - e2[i - 1] / piv
        count += piv < 0.0
    return count


def _lowest_eigenvalues(d: np.ndarray, e: np.ndarray, k: int) -> np.ndarray:
    """k lowest eigenvalues by bisection on the Sturm count."""
    radius = np.abs(d) + np.concatenate(([0.0], np.abs(e))) \
        + np.concatenate((np.abs(e), [0.0]))
    lo = np.full(k, float((d - radius).min()))
    hi = np.full(k, float((d + radius).max()))
    targets = np.arange(1, k + 1)
    for _ in range(70):
        mid = 0.5 * (lo + hi)
        c = _sturm_count(d, e, mid)
        below = c >= targets          # mid is above the target eigenvalue
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= 1e-13 * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray          # k lowest at the matrix resolution n
    eigenvalues_refined: np.ndarray  # same at 2n
    richardson: np.ndarray           # (4 lam_{2n} - lam_n) / 3
    negative_count: int
    grid_sizes: tuple[int, int]


def smallest_eigenvalues(m: OperatorMatrix, k: int) -> SpectrumReport:
    """k lowest eigenvalues with a doubled-grid consistency check.

    The count of negative eigenvalues must agree between the two grids;
    disagreement raises UnresolvedSpectrumError.
    """
    if k > 10:
        raise DomainError("k <= 10 (only the low spectrum is resolved)")
    m2 = m.refined()
    lam = _lowest_eigenvalues(*m.standard_form(), k)
    lam2 = _lowest_eigenvalues(*m2.standard_form(), k)
    neg = int(_sturm_count(*m.standard_form(), 0.0)[0])
    neg2 = int(_sturm_count(*m2.standard_form(), 0.0)[0])
    if neg != neg2:
        raise UnresolvedSpectrumError(
            f"negative count differs between n={m.n} ({neg}) and n={m2.n} ({neg2})")
    return SpectrumReport(
        eigenvalues=lam, eigenvalues_refined=lam2,
        richardson=(4.0 * lam2 - lam) / 3.0,
        negative_count=neg, grid_sizes=(m.n, m2.n))


# -- comparison criterium ------------------------------------------------------


@dataclass
class CriteriumResult:
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    first_zero: float | None
    verdict: str                      # stable | unstable | inconclusive

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x,phi\n")
            for xk, pk in zip(self.x, self.phi):
                fh.write(f"{xk:.17g},{pk:.17g}\n")


def criterium_phi(psi: EquilibriumOrbit | None, alpha: float,
                  n_steps: int = 8192) -> CriteriumResult:
    """Shoot L[psi] phi = 0, phi(0) = 0, phi'(0) = 1 across (0, pi).

    Classical RK4 with fixed step pi/n_steps; psi and psi' are sampled once
    on the half-step grid from the orbit's dense trajectory.  Verdict is
    ``stable`` iff phi > 0 on (0, pi]; the smallest sign change (linearly
    interpolated) is reported as ``first_zero``.  A trace grazing zero
    within 1e-9 of the axis without crossing is ``inconclusive``.
    """
    h = math.pi / n_steps
    xs_half = 0.5 * h * np.arange(2 * n_steps + 1)
    if psi is None:
        psi_h = np.zeros_like(xs_half)
        dpsi_h = np.zeros_like(xs_half)
    else:
        psi_h = np.asarray(psi.psi_at(xs_half), dtype=float)
        dpsi_h = np.asarray(psi.dpsi_at(xs_half), dtype=float)

    inv_a = 2.0 / alpha

    def accel(idx, phi, dphi):
        # phi'' = 2 psi phi' - (2/alpha)(1 - alpha psi') phi
        return 2.0 * psi_h[idx] * dphi - inv_a * (1.0 - alpha * dpsi_h[idx]) * phi

    phi = np.empty(n_steps + 1)
    dphi = np.empty(n_steps + 1)
    phi[0], dphi[0] = 0.0, 1.0
    y, dy = 0.0, 1.0
    for i in range(n_steps):
        i2 = 2 * i
        k1 = accel(i2, y, dy)
        k2 = accel(i2 + 1, y + 0.5 * h * dy, dy + 0.5 * h * k1)
        k3 = accel(i2 + 1, y + 0.5 * h * dy + 0.25 * h * h * k1, dy + 0.5 * h * k2)
        k4 = accel(i2 + 2, y + h * dy + 0.5 * h * h * k2, dy + h * k3)
        y, dy = (y + h * dy + h * h * (k1 + k2 + k3) / 6.0,
                 dy + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
        phi[i + 1], dphi[i + 1] = y, dy

    xs = h * np.arange(n_steps + 1)
    interior = phi[1:]
    first_zero = None
    verdict = "stable"
    neg = np.nonzero(interior <= 0.0)[0]
    if neg.size:
        i = neg[0] + 1
        if phi[i] == 0.0:
            first_zero = xs[i]
        else:
            # linear interpolation of the crossing
            x0, x1, p0, p1 = xs[i - 1], xs[i], phi[i - 1], phi[i]
            first_zero = x0 + (x1 - x0) * p0 / (p0 - p1)
        verdict = "unstable"
    elif float(interior.min()) < 1e-9:
        verdict = "inconclusive"
    return CriteriumResult(x=xs, phi=phi, dphi=dphi,
                           first_zero=first_zero, verdict=verdict)


# -- algebraic identities ------------------------------------------------------


@dataclass
class IdentityReport:
    residual_chi: float       # max |L[psi] chi - 8 c alpha^2 psi psi'^2|
    residual_dpsi: float      # max |L[psi] psi'|
    wronskian_deviation: float
    wronskian_constant: float
    c: float
    skipped: bool = False
    note: str = ""


def identity_checks(psi: EquilibriumOrbit | None, alpha: float | None = None,
                    tol: float = 1e-6) -> IdentityReport:
    """Verify the equilibrium identities on a reconstructed orbit.

    Checks, on a dense grid over (0, pi):

    * L[psi] chi = 8 c alpha^2 psi (psi')^2 for chi = c(-alpha psi'' + 4 psi),
      c normalized numerically so chi'(0) = 1;
    * L[psi] psi' = 0;
    * constancy of the Wronskian alpha p (phi' psi' - phi psi'') along the
      criterium shooting trace, whose value is alpha psi'(0).

    Higher psi-derivatives come from the phase-plane relations the orbit
    satisfies (to its verified residual), so the residuals probe the
    identities themselves.  Raises IdentityViolationError on breach.
    """
    if psi is None:
        return IdentityReport(0.0, 0.0, 0.0, 0.0, math.nan, skipped=True,
                              note="psi = 0: chi and psi' vanish identically")
    a = psi.alpha if alpha is None else alpha
    shoot = criterium_phi(psi, a)
    xs = shoot.x
    p = np.asarray(psi.psi_at(xs))
    w = np.asarray(psi.dpsi_at(xs))
    d2 = np.asarray(psi.d2psi_at(xs))
    d3 = np.asarray(psi.d3psi_at(xs))

    chi_raw = -a * d2 + 4.0 * p
    dchi_raw = -a * d3 + 4.0 * w
    # chi''_raw by the chain rule through the phase-plane derivatives
    d4 = 4.0 * p * (w - 1.0 / a) * (4.0 * w + 2.0 * p * p - 1.0 / a)
    d2chi_raw = -a * d4 + 4.0 * d2

    # numerical normalization: 4th-order one-sided derivative of chi at 0
    h = xs[1] - xs[0]
    slope0 = (-25.0 * chi_raw[0] + 48.0 * chi_raw[1] - 36.0 * chi_raw[2]
              + 16.0 * chi_raw[3] - 3.0 * chi_raw[4]) / (12.0 * h)
    c = 1.0 / slope0

    def L_of(f, df, d2f):
        return -a * d2f + 2.0 * a * p * df - 2.0 * (1.0 - a * w) * f

    r_chi = np.abs(L_of(c * chi_raw, c * dchi_raw, c * d2chi_raw)
                   - 8.0 * c * a * a * p * w * w)
    r_dpsi = np.abs(L_of(w, d2, d3))

    weight = np.asarray(psi.weight_at(xs))
    wronskian = a * weight * (shoot.dphi * w - shoot.phi * d2)
    w_const = a * psi.psi_prime0
    r_wronsk = np.abs(wronskian - w_const)

    report = IdentityReport(
        residual_chi=float(r_chi.max()),
        residual_dpsi=float(r_dpsi.max()),
        wronskian_deviation=float(r_wronsk.max()),
        wronskian_constant=w_const,
        c=c,
    )
    for name, arr in (("L[psi]chi identity", r_chi),
                      ("L[psi]psi' identity", r_dpsi),
                      ("Wronskian constancy", r_wronsk)):
        worst = int(arr.argmax())
        if arr[worst] > tol:
            raise IdentityViolationError(name, float(xs[worst]), float(arr[worst]))
    return report


# -- descent functional --------------------------------------------------------


def _sym_trapezoid(values: np.ndarray, n: int) -> float:
    """Integral over (-pi, pi) of an even-extension integrand sampled on [0, pi]."""
    h = math.pi / n
    return 2.0 * h * (0.5 * values[0] + values[1:-1].sum() + 0.5 * values[-1])


def liapunov_V(v: fg.GridFunction, alpha: float) -> float:
    """Descent functional V(v); requires alpha v' < 1 everywhere."""
    w = fg.differentiate(v).values
    aw = alpha * w
    if aw.max() >= 1.0:
        raise DomainError(
            f"alpha*v' reaches {aw.max():.6g} >= 1: outside the domain of V")
    vals = v.values
    integrand = (1.0 / alpha - w) * np.log1p(-aw) + w - vals * vals
    return _sym_trapezoid(integrand, v.n)


def liapunov_V_dot(state, alpha: float | None = None) -> float:
    """dV/dt along the flow: -int_{-pi}^{pi} rho(v_x) v_t^2 dx <= 0.

    ``state`` is a FlowState (v_t is evaluated from the flow right-hand
    side) or an odd GridFunction together with ``alpha``.
    """
    from .flow import flow_rhs  # deferred: flow depends on this module's V

    if hasattr(state, "v") and hasattr(state, "alpha"):
        v = state.v
        alpha = state.alpha if alpha is None else alpha
    else:
        v = state
        if alpha is None:
            raise DomainError("alpha is required with a bare grid function")
    w = fg.differentiate(v).values
    aw = alpha * w
    if aw.max() >= 1.0:
        raise DomainError(
            f"alpha*v_x reaches {aw.max():.6g} >= 1: outside the domain of V")
    vt = flow_rhs(v, alpha).values
    rho = 1.0 / (1.0 - aw)
    return -_sym_trapezoid(rho * vt * vt, v.n)
