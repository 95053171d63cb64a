"""Stationary solutions of the flow equation via the phase-plane system.

Equilibria are odd 2*pi-periodic solutions of

    alpha * (psi'' - 2 psi psi') + 2 psi = 0,

equivalently orbits of the planar system w' = 2 p (w - 1/alpha), p' = w with
p = psi, w = psi'.  The substitution q = ln(1 - alpha*w) together with the
rescaling xbar = x/sqrt(alpha), pbar = sqrt(alpha)*p turns every orbit into a
level set of the Hamiltonian

    H(q, pbar) = pbar**2 + v(q),        v(q) = exp(q) - q - 1,

so the period obeys T(alpha, w0) = sqrt(alpha) * Ttilde(E) with

    Ttilde(E) = int_{q-}^{q+} dq / sqrt(E - v(q)),
    E = -alpha*w0 - ln(1 - alpha*w0).

Ttilde is evaluated by tanh-sinh quadrature split at q = 0 (the integrand has
inverse-square-root singularities at the turning points q-(E) < 0 < q+(E));
it is strictly increasing in E (Chicone's criterion, see
:func:`chicone_check`), so the branch energies solving Ttilde = 2*pi/(j
sqrt(alpha)) are unique and found by bisection.

All internal root finding and orbit integration is performed in the
(E, q)-parameterization: near small alpha the branch start value
what_j approaches 1/alpha to within exp(q-) / alpha, a separation far below
the double-precision spacing of 1/alpha itself, while q- stays O(E).  The
exactly computed gap is therefore reported separately
(:func:`separatrix_gap`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import grid as fg
from .errors import (AccuracyError, DomainError, NoBranchError,
                     PropertyViolationError, UnboundedOrbitError)
from .quadrature import tanh_sinh

__all__ = [
    "OrbitQuery", "PeriodResult", "EquilibriumOrbit", "OrbitClass",
    "potential_v", "energy_from_w0", "turning_points", "period",
    "period_from_energy", "branch_energy", "w_hat", "separatrix_gap",
    "reconstruct_orbit", "classify_orbit", "chicone_check", "chicone_g",
    "linear_period",
]


# -- scalar building blocks ---------------------------------------------------


def potential_v(q):
    """Potential v(q) = exp(q) - q - 1; convex, zero only at q = 0."""
    q = np.asarray(q, dtype=float)
    out = np.expm1(q) - q
    return float(out) if out.shape == () else out


def energy_from_w0(alpha: float, w0: float) -> float:
    """Orbit energy E = -alpha*w0 - ln(1 - alpha*w0); requires alpha*w0 < 1."""
    s = alpha * w0
    if s >= 1.0:
        raise DomainError(f"alpha*w0 = {s:.6g} >= 1: unbounded orbit")
    return -s - math.log1p(-s)


def linear_period(alpha: float) -> float:
    """Period 2*pi*sqrt(alpha/2) of the linearized orbit around the origin."""
    return 2.0 * math.pi * math.sqrt(alpha / 2.0)


def _solve_v_equals(E: float, lo: float, hi: float) -> float:
    """Bisection plus Newton polish for v(q) = E on a bracketing [lo, hi]."""
    flo = potential_v(lo) - E
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = potential_v(mid) - E
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-13 * (1.0 + abs(mid)):
            break
    q = 0.5 * (lo + hi)
    for _ in range(6):
        f = potential_v(q) - E
        df = math.expm1(q)
        if df == 0.0:
            break
        step = f / df
        q -= step
        if abs(step) <= 1e-16 * (1.0 + abs(q)):
            break
    return q


def turning_points(E: float) -> tuple[float, float]:
    """Roots q- < 0 < q+ of v(q) = E, located to ~1e-14 relative.

    E <= 0 is degenerate: both roots collapse to the origin.
    """
    if E <= 0.0:
        return 0.0, 0.0
    hi = 1.0
    while potential_v(hi) < E:
        hi *= 2.0
    q_plus = _solve_v_equals(E, 0.0, hi)
    lo = -(E + 2.0)
    q_minus = _solve_v_equals(E, lo, 0.0)
    return q_minus, q_plus


# -- period function ----------------------------------------------------------


def _energy_minus_v_left(q_minus: float, d):
    """E - v(q) for q = q_minus + d, cancellation-free near the turning point."""
    small = d < 0.5
    out = np.empty_like(d)
    out[small] = d[small] - math.exp(q_minus) * np.expm1(d[small])
    big = ~small
    out[big] = d[big] - (np.exp(q_minus + d[big]) - math.exp(q_minus))
    return out


def _energy_minus_v_right(q_plus: float, d):
    """E - v(q) for q = q_plus - d, cancellation-free near the turning point."""
    small = d < 0.5
    out = np.empty_like(d)
    out[small] = math.exp(q_plus) * (-np.expm1(-d[small])) - d[small]
    big = ~small
    out[big] = (math.exp(q_plus) - np.exp(q_plus - d[big])) - d[big]
    return out


def period_from_energy(E: float, *, rtol: float = 1e-13) -> tuple[float, float]:
    """Return (Ttilde(E), quadrature error estimate) for E > 0.

    The integral is split at q = 0 and each half is integrated by tanh-sinh
    quadrature with the integrand written in turning-point distances, so the
    endpoint inverse square roots are exact to rounding.
    """
    if E <= 0.0:
        raise DomainError("period_from_energy requires E > 0")
    q_minus, q_plus = turning_points(E)

    def f_left(q, d_lo, d_hi):
        return 1.0 / np.sqrt(np.maximum(_energy_minus_v_left(q_minus, d_lo), 0.0) + 1e-300)

    def f_right(q, d_lo, d_hi):
        return 1.0 / np.sqrt(np.maximum(_energy_minus_v_right(q_plus, d_hi), 0.0) + 1e-300)

    left, el = tanh_sinh(f_left, q_minus, 0.0, rtol=rtol)
    right, er = tanh_sinh(f_right, 0.0, q_plus, rtol=rtol)
    return left + right, el + er


@dataclass(frozen=True)
class OrbitQuery:
    """Orbit label: parameter alpha and the w-axis starting value w0."""
    alpha: float
    w0: float


@dataclass(frozen=True)
class PeriodResult:
    T: float
    E: float
    q_minus: float
    q_plus: float
    quadrature_error: float
    is_limit: bool = False  # w0 = 0: linearized period reported as a limit


def period(query: OrbitQuery) -> PeriodResult:
    """Period T(alpha, w0) = sqrt(alpha) * Ttilde(E) of a closed orbit.

    w0 = 0 returns the linearized period 2*pi*sqrt(alpha/2) tagged as a
    limit value; alpha*w0 >= 1 is an unbounded orbit.
    """
    alpha, w0 = query.alpha, query.w0
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    if alpha * w0 >= 1.0:
        raise UnboundedOrbitError(
            f"alpha*w0 = {alpha * w0:.6g} >= 1: orbit is not closed")
    if w0 == 0.0:
        return PeriodResult(linear_period(alpha), 0.0, 0.0, 0.0, 0.0, is_limit=True)
    E = energy_from_w0(alpha, w0)
    ttilde, err = period_from_energy(E)
    qm, qp = turning_points(E)
    return PeriodResult(math.sqrt(alpha) * ttilde, E, qm, qp,
                        math.sqrt(alpha) * err)


# -- branch functions ---------------------------------------------------------


def branch_energy(alpha: float, j: int) -> float:
    """Energy of the j-winding branch: the root of Ttilde(E) = 2*pi/(j*sqrt(alpha)).

    Exists iff alpha < 2/j**2 (at threshold the target equals the linearized
    period and the branch collapses into the origin).
    """
    if j < 1:
        raise DomainError("winding number j must be a positive integer")
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    if alpha >= 2.0 / j ** 2:
        raise NoBranchError(
            f"no branch: alpha = {alpha:.6g} >= 2/j^2 = {2.0 / j**2:.6g} for j = {j}")
    target = 2.0 * math.pi / (j * math.sqrt(alpha))
    lo, f_lo = 0.0, math.pi * math.sqrt(2.0) - target  # Ttilde(0+) = pi*sqrt(2)
    hi = 1.0
    while period_from_energy(hi)[0] < target:
        lo = hi
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if period_from_energy(mid)[0] < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(hi, 1e-8):
            break
    return 0.5 * (lo + hi)


def w_hat(alpha: float, j: int) -> float:
    """Branch start value: the unique root of T(alpha, w0) = 2*pi/j in w0.

    Monotonicity of the period in w0 makes the root unique on (0, 1/alpha).
    Note that what_j(alpha) approaches 1/alpha so fast as alpha decreases
    that the difference underflows double spacing below alpha ~ 0.27; use
    :func:`separatrix_gap` for the exact separation.
    """
    E = branch_energy(alpha, j)
    q_minus, _ = turning_points(E)
    return -math.expm1(q_minus) / alpha


def separatrix_gap(alpha: float, j: int) -> float:
    """Exact separation 1/alpha - what_j(alpha) = exp(q-)/alpha (> 0 always)."""
    E = branch_energy(alpha, j)
    q_minus, _ = turning_points(E)
    return math.exp(q_minus) / alpha


# -- orbit classification -----------------------------------------------------


class OrbitClass(str, enum.Enum):
    POINT = "point"          # w0 = 0: the critical point {(0, 0)}
    CLOSED = "closed"
    SEPARATRIX = "separatrix"
    UNBOUNDED = "unbounded"


def classify_orbit(query: OrbitQuery) -> OrbitClass:
    """Closed iff alpha*w0 < 1, separatrix at alpha*w0 = 1 (within 1e-14)."""
    if query.w0 == 0.0:
        return OrbitClass.POINT
    s = query.alpha * query.w0
    if abs(s - 1.0) <= 1e-14:
        return OrbitClass.SEPARATRIX
    return OrbitClass.CLOSED if s < 1.0 else OrbitClass.UNBOUNDED


# -- orbit reconstruction -----------------------------------------------------


@dataclass
class EquilibriumOrbit:
    """A reconstructed stationary solution psi_j^{+/-} with dense evaluators.

    ``psi``/``psi_prime`` are spectral projections onto the standard grid;
    the dense Hamiltonian trajectory (DOP853 with free interpolant) backs
    the *_at evaluators used by the stability machinery.
    """

    alpha: float
    j: int
    sign: str
    w0: float                 # what_j(alpha), positive for both sign branches
    energy: float
    period: float             # fundamental period 2*pi/j
    psi: fg.GridFunction
    psi_prime: fg.GridFunction
    psi_prime0: float         # signed initial slope psi'(0)
    h2_residual: float        # max orbit-equation residual over dense samples
    energy_drift: float       # max |H - E| over dense samples
    closure_error: float
    stationary_residual: float  # L2 norm of alpha(psi''-2 psi psi') + 2 psi
    _sol: object = field(repr=False, default=None)

    # dense evaluators (periodic continuation); x is scalar or array ---------

    def _qp(self, x):
        xbar = (np.asarray(x, dtype=float) % (2.0 * math.pi)) / math.sqrt(self.alpha)
        q, pbar = self._sol(xbar)[:2]
        return q, pbar

    def psi_at(self, x):
        q, pbar = self._qp(x)
        return pbar / math.sqrt(self.alpha)

    def dpsi_at(self, x):
        q, _ = self._qp(x)
        return -np.expm1(q) / self.alpha

    def d2psi_at(self, x):
        # from the stationary equation: psi'' = 2 psi psi' - 2 psi / alpha
        p = self.psi_at(x)
        w = self.dpsi_at(x)
        return 2.0 * p * (w - 1.0 / self.alpha)

    def d3psi_at(self, x):
        p = self.psi_at(x)
        w = self.dpsi_at(x)
        return 2.0 * (w - 1.0 / self.alpha) * (w + 2.0 * p * p)

    def phi_at(self, x):
        """Effective potential phi(x) = int_0^x psi; even, phi(0) = 0."""
        x = np.asarray(x, dtype=float)
        wraps = np.floor(x / (2.0 * math.pi))
        xbar = (x % (2.0 * math.pi)) / math.sqrt(self.alpha)
        body = self._sol(xbar)[2]
        period_integral = self._sol(2.0 * math.pi / math.sqrt(self.alpha))[2]
        return body + wraps * period_integral

    def weight_at(self, x):
        """Sturm-Liouville weight p(x) = exp(-2 * phi(x))."""
        return np.exp(-2.0 * self.phi_at(x))


def _auto_grid(psi_values_fn, n0: int) -> int:
    """Smallest standard grid on which the sine tail of psi is negligible."""
    n = n0
    while n <= 2048:
        gf = fg.transform(psi_values_fn(n), fg.Parity.ODD)
        tail = np.abs(gf.coeffs[-8:]).max()
        scale = np.abs(gf.coeffs).max()
        if tail <= 1e-10 * max(scale, 1e-30):
            return n
        n *= 2
    return 2048


def reconstruct_orbit(alpha: float, j: int, sign: str = "+",
                      n_grid: int | None = None) -> EquilibriumOrbit:
    """Integrate the Hamiltonian system on the branch energy level.

    The '+' branch starts at the left turning point (q-, 0), i.e. at
    (w, p) = (what_j, 0); the '-' branch starts at the right turning point,
    the opposite w-axis crossing of the same energy level, so that
    psi'(0) < 0.  Verifies energy drift (the orbit-equation residual in the
    log coordinate), closure after one fundamental period, and the spectral
    stationary-equation residual; raises AccuracyError on breach.
    """
    if sign not in ("+", "-"):
        raise DomainError("sign must be '+' or '-'")
    E = branch_energy(alpha, j)
    q_minus, q_plus = turning_points(E)
    q0 = q_minus if sign == "+" else q_plus
    sqrt_a = math.sqrt(alpha)
    x_end = 2.0 * math.pi / sqrt_a

    def rhs(x, y):
        q, pbar, _ = y
        return (2.0 * pbar, -np.expm1(q), pbar)

    sol = None
    drift = np.inf
    for rtol in (1e-12, 1e-13):
        res = solve_ivp(rhs, (0.0, x_end), (q0, 0.0, 0.0), method="DOP853",
                        rtol=rtol, atol=1e-14, dense_output=True)
        if not res.success:
            raise AccuracyError(f"orbit integration failed: {res.message}")
        sol = res.sol
        xs = np.linspace(0.0, x_end, 8192 * j + 1)
        q, pbar, _ = sol(xs)
        hh = pbar * pbar + potential_v(q)
        drift = float(np.abs(hh - E).max())
        if drift < 1e-11:
            break
    h2_residual = drift / alpha  # identical residual in the (w, p) chart
    worst = float(np.abs(hh - E).argmax())
    if h2_residual > 1e-8:
        raise AccuracyError(
            f"orbit-equation residual {h2_residual:.3e} > 1e-8 "
            f"(worst sample index {int(worst)})")

    # closure after one fundamental period
    qf, pf, _ = sol(x_end / j)
    closure = max(abs(pf) / sqrt_a, abs(qf - q0))
    if closure > 1e-8:
        raise AccuracyError(f"orbit closure error {closure:.3e} > 1e-8")

    def psi_values(n):
        xbar = fg.grid_points(n) / sqrt_a
        return sol(xbar)[1] / sqrt_a

    n = n_grid if n_grid is not None else _auto_grid(psi_values, fg.DEFAULT_GRID)
    xbar = fg.grid_points(n) / sqrt_a
    q, pbar, _ = sol(xbar)
    psi = fg.transform(pbar / sqrt_a, fg.Parity.ODD)
    psi_prime = fg.transform(-np.expm1(q) / alpha, fg.Parity.EVEN)

    resid = _stationary_residual(psi, alpha)
    orbit = EquilibriumOrbit(
        alpha=alpha, j=j, sign=sign,
        w0=-math.expm1(q_minus) / alpha,
        energy=E, period=2.0 * math.pi / j,
        psi=psi, psi_prime=psi_prime,
        psi_prime0=-math.expm1(q0) / alpha,
        h2_residual=h2_residual, energy_drift=drift,
        closure_error=closure, stationary_residual=resid,
        _sol=sol,
    )
    return orbit


def _stationary_residual(psi: fg.GridFunction, alpha: float) -> float:
    """L2 norm of alpha*(psi'' - 2 psi psi') + 2 psi on the spectral grid."""
    dpsi = fg.differentiate(psi)
    d2psi = fg.differentiate(dpsi)
    prod = fg.multiply(psi, dpsi)
    resid = alpha * (d2psi - 2.0 * prod) + 2.0 * psi
    return fg.norm(resid, fg.NormKind.L2)


def h2_residual_values(orbit: EquilibriumOrbit, x) -> np.ndarray:
    """Orbit-equation residual p^2 - [w - w0 + ln((1-a w)/(1-a w0))/a] at x.

    Evaluated in the log coordinate (identical up to exact algebra), which
    stays finite arbitrarily close to the separatrix.
    """
    q, pbar = orbit._qp(x)
    return (pbar * pbar + potential_v(q) - orbit.energy) / orbit.alpha


# -- Chicone monotonicity check ----------------------------------------------

# Taylor coefficients of g: g(q) = sum_{n>=4} (2^n + 4 - 4n)/n! q^n; all
# positive, so the small-|q| evaluation below is free of the cancellation
# that makes the closed form lose the sign of g near its quartic zero.
_G_COEFFS = np.array([(2.0 ** nn + 4.0 - 4.0 * nn) / math.factorial(nn)
                      for nn in range(4, 26)])


def chicone_g(q):
    """Convexity combination g(q) = exp(2q) + 4(1-q)exp(q) - 2q - 5.

    Nonnegative with a quartic zero at q = 0; its sign controls the
    monotonicity of the period in the energy.
    """
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    small = np.abs(q) <= 0.5
    qs = q[small]
    acc = np.zeros_like(qs)
    for c in _G_COEFFS[::-1]:
        acc = acc * qs + c
    out[small] = acc * qs ** 4
    qb = q[~small]
    m = np.expm1(qb)
    out[~small] = m * m + (6.0 - 4.0 * qb) * m - 6.0 * qb
    return float(out) if out.shape == () else out


@dataclass
class ChiconeReport:
    q_grid: np.ndarray
    g_values: np.ndarray
    g_min_nonzero: float
    E_samples: np.ndarray
    dT_dE: np.ndarray
    passed: bool


def chicone_check(E_samples=None, q_grid=None) -> ChiconeReport:
    """Verify g >= 0 (zero only at q = 0) and dTtilde/dE > 0 numerically.

    dTtilde/dE is formed by central differences of the quadrature period.
    Raises PropertyViolationError on any failure; the report carries the
    sampled values either way.
    """
    if q_grid is None:
        q_grid = np.linspace(-10.0, 5.0, 1501)
    if E_samples is None:
        E_samples = np.geomspace(1e-4, 10.0, 20)
    q_grid = np.asarray(q_grid, dtype=float)
    E_samples = np.asarray(E_samples, dtype=float)

    g = chicone_g(q_grid)
    nonzero = q_grid != 0.0
    g_min = float(g[nonzero].min()) if nonzero.any() else math.inf

    dT = np.empty_like(E_samples)
    for i, E in enumerate(E_samples):
        h = min(1e-5, E / 10.0)
        tp, _ = period_from_energy(E + h)
        tm, _ = period_from_energy(E - h)
        dT[i] = (tp - tm) / (2.0 * h)

    ok = bool((g[nonzero] > 0.0).all() and (g[~nonzero] == 0.0).all()
              and (dT > 0.0).all())
    report = ChiconeReport(q_grid, g, g_min, E_samples, dT, ok)
    if not ok:
        raise PropertyViolationError(
            f"monotonicity check failed: min g = {g.min():.3e}, "
            f"min dT/dE = {dT.min():.3e}")
    return report
