"""Block-spin transformation on charge activities and its continuum limit.

One coarse-graining step at block size L maps the activity sequence
lambda(q) through an L^2-fold convolution followed by a Gaussian suppression
of charge:

    lambda^1(p) = L^{-beta p^2 / (4 pi)} (lambda * ... * lambda)(p).

On the Fourier side (the sine-Gordon representation), with
hat_lambda(phi) = sum_q lambda(q) e^{i q phi}, the same step is the
pointwise power hat_lambda^{L^2} followed by convolution with the heat
kernel of variance beta ln L / (2 pi), i.e. multiplication of the q-th
coefficient by L^{-beta q^2/(4 pi)}.  The Fourier form tolerates arbitrary
real L^2 > 1 and is used for the L -> 1 limit with t = n ln L held fixed;
the sequence-convolution form is kept as an oracle for integer L.

Activities are normalized to sum_q lambda(q) = 1 after every step, which is
the gauge in which u_n(x) = -ln hat_lambda^n(x) vanishes at x = 0 and can
be compared directly with the gauged continuum flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as fg
from .errors import ConvergenceFailureError, DomainError, ResummationError, TruncationError
from .flow import evolve_u_tilde

__all__ = [
    "ChargeActivity", "FourierActivity", "ThetaKernelValue", "ConvergenceTable",
    "make_activity", "theta_kernel", "rg_step", "direct_rg_step",
    "iterate_to_time", "activity_to_fourier", "fourier_to_activity",
    "continuum_compare",
]

TAIL_TOL = 1e-14


@dataclass(frozen=True)
class ChargeActivity:
    """Symmetric nonnegative activity sequence lambda(q), |q| <= Q, sum = 1."""
    Q: int
    lam: np.ndarray          # index q = -Q..Q  (position Q is q = 0)
    beta: float

    def __post_init__(self):
        if len(self.lam) != 2 * self.Q + 1:
            raise DomainError("activity array must have length 2Q+1")

    def value(self, q: int) -> float:
        return float(self.lam[q + self.Q]) if abs(q) <= self.Q else 0.0

    @property
    def l1(self) -> float:
        return float(np.abs(self.lam).sum())

    def tail_mass(self) -> float:
        return float(self.lam[0] + self.lam[-1])

    def to_json(self) -> str:
        import json
        return json.dumps({"beta": self.beta, "Q": self.Q, "lambda": list(self.lam)})


@dataclass(frozen=True)
class FourierActivity:
    """Samples of hat_lambda on M uniform points phi_m = -pi + 2 pi m / M."""
    grid: np.ndarray
    values: np.ndarray

    @property
    def M(self) -> int:
        return len(self.grid)

    def charge_coefficients(self, Q: int | None = None) -> np.ndarray:
        """Inverse transform: lambda(q) for q = 0..Q (symmetric in q)."""
        M = self.M
        if Q is None:
            Q = M // 2 - 1
        c = np.fft.rfft(self.values) / M
        signs = (-1.0) ** np.arange(len(c))  # grid starts at -pi, not 0
        lam = np.real(c) * signs
        return lam[: Q + 1]

    @property
    def l1_charge_norm(self) -> float:
        lam = self.charge_coefficients()
        return float(abs(lam[0]) + 2.0 * np.abs(lam[1:]).sum())


def _bessel_i_series(q: int, x: float, min_terms: int = 30) -> float:
    """Modified Bessel I_q(x) by its ascending power series."""
    half = 0.5 * x
    term = 1.0
    for m in range(1, q + 1):
        term *= half / m
    total = term
    m = 0
    while m < min_terms or term > 1e-18 * total:
        m += 1
        term *= half * half / (m * (m + q))
        total += term
        if m > 500:
            break
    return total


def make_activity(kind: str, z: float, Q: int = 64,
                  beta: float = math.nan) -> ChargeActivity:
    """Normalized charge activity of the named ensemble.

    ``bessel``: lambda(q) = I_q(2z) (grand canonical Coulomb ensemble with
    particle activity z); ``hardcore``: delta_{q,0} + z (delta_{q,1} +
    delta_{q,-1}).  The tail mass at |q| = Q must stay below 1e-14.
    """
    if z <= 0.0:
        raise DomainError("activity z must be positive")
    if Q < 8:
        raise DomainError("truncation radius Q must be at least 8")
    lam = np.zeros(2 * Q + 1)
    if kind == "bessel":
        for q in range(Q + 1):
            lam[Q + q] = _bessel_i_series(q, 2.0 * z)
            lam[Q - q] = lam[Q + q]
    elif kind == "hardcore":
        lam[Q] = 1.0
        lam[Q + 1] = lam[Q - 1] = z
    else:
        raise DomainError(f"unknown activity kind {kind!r}")
    lam /= lam.sum()
    ca = ChargeActivity(Q=Q, lam=lam, beta=beta)
    if ca.tail_mass() >= TAIL_TOL:
        raise TruncationError(
            f"tail mass {ca.tail_mass():.3e} at |q| = {Q}; increase Q")
    return ca


def activity_to_fourier(ca: ChargeActivity, M: int = 512) -> FourierActivity:
    grid = -math.pi + 2.0 * math.pi * np.arange(M) / M
    qs = np.arange(1, ca.Q + 1)
    lam_pos = ca.lam[ca.Q + 1:]
    values = ca.value(0) + 2.0 * np.cos(np.outer(grid, qs)) @ lam_pos
    return FourierActivity(grid=grid, values=values)


def fourier_to_activity(fa: FourierActivity, Q: int, beta: float = math.nan,
                        check_tail: bool = True) -> ChargeActivity:
    lam_half = fa.charge_coefficients(Q)
    lam = np.concatenate((lam_half[:0:-1], lam_half))
    ca = ChargeActivity(Q=Q, lam=lam, beta=beta)
    if check_tail and ca.tail_mass() >= TAIL_TOL:
        raise TruncationError(
            f"tail mass {ca.tail_mass():.3e} at |q| = {Q}; increase Q")
    return ca


# -- theta kernel --------------------------------------------------------------


@dataclass(frozen=True)
class ThetaKernelValue:
    value: float          # charge-sum representation
    poisson: float        # Gaussian image-sum representation
    discrepancy: float

    def __float__(self):
        return self.value


def theta_kernel(phi: float, beta: float, L: float) -> ThetaKernelValue:
    """Both representations of theta(phi) = sum_q L^{-beta q^2/(4 pi)} e^{i q phi}.

    The charge sum and its Poisson resummation (a periodized Gaussian) are
    each evaluated to absolute tail below 1e-17; a discrepancy above 1e-10
    raises ResummationError.
    """
    if L <= 1.0:
        raise DomainError("theta kernel requires block size L > 1")
    c = beta * math.log(L) / (4.0 * math.pi)
    total = 1.0
    q = 1
    while True:
        term = math.exp(-c * q * q)
        if term < 1e-17 and q > 2:
            break
        total += 2.0 * term * math.cos(q * phi)
        q += 1
        if q > 10_000_000:
            raise ResummationError("charge sum did not converge")
    # Poisson resummation: the image sum is the 2*pi-periodization of the
    # heat kernel, whose correct prefactor is 2*pi/sqrt(beta ln L).
    s = beta * math.log(L)
    pref = 2.0 * math.pi / math.sqrt(s)
    poisson = 0.0
    n = 0
    while True:
        done = True
        for sign in ((1,) if n == 0 else (1, -1)):
            arg = math.pi * (phi + 2.0 * math.pi * sign * n) ** 2 / s
            if arg < 40.0:
                poisson += pref * math.exp(-arg)
                done = False
        if done and n > 1:
            break
        n += 1
    disc = abs(total - poisson)
    if disc > 1e-10:
        raise ResummationError(
            f"theta representations disagree by {disc:.3e} at phi={phi}")
    return ThetaKernelValue(value=total, poisson=poisson, discrepancy=disc)


# -- coarse-graining steps ------------------------------------------------------


def rg_step(a: FourierActivity, beta: float, L: float) -> FourierActivity:
    """One Fourier-side step: pointwise power L^2, Gaussian factor, renormalize.

    Requires hat_lambda > 0 on the grid (the real power is then well defined;
    L^2 need not be an integer).  The output is renormalized so that
    sum_q lambda(q) = hat_lambda(0) = 1.
    """
    vals = a.values
    if vals.min() <= 0.0:
        raise DomainError(
            f"hat_lambda reaches {vals.min():.3e} <= 0: outside the "
            "representable cone")
    powered = vals ** (L * L)
    coeff = np.fft.rfft(powered)
    qs = np.arange(len(coeff))
    factor = np.exp(-(beta * math.log(L) / (4.0 * math.pi)) * qs * qs)
    out = np.fft.irfft(coeff * factor, n=a.M)
    i0 = a.M // 2  # phi = 0 lies at index M/2 on the [-pi, pi) grid
    out /= out[i0]
    return FourierActivity(grid=a.grid, values=out)


def direct_rg_step(ca: ChargeActivity, beta: float, L: int) -> ChargeActivity:
    """Sequence-space oracle for integer L: L^2-fold convolution + Gaussian."""
    if int(L) != L or L < 2:
        raise DomainError("direct convolution step needs integer L >= 2")
    L = int(L)
    lam = ca.lam
    for _ in range(L * L - 1):
        lam = np.convolve(lam, ca.lam)
    Qn = (len(lam) - 1) // 2
    qs = np.arange(-Qn, Qn + 1)
    lam = lam * L ** (-(beta / (4.0 * math.pi)) * qs.astype(float) ** 2)
    lam /= lam.sum()
    return ChargeActivity(Q=Qn, lam=lam, beta=ca.beta)


def log_activity_profile(fa: FourierActivity, n_grid: int = fg.DEFAULT_GRID) -> fg.GridFunction:
    """Effective potential -ln hat_lambda, gauged to vanish at x = 0."""
    if fa.values.min() <= 0.0:
        raise DomainError("hat_lambda must be positive to take its logarithm")
    u = -np.log(fa.values)
    coeff = np.fft.rfft(u) / fa.M
    signs = (-1.0) ** np.arange(len(coeff))
    cos_coeffs = 2.0 * np.real(coeff) * signs
    cos_coeffs[0] *= 0.5
    keep = min(n_grid, len(cos_coeffs))
    gf = fg.GridFunction(fg.Parity.EVEN, cos_coeffs[:keep], n=n_grid)
    offset = float(gf.values[0])
    shifted = np.array(gf.coeffs)
    shifted[0] -= offset
    return fg.GridFunction(fg.Parity.EVEN, shifted, n=n_grid)


def iterate_to_time(a0: FourierActivity, beta: float, t: float, n: int,
                    n_grid: int = fg.DEFAULT_GRID) -> fg.GridFunction:
    """n coarse-graining steps at L = exp(t/n); returns u_n = -ln hat_lambda^n.

    The result is gauged so u_n(0) = 0 and projected onto the standard even
    grid.  t = 0 performs no steps.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if t < 0.0:
        raise DomainError("t must be nonnegative")
    a = a0
    if t > 0.0:
        L = math.exp(t / n)
        for _ in range(n):
            a = rg_step(a, beta, L)
    return log_activity_profile(a, n_grid)


# -- continuum comparison -------------------------------------------------------


@dataclass
class ConvergenceTable:
    beta: float
    z: float
    t: float
    n_values: list[int]
    L_values: list[float]
    sup_gaps: list[float]
    ratios: list[float]            # gap(n_{i+1}) / gap(n_i)
    order_estimates: list[float]   # ln(gap_i/gap_{i+1}) / ln(n_{i+1}/n_i)
    l1_norms: list[float]

    def rows(self):
        for i, n in enumerate(self.n_values):
            order = self.order_estimates[i - 1] if i else math.nan
            yield (n, self.L_values[i], self.sup_gaps[i], order)


def continuum_compare(beta: float, z: float, t: float, n_list,
                      kind: str = "hardcore", Q: int = 64, M: int = 512,
                      n_grid: int = fg.DEFAULT_GRID, dt: float = 2.5e-4) -> ConvergenceTable:
    """Sup-norm gaps between the n-step discrete iteration and the gauged flow.

    The continuum reference solves the even-form flow from the matched
    initial profile u0 = -ln hat_lambda^0 (gauged).  Gaps should shrink at
    first order in 1/n; non-decreasing gaps raise ConvergenceFailureError
    with the table attached.
    """
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise DomainError("n_list must not be empty")
    a0 = activity_to_fourier(make_activity(kind, z, Q, beta), M)
    u0 = log_activity_profile(a0, n_grid)
    if t > 0.0:
        reference = evolve_u_tilde(u0, beta / (4.0 * math.pi), t, dt=dt,
                                   stride=max(1, round(0.01 / dt))).final.v
    else:
        reference = u0
    gaps, Ls, l1s = [], [], []
    for n in n_list:
        a = a0
        if t > 0.0:
            L = math.exp(t / n)
            for _ in range(n):
                a = rg_step(a, beta, L)
        else:
            L = math.nan
        un = log_activity_profile(a, n_grid)
        gaps.append(float(np.abs(un.values - reference.values).max()))
        Ls.append(L)
        l1s.append(a.l1_charge_norm)
    ratios = [gaps[i + 1] / gaps[i] if gaps[i] else math.nan
              for i in range(len(gaps) - 1)]
    orders = [math.log(gaps[i] / gaps[i + 1]) / math.log(n_list[i + 1] / n_list[i])
              if gaps[i + 1] else math.nan
              for i in range(len(gaps) - 1)]
    table = ConvergenceTable(beta=beta, z=z, t=t, n_values=n_list, L_values=Ls,
                             sup_gaps=gaps, ratios=ratios,
                             order_estimates=orders, l1_norms=l1s)
    if t > 0.0 and any(g2 >= g1 for g1, g2 in zip(gaps, gaps[1:])):
        raise ConvergenceFailureError(
            f"gaps do not decrease along n_list: {gaps}", table=table)
    return table
