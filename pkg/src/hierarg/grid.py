"""Spectral representation of odd/even 2*pi-periodic real functions.

Functions live on the half-period collocation grid x_k = pi*k/N, k = 0..N,
with N a power of two (N intervals on [0, pi]).  An odd function is a sine
series sum_{n=1}^{N-1} a_n sin(n x); an even function is a cosine series
b_0 + sum_{n=1}^{N-1} b_n cos(n x).  The Nyquist cosine mode is dropped so
that differentiation maps each basis onto the other without loss.

Transforms are DST-I / DCT-I (scipy.fft); direct summation is kept in the
test suite as the oracle.  Quadratic nonlinearities are formed pointwise on
a 3/2-padded grid (dealiasing) by :func:`multiply`.

All operations are pure; coefficient arrays are frozen after construction,
so values may be shared read-only across threads.
"""

from __future__ import annotations

import enum
import json
import math

import numpy as np
from scipy import fft as _fft

from .errors import DomainError, GridSizeError

DEFAULT_GRID = 256


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


class NormKind(str, enum.Enum):
    L2 = "L2"
    H1 = "H1"  # ||f||_H1 := ||f'||_L2


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _check_grid_size(n: int) -> None:
    if not _is_power_of_two(n):
        raise GridSizeError(f"grid interval count must be a power of two, got {n}")


def grid_points(n: int) -> np.ndarray:
    """Collocation nodes x_k = pi*k/n, k = 0..n."""
    return np.linspace(0.0, np.pi, n + 1)


class GridFunction:
    """Immutable sine or cosine series on the standard collocation grid.

    Parameters
    ----------
    parity : Parity or str
        ``odd`` for a sine series, ``even`` for a cosine series with
        constant term.
    coeffs : array_like
        Spectral coefficients; shorter sequences are zero-padded to the
        basis size of the grid (modes beyond the stored length are zero).
    n : int, optional
        Number of grid intervals on [0, pi] (power of two).  Defaults to
        the smallest standard grid holding the coefficients, at least
        ``DEFAULT_GRID``.
    """

    __slots__ = ("parity", "n", "coeffs", "_values")

    def __init__(self, parity: Parity | str, coeffs, n: int | None = None):
        parity = Parity(parity)
        c = np.asarray(coeffs, dtype=float).ravel()
        if n is None:
            n = DEFAULT_GRID
            need = len(c) + 1 if parity is Parity.ODD else len(c)
            while n < need:
                n *= 2
        _check_grid_size(n)
        size = n - 1 if parity is Parity.ODD else n
        if len(c) > size:
            raise GridSizeError(
                f"{len(c)} {parity.value} coefficients do not fit a grid with n={n}"
            )
        full = np.zeros(size)
        full[: len(c)] = c
        full.setflags(write=False)
        self.parity = parity
        self.n = n
        self.coeffs = full
        self._values = None

    # -- construction -------------------------------------------------------

    @staticmethod
    def zero(parity: Parity | str, n: int = DEFAULT_GRID) -> "GridFunction":
        return GridFunction(parity, [0.0], n=n)

    @staticmethod
    def from_callable(f, parity: Parity | str, n: int = DEFAULT_GRID) -> "GridFunction":
        """Sample ``f`` on the grid and transform."""
        return transform(f(grid_points(n)), parity)

    # -- basic properties ---------------------------------------------------

    @property
    def n_modes(self) -> int:
        return len(self.coeffs)

    @property
    def x(self) -> np.ndarray:
        return grid_points(self.n)

    @property
    def values(self) -> np.ndarray:
        """Samples on the collocation grid (cached)."""
        if self._values is None:
            v = _synthesize(self.parity, self.coeffs, self.n)
            v.setflags(write=False)
            self._values = v
        return self._values

    def __call__(self, x) -> np.ndarray | float:
        """Evaluate the series at arbitrary points by direct summation."""
        x = np.asarray(x, dtype=float)
        modes = np.arange(1, self.n_modes + 1 if self.parity is Parity.ODD else self.n_modes)
        if self.parity is Parity.ODD:
            out = np.sin(np.multiply.outer(x, modes)) @ self.coeffs
        else:
            out = self.coeffs[0] + np.cos(np.multiply.outer(x, modes)) @ self.coeffs[1:]
        return out if out.shape else float(out)

    def resample(self, n: int) -> "GridFunction":
        """Same function on a grid with ``n`` intervals (pad or truncate)."""
        _check_grid_size(n)
        size = n - 1 if self.parity is Parity.ODD else n
        return GridFunction(self.parity, self.coeffs[:size], n=n)

    # -- arithmetic (same parity, same grid) --------------------------------

    def _binary(self, other: "GridFunction", op) -> "GridFunction":
        if self.parity is not other.parity or self.n != other.n:
            raise DomainError("grid functions differ in parity or grid size")
        return GridFunction(self.parity, op(self.coeffs, other.coeffs), n=self.n)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, scalar):
        if isinstance(scalar, GridFunction):
            return multiply(self, scalar)
        return GridFunction(self.parity, float(scalar) * self.coeffs, n=self.n)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.parity, -self.coeffs, n=self.n)

    def __repr__(self):
        return f"GridFunction({self.parity.value}, n={self.n}, n_modes={self.n_modes})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"parity": self.parity.value, "n_modes": self.n_modes,
             "coeffs": list(self.coeffs)}
        )

    @staticmethod
    def from_json(text: str) -> "GridFunction":
        obj = json.loads(text)
        parity = Parity(obj["parity"])
        n = obj["n_modes"] + 1 if parity is Parity.ODD else obj["n_modes"]
        return GridFunction(parity, obj["coeffs"], n=n)

    def write_csv(self, path) -> None:
        """Write (x, f(x)) pairs with 17 significant digits."""
        with open(path, "w") as fh:
            fh.write("x,f\n")
            for xk, vk in zip(self.x, self.values):
                fh.write(f"{xk:.17g},{vk:.17g}\n")


# -- transforms --------------------------------------------------------------


def _synthesize(parity: Parity, coeffs: np.ndarray, n: int) -> np.ndarray:
    """Coefficients -> values on the closed grid (n+1 points)."""
    out = np.zeros(n + 1)
    if parity is Parity.ODD:
        out[1:n] = _fft.dst(coeffs, type=1) / 2.0
    else:
        c = np.zeros(n + 1)
        c[0] = coeffs[0]
        c[1:n] = coeffs[1:] / 2.0
        out = _fft.dct(c, type=1)
    return out


def _analyze(values: np.ndarray, parity: Parity) -> np.ndarray:
    """Values on a closed (n+1)-point grid -> basis coefficients."""
    v = np.asarray(values, dtype=float).ravel()
    n = len(v) - 1
    if parity is Parity.ODD:
        return _fft.dst(v[1:n], type=1) / n
    c = _fft.dct(v, type=1) / (2.0 * n)
    return np.concatenate(([c[0]], 2.0 * c[1:n]))


def transform(values, parity: Parity | str) -> GridFunction:
    """Build a GridFunction from samples on the closed grid x_k = pi*k/N.

    ``values`` must have length N+1 with N a power of two.  For odd parity
    the endpoint samples are structurally zero in the sine basis and are
    ignored; for even parity the (unrepresentable) Nyquist cosine mode is
    projected out.
    """
    parity = Parity(parity)
    v = np.asarray(values, dtype=float).ravel()
    n = len(v) - 1
    _check_grid_size(n)
    return GridFunction(parity, _analyze(v, parity), n=n)


def differentiate(f: GridFunction) -> GridFunction:
    """Spectral derivative; odd -> even and even -> odd."""
    if f.parity is Parity.ODD:
        modes = np.arange(1, f.n)
        out = np.zeros(f.n)
        out[1:] = modes * f.coeffs
        return GridFunction(Parity.EVEN, out, n=f.n)
    modes = np.arange(1, f.n)
    return GridFunction(Parity.ODD, -modes * f.coeffs[1:], n=f.n)


def integrate_from_zero(v: GridFunction) -> GridFunction:
    """Antiderivative of an odd function vanishing at x = 0 (an even function).

    For v = sum a_n sin(nx) this is sum a_n (1 - cos(nx))/n, whose constant
    term is fixed by the vanishing-at-zero condition.
    """
    if v.parity is not Parity.ODD:
        raise DomainError("integrate_from_zero expects an odd function")
    modes = np.arange(1, v.n)
    an = v.coeffs / modes
    out = np.empty(v.n)
    out[0] = an.sum()
    out[1:] = -an
    return GridFunction(Parity.EVEN, out, n=v.n)


def norm(f: GridFunction, kind: NormKind | str = NormKind.L2) -> float:
    """L2 norm over (-pi, pi) by Parseval, or the H1 norm ||f'||_L2."""
    kind = NormKind(kind)
    if kind is NormKind.H1:
        return norm(differentiate(f), NormKind.L2)
    if f.parity is Parity.ODD:
        return math.sqrt(math.pi * float(np.dot(f.coeffs, f.coeffs)))
    c0 = f.coeffs[0]
    rest = f.coeffs[1:]
    return math.sqrt(2.0 * math.pi * c0 * c0 + math.pi * float(np.dot(rest, rest)))


def integral(f: GridFunction) -> float:
    """Exact integral over (-pi, pi): zero for odd, 2*pi*b_0 for even."""
    if f.parity is Parity.ODD:
        return 0.0
    return 2.0 * math.pi * float(f.coeffs[0])


_PRODUCT_PARITY = {
    (Parity.ODD, Parity.ODD): Parity.EVEN,
    (Parity.ODD, Parity.EVEN): Parity.ODD,
    (Parity.EVEN, Parity.ODD): Parity.ODD,
    (Parity.EVEN, Parity.EVEN): Parity.EVEN,
}


def multiply(f: GridFunction, g: GridFunction) -> GridFunction:
    """Pointwise product on a 3/2-padded grid, truncated back (dealiased)."""
    n = max(f.n, g.n)
    npad = 3 * n // 2
    fv = _synthesize(f.parity, _pad(f, npad), npad)
    gv = _synthesize(g.parity, _pad(g, npad), npad)
    parity = _PRODUCT_PARITY[(f.parity, g.parity)]
    coeffs = _analyze(fv * gv, parity)
    size = n - 1 if parity is Parity.ODD else n
    return GridFunction(parity, coeffs[:size], n=n)


def _pad(f: GridFunction, npad: int) -> np.ndarray:
    size = npad - 1 if f.parity is Parity.ODD else npad
    out = np.zeros(size)
    out[: f.n_modes] = f.coeffs
    return out
