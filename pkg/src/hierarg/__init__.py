"""Renormalization-group flow of the two-dimensional hierarchical Coulomb gas.

A numerical laboratory built around the quasilinear flow equation

    v_t = alpha (v_xx - 2 v v_x) + 2 v,    alpha = beta / (4 pi),

its discrete block-spin origin, the complete family of equilibrium
solutions obtained from the period function of an auxiliary Hamiltonian
system, and the local/global stability machinery (spectra of the
linearization, comparison criterium, descent functional).

Submodules
----------
grid        spectral representation of odd/even 2*pi-periodic functions
flow        exponential time integration of the v- and gauged u-forms
equilibria  period function, branch values, orbit reconstruction
stability   linearized spectra, comparison criterium, descent functional
discrete    block-spin step on charge activities and its continuum limit
cli         command-line front end (``hierarg``)
"""

__version__ = "0.1.0"

from .grid import GridFunction, NormKind, Parity  # noqa: F401
