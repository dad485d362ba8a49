"""Stochastic Galerkin / DG solver for the semiconductor Boltzmann-Poisson
system with a random lattice temperature in the electron-phonon collisions."""

__version__ = "0.1.0"
