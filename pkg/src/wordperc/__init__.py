"""Word percolation toolkit: lattice geometry, word search, couplings,
oriented percolation, block renormalization, and a Monte Carlo harness."""

__version__ = "0.1.0"
