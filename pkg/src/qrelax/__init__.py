"""Fixed points of relaxing quantum dynamical semigroups under Hamiltonian control."""

__version__ = "0.1.0"
