"""Numerical toolkit for Schrodinger operators -Delta + V on the Heisenberg
group: heat and Poisson semigroups, reverse-Holder potentials and the
critical-radius function rho, Hardy/BMO norms, fractional integrals, a
Monte Carlo oracle, and theorem-level verification experiments."""

__version__ = "0.1.0"
