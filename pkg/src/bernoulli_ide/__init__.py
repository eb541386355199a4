"""Orthonormal-Bernoulli operational-matrix solver for linear Volterra IDEs."""
