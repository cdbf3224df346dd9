"""monomap: exact stability certificates and degree growth for monomial maps.

An integer matrix A defines the monomial self-map
    f_A(z_1, ..., z_m) = (z_1^{a_11} ... z_m^{a_m1}, ..., z_1^{a_1m} ... z_m^{a_mm})
on the torus, extending to rational self-maps of toric models.  This package
certifies k-stability of f_A on skew-product models, searches for stabilizing
bases and stabilizing powers, computes degree sequences as exact mixed
volumes, and detects (or refutes up to a bounded order) linear recurrences in
those sequences.
"""

__version__ = "0.1.0"
