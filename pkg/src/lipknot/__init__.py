"""lipknot - Lipschitz knot theory certifier for surface germs in R^4."""

__version__ = "0.1.0"
