"""Permanents of positive definite Hermitian matrices with spectrum in [1, 2].

Exact oracles at small n, the log-concave integrand with its concavity
checks, and seeded Monte Carlo / annealed MCMC estimators.
"""

from permlc._permlc import *  # noqa: F401,F403
from permlc._permlc import __version__  # noqa: F401
