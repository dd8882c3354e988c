"""bergnum: weighted Bergman kernels, Hankel operators and hyperbolic-metric
mean oscillation, numerically.

The package is organised as a numerical core (weights, disc geometry and
quadrature, kernel series, transforms, oscillation, experiment harness)
wrapped by an HTTP service (:mod:`bergnum.service`) whose thin client is the
``berg`` command line tool.
"""

__version__ = "0.1.0"
