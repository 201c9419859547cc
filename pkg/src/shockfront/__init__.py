"""shockfront: eikonal-based shock formation simulator for quasilinear waves.

Submodules
----------
model        metric laws g(psi) and their derivatives
geometry     eikonal / null-frame pointwise algebra (mu, L, X, tr chi, ...)
plane        exact simple-wave fan oracle and 1-D Riemann solver
euler        irrotational relativistic Euler specialization
solver2d     coupled wave + eikonal evolution on R x T with characteristics
diagnostics  theorem-level verdicts: lifespan, blowup rate, regularity
config       run configuration (TOML/JSON)
cli          command-line entry points
"""

__version__ = "0.1.0"
