"""Spectral numerics for the Airy group, Bourgain-space estimates and gKdV-p.

Modules
-------
spectral      grids, transforms, Fourier multipliers, the bilinear operator ``I_-^s``
norms         L^2, mixed L^p_t L^q_x, Sobolev and X_{s,b} norms
estimates     randomized and exhaustive inequality harnesses
solver        integrating-factor RK4 solver, solitons, Picard iteration, scaling
experiments   conservation / order / scaling / Picard / rough-data experiments
fieldio       binary and JSON field serialization
plotting      matplotlib figures for reports
cli           ``airykdv`` command line
"""

__version__ = "0.1.0"
