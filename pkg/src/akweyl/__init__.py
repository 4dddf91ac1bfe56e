"""Curvature algebra of oriented Riemannian and almost-Kähler 4-manifolds.

Modules: :mod:`sd_algebra` (pointwise Lambda^2 algebra), :mod:`geometry`
(curvature from metrics), :mod:`almost_kahler` (omega, s*, Blair curvature),
:mod:`weitzenboeck` (grid residuals), :mod:`functionals` (integrals),
:mod:`catalog` (explicit metrics), :mod:`cli`.
"""
__version__ = "0.1.0"
