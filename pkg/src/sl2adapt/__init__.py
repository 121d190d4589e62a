"""Numerical toolkit for adapted complexifications of SL2(R) under the metrics nu_m.

Modules, bottom-up: ``scalar`` (C, S, f), ``algebra`` (sl2 and SL2(C)),
``geodesics``, ``polar`` (polar map and slice domains), ``quotients``
(models Q and P, the map F), ``reduced`` (reduced polar map, level sets,
injectivity), ``figures`` and ``cli``.
"""

from .polar import SlicePoint, in_sigma_m, in_sigma_star, polar
from .quotients import F_map, PPoint, QPoint, to_Q
from .reduced import (
    gamma_curve,
    injectivity_scan,
    noninjectivity_witness,
    reduced_polar,
    tilde_a,
    trace_level_set,
)

__version__ = "0.1.0"

__all__ = [
    "F_map",
    "PPoint",
    "QPoint",
    "SlicePoint",
    "gamma_curve",
    "in_sigma_m",
    "in_sigma_star",
    "injectivity_scan",
    "noninjectivity_witness",
    "polar",
    "reduced_polar",
    "tilde_a",
    "to_Q",
    "trace_level_set",
]
