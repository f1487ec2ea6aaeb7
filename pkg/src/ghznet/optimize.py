"""Derivative-free scalar search: golden-section maxima over a coarse grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-5
) -> tuple[float, float]:
    """Golden-section maximum of a unimodal f on [lo, hi]."""
    c = hi - INV_GOLDEN * (hi - lo)
    d = lo + INV_GOLDEN * (hi - lo)
    f_c, f_d = f(c), f(d)
    while hi - lo > tol:
        if f_c >= f_d:
            hi, d, f_d = d, c, f_c
            c = hi - INV_GOLDEN * (hi - lo)
            f_c = f(c)
        else:
            lo, c, f_c = c, d, f_d
            d = lo + INV_GOLDEN * (hi - lo)
            f_d = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


@dataclass(frozen=True)
class ScalarMaximum:
    x: float
    value: float
    indeterminate: bool


def maximize_unit_interval(
    f: Callable[[float], float],
    grid: Sequence[float] | None = None,
    tol: float = 1e-5,
) -> ScalarMaximum:
    """Coarse grid over (0, 1) followed by golden-section refinement.

    The grid mixes linear spacing with points crowding both endpoints so
    near-boundary optima (common for basis probabilities) are bracketed
    tightly before refining.  The refined value never falls below the best
    grid value; an everywhere non-positive objective is flagged
    indeterminate.
    """
    if grid is None:
        edges = np.concatenate(
            [np.logspace(-8, math.log10(0.4), 60), 1.0 - np.logspace(-8, math.log10(0.4), 60)]
        )
        grid = np.unique(np.concatenate([np.linspace(0.005, 0.995, 199), edges]))
    xs = np.asarray(sorted(grid), dtype=float)
    values = np.array([f(x) for x in xs])
    best = int(values.argmax())
    if values[best] <= 0.0:
        return ScalarMaximum(math.nan, 0.0, True)
    lo = xs[best - 1] if best > 0 else xs[0]
    hi = xs[best + 1] if best + 1 < len(xs) else xs[-1]
    x_ref, v_ref = golden_section_max(f, lo, hi, tol)
    if v_ref >= values[best]:
        return ScalarMaximum(float(x_ref), float(v_ref), False)
    return ScalarMaximum(float(xs[best]), float(values[best]), False)
