"""Finite-difference stencils on uniform grids.

All interior stencils are central and second order; boundary rows use
one-sided second-order stencils so every returned array matches the input
length. ``diff1_o4`` is the fourth-order first derivative used by residual
checks that must stay well below solver tolerances.
"""
from __future__ import annotations

import numpy as np

from .errors import InsufficientDataError


def uniform_spacing(grid: np.ndarray, rtol: float = 1e-8) -> float:
    """Return the spacing of a uniform grid, validating uniformity."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InsufficientDataError("grid needs at least 2 points")
    steps = np.diff(grid)
    h = float(steps[0])
    if h <= 0 or not np.allclose(steps, h, rtol=rtol, atol=0.0):
        raise InsufficientDataError("grid must be uniform and increasing")
    return h


def diff1(y: np.ndarray, h: float) -> np.ndarray:
    """First derivative, central O(h^2), one-sided O(h^2) at the ends."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 3:
        raise InsufficientDataError("first derivative needs at least 3 samples")
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return d


def diff2(y: np.ndarray, h: float) -> np.ndarray:
    """Second derivative, central O(h^2), one-sided O(h^2) at the ends."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 4:
        raise InsufficientDataError("second derivative needs at least 4 samples")
    d = np.empty_like(y)
    h2 = h * h
    d[1:-1] = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / h2
    d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2
    d[-1] = (2.0 * y[-1] - 5.0 * y[-2] + 4.0 * y[-3] - y[-4]) / h2
    return d


def diff3(y: np.ndarray, h: float) -> np.ndarray:
    """Third derivative, central O(h^2); needs 7 samples for the edge rows."""
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 7:
        raise InsufficientDataError("third derivative needs at least 7 samples")
    d = np.empty_like(y)
    h3 = h ** 3
    d[2:-2] = (y[4:] - 2.0 * y[3:-1] + 2.0 * y[1:-3] - y[:-4]) / (2.0 * h3)
    d[0] = (-5.0 * y[0] + 18.0 * y[1] - 24.0 * y[2] + 14.0 * y[3] - 3.0 * y[4]) / (2.0 * h3)
    d[1] = (-3.0 * y[0] + 10.0 * y[1] - 12.0 * y[2] + 6.0 * y[3] - y[4]) / (2.0 * h3)
    d[-2] = (3.0 * y[-1] - 10.0 * y[-2] + 12.0 * y[-3] - 6.0 * y[-4] + y[-5]) / (2.0 * h3)
    d[-1] = (5.0 * y[-1] - 18.0 * y[-2] + 24.0 * y[-3] - 14.0 * y[-4] + 3.0 * y[-5]) / (2.0 * h3)
    return d


def diff1_o4(y: np.ndarray, h: float) -> np.ndarray:
    """First derivative, central O(h^4) in the interior.

    The two rows at each end fall back to the O(h^2) stencils; callers that
    need the full fourth order should restrict to ``[2:-2]``.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 5:
        raise InsufficientDataError("fourth-order derivative needs at least 5 samples")
    d = diff1(y, h)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * h)
    return d


def cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral of uniformly sampled ``y`` by composite Simpson.

    Even indices follow the classical composite rule; odd indices integrate
    the local quadratic over its final subinterval, keeping every cumulative
    value O(h^4).
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 3:
        raise InsufficientDataError("Simpson quadrature needs at least 3 samples")
    out = np.zeros(n, dtype=float)
    pair = (h / 3.0) * (y[:-2:2] + 4.0 * y[1:-1:2] + y[2::2])
    out[2::2] = np.cumsum(pair)
    # Half-interval from the parabola through (k-1, k, k+1) where available.
    out[1] = out[0] + (h / 12.0) * (5.0 * y[0] + 8.0 * y[1] - y[2])
    if n > 3:
        out[3::2] = out[2:-1:2] + (h / 12.0) * (
            -y[1:-2:2] + 8.0 * y[2:-1:2] + 5.0 * y[3::2]
        )
    return out
