"""One-dimensional root finding and maximization used by the solvers."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .core import SolverError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bracketed_root(f, lo: float, hi: float, rtol: float = 1e-14) -> float:
    """Root of ``f`` on ``[lo, hi]`` by Brent's bracketed method.

    Endpoint values must differ in sign.  Infinite endpoint values are
    allowed: the bracket is first halved until both ends are finite, then
    handed to ``brentq``, which never leaves the bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise SolverError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    xtol = max(rtol * max(abs(lo), abs(hi)), 1e-300)
    for _ in range(200):
        if np.isfinite(flo) and np.isfinite(fhi):
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo <= xtol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=2000)


def scan_roots(f, lo: float, hi: float, points: int = 512, log: bool = True, rtol: float = 1e-12):
    """All roots of ``f`` found by sign changes on a grid over ``[lo, hi]``.

    Each bracketing cell is refined by :func:`bracketed_root`.  Roots closer together
    than one grid cell are missed; callers size ``points`` accordingly.
    """
    grid = np.geomspace(lo, hi, points) if log else np.linspace(lo, hi, points)
    vals = np.array([f(x) for x in grid])
    roots = []
    for k in range(points - 1):
        a, b = vals[k], vals[k + 1]
        if a == 0:
            roots.append(float(grid[k]))
        elif a * b < 0:
            roots.append(bracketed_root(f, grid[k], grid[k + 1], rtol=rtol))
    if vals[-1] == 0:
        roots.append(float(grid[-1]))
    return roots


def golden_max(f, lo: float, hi: float, xtol: float):
    """Golden-section maximizer of a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are compared against the interior result so corner
    optima are returned exactly.  Returns ``(x, f(x))``.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    best = (x, f(x))
    for end in (lo, hi):
        fe = f(end)
        if fe > best[1]:
            best = (end, fe)
    return best
