"""Panel quadrature, Simpson integration and vectorized bisection.

Everything here works on numpy arrays of panels at once; the adaptive
Gauss-Legendre routine refines only the panels whose coarse and fine
estimates disagree.
"""

from functools import lru_cache
import logging

import numpy as np

log = logging.getLogger(__name__)

_ROUNDING = 1e-13


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_panels(func, lo, hi, nodes=32, with_mass=False):
    """Fixed-order Gauss-Legendre estimate of the integral over every panel.

    With ``with_mass`` also returns the same rule applied to |func|, the
    scale against which rounding noise is judged.
    """
    x, w = gauss_legendre(nodes)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(func(t.ravel()), dtype=float).reshape(t.shape)
    if with_mass:
        return half * (vals @ w), half * (np.abs(vals) @ w)
    return half * (vals @ w)


def split_panels(edges, breaks=()):
    """Cut the intervals [edges[i], edges[i+1]] at interior breakpoints.

    Returns (lo, hi, owner) where owner[j] is the index of the original
    interval that panel j belongs to.
    """
    edges = np.asarray(edges, dtype=float)
    breaks = np.asarray(breaks, dtype=float)
    inside = breaks[(breaks > edges[0]) & (breaks < edges[-1])]
    pts = np.union1d(edges, inside)
    lo, hi = pts[:-1], pts[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    owner = np.searchsorted(edges, lo, side="right") - 1
    owner = np.clip(owner, 0, len(edges) - 2)
    return lo, hi, owner


def adaptive_panels(func, lo, hi, owner=None, n_out=None, nodes=32,
                    rtol=1e-9, atol=1e-12, max_depth=40, max_panels=20_000):
    """Integrate func over each panel, bisecting panels until converged.

    A panel is accepted when its nodes-point estimate and the sum over its
    two halves agree within ``max(rtol*|fine|, atol*width)``, or when the
    disagreement is at the level of rounding in the node sums.  The result is
    accumulated per ``owner`` (defaults to one entry per panel).  Refinement
    stops once the active panel count would exceed ``max_panels`` beyond the
    initial count; remaining estimates are kept.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if owner is None:
        owner = np.arange(lo.size)
        n_out = lo.size
    elif n_out is None:
        n_out = int(owner.max()) + 1 if owner.size else 0
    out = np.zeros(n_out)
    if lo.size == 0:
        return out
    coarse = gl_panels(func, lo, hi, nodes)
    cap = max_panels + lo.size
    depth = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        both, mass = gl_panels(func, np.concatenate([lo, mid]), np.concatenate([mid, hi]),
                               nodes, with_mass=True)
        left, right = both[: lo.size], both[lo.size:]
        fine = left + right
        err = np.abs(fine - coarse)
        noise = _ROUNDING * (mass[: lo.size] + mass[lo.size:])
        ok = err <= np.maximum(np.maximum(rtol * np.abs(fine), atol * (hi - lo)), noise)
        if depth >= max_depth or 2 * int((~ok).sum()) > cap:
            if not ok.all():
                log.debug("quadrature: %d panels unconverged (max err %.3g)",
                            int((~ok).sum()), float(err[~ok].max()))
            ok[:] = True
        np.add.at(out, owner[ok], fine[ok])
        bad = ~ok
        lo, mid, hi, owner = lo[bad], mid[bad], hi[bad], owner[bad]
        coarse = np.concatenate([left[bad], right[bad]])
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
        depth += 1
    return out


def integrate_intervals(func, edges, breaks=(), nodes=32, rtol=1e-9, atol=1e-12):
    """Integrals of func over consecutive intervals of ``edges``, split at ``breaks``."""
    lo, hi, owner = split_panels(edges, breaks)
    return adaptive_panels(func, lo, hi, owner, len(edges) - 1, nodes=nodes,
                           rtol=rtol, atol=atol)


def simpson(func, a, b, panels_per_unit=1024, rtol=1e-10, max_doublings=12):
    """Composite Simpson on [a, b], doubling the panel count until two
    successive refinements agree to ``rtol``."""
    if b == a:
        return 0.0
    n = max(2, int(np.ceil(abs(b - a) * panels_per_unit)))
    n += n % 2
    prev = None
    for _ in range(max_doublings + 1):
        t = np.linspace(a, b, n + 1)
        y = np.asarray(func(t), dtype=float)
        h = (b - a) / n
        val = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return float(val)
        prev = val
        n *= 2
    log.warning("simpson: no agreement to %.1e on [%g, %g]", rtol, a, b)
    return float(val)


def bisect_increasing(func, y, lo, hi, atol=1e-12, rtol=4e-16, maxiter=400):
    """Vectorized bisection for the boundary of {t : func(t) <= y}.

    ``func`` must be nondecreasing with func(lo) <= y and func(hi) >= y.  The
    returned point u satisfies lo <= u <= hi with a bracket narrower than
    ``max(atol, rtol*u)`` unless the interval stopped shrinking.
    """
    y = np.asarray(y, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), y.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), y.shape).copy()
    for _ in range(maxiter):
        active = (hi - lo) > np.minimum(atol, rtol * hi)
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        active &= ~stuck
        if not active.any():
            break
        below = np.asarray(func(mid), dtype=float) <= y
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    return 0.5 * (lo + hi)


def grow_bracket(func, y, start=1.0, factor=2.0, limit=1e300):
    """Smallest b = start*factor**k (elementwise) with func(b) >= y."""
    y = np.asarray(y, dtype=float)
    b = np.full(y.shape, float(start))
    while True:
        short = np.asarray(func(b), dtype=float) < y
        if not short.any():
            return b
        if (b[short] >= limit).any():
            raise ValueError("could not bracket the target value")
        b = np.where(short, b * factor, b)
