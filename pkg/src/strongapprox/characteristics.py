"""Pointwise characteristics built from phi_x(t) = f(x+t) + f(x-t) - 2f(x).

All integrals run over (0, pi) (or a prefix of it) with the Gauss-Legendre
engine from :mod:`strongapprox.quadrature`, split at every t where x+t or
x-t lands on a jump or kink of f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fourier import TWO_PI, phi_x
from .quadrature import integrate_intervals

BLOCK_NODES = 32
QUAD_RTOL = 1e-9
QUAD_ATOL = 1e-12


@dataclass(frozen=True)
class Partition:
    """Delta_nu^n = (pi nu/(n+1), pi (nu+1)/(n+1)), nu = 0..n."""

    n: int

    @property
    def edges(self):
        return math.pi * np.arange(self.n + 2) / (self.n + 1)

    @property
    def intervals(self):
        e = self.edges
        return list(zip(e[:-1], e[1:]))

    @property
    def delta(self):
        return math.pi / (self.n + 1)


def breakpoints(f, x):
    """Points t in (0, pi) where x + t or x - t is a singular point of f."""
    pts = []
    for d in f.singular_points:
        for t in (d - x, x - d):
            r = np.mod(t, TWO_PI)
            pts.extend([r, r - TWO_PI])
    pts = np.asarray(pts, dtype=float)
    return np.unique(pts[(pts > 0) & (pts < math.pi)])


def block_count(delta):
    """[pi/delta], tolerant of rounding when delta = pi/(n+1)."""
    return int(math.floor(math.pi / delta + 1e-9))


def _abs_power(f, x, p):
    if p == 1:
        return lambda t: np.abs(phi_x(f, x, t))
    return lambda t: np.abs(phi_x(f, x, t)) ** p


def _psi_of_abs(pair, f, x):
    return lambda t: pair.psi(np.abs(phi_x(f, x, t)))


def interval_integrals(integrand, f, x, edges, rtol=QUAD_RTOL, atol=QUAD_ATOL, nodes=BLOCK_NODES):
    return integrate_intervals(integrand, edges, breakpoints(f, x), nodes=nodes,
                               rtol=rtol, atol=atol)


def abs_blocks(f, x, edges, p=1.0, **kw):
    """Integrals of |phi_x|^p over consecutive intervals of ``edges``."""
    return interval_integrals(_abs_power(f, x, p), f, x, edges, **kw)


def psi_blocks(pair, f, x, edges, **kw):
    """Integrals of Psi(|phi_x|) over consecutive intervals of ``edges``."""
    return interval_integrals(_psi_of_abs(pair, f, x), f, x, edges, **kw)


def _gabisonia_averages(f, x, delta, p, **kw):
    m = block_count(delta)
    if m < 1:
        raise ValueError("delta must not exceed pi")
    edges = delta * np.arange(m + 1)
    k = np.arange(1, m + 1)
    return abs_blocks(f, x, edges, p, **kw) / (k * delta)


def w_p(f, x, delta, p=1.0, **kw):
    """{(1/delta) int_0^delta |phi_x|^p}^(1/p)."""
    val = abs_blocks(f, x, np.array([0.0, delta]), p, **kw)[0] / delta
    return float(val ** (1.0 / p))


def w_psi(pair, f, x, delta, **kw):
    """Psi^{-1}{(1/delta) int_0^delta Psi(|phi_x|)}."""
    val = psi_blocks(pair, f, x, np.array([0.0, delta]), **kw)[0] / delta
    return float(pair.psi.inverse(val))


def g_ps(f, x, delta, p=1.0, s=2.0, **kw):
    """{sum_{k=1}^{[pi/delta]} ((1/(k delta)) int_{(k-1)delta}^{k delta} |phi_x|^p)^(s/p)}^(1/s)."""
    if not s > p >= 1:
        raise ValueError("need s > p >= 1")
    avg = _gabisonia_averages(f, x, delta, p, **kw)
    return float(np.sum(avg ** (s / p)) ** (1.0 / s))


def g_p_psi(pair, f, x, delta, p=1.0, **kw):
    """Psi^{-1}{sum_{k=1}^{[pi/delta]} Psi[((1/(k delta)) int_{block k} |phi_x|^p)^(1/p)]}."""
    avg = _gabisonia_averages(f, x, delta, p, **kw)
    return float(pair.psi.inverse(np.sum(pair.psi(avg ** (1.0 / p)))))


def _fractions(n_max):
    """Sorted unique j/m for 1 <= j <= m <= n_max + 1, with the smallest m
    producing each value."""
    m = np.repeat(np.arange(1, n_max + 2), np.arange(1, n_max + 2))
    j = np.concatenate([np.arange(1, k + 1) for k in range(1, n_max + 2)])
    r = j / m
    order = np.lexsort((m, r))
    r, m = r[order], m[order]
    first = np.r_[True, r[1:] != r[:-1]]
    return r[first], m[first]


def m_profile(pair, f, x, n_max, **kw):
    """M_n = max over 0 <= k <= n' <= n of the Psi-average over (0, pi(k+1)/(n'+1)),
    returned for every n = 0..n_max."""
    r, m = _fractions(n_max)
    deltas = math.pi * r
    edges = np.r_[0.0, deltas]
    kw.setdefault("nodes", 8)
    pieces = psi_blocks(pair, f, x, edges, **kw)
    averages = np.cumsum(pieces) / deltas
    best = np.zeros(n_max + 2)
    np.maximum.at(best, m, averages)
    return np.maximum.accumulate(best[1:])


def m_of_x(pair, f, x, n_max, **kw):
    """sup over 0 <= k <= n <= n_max of (n+1)/(pi(k+1)) int_0^{pi(k+1)/(n+1)} Psi(|phi_x|)."""
    return float(m_profile(pair, f, x, n_max, **kw)[-1])


@dataclass
class CharacteristicProfile:
    x: float
    delta_grid: list = field(default_factory=list)
    values: list = field(default_factory=list)


def partition_characteristics(pair, f, x, n, inv_atol=1e-12, **kw):
    """w_1, w_Psi, G_{1,2}, G_{1,Psi} at delta = pi/(n+1) from one pass of
    block integrals, plus the blocks themselves for reuse."""
    part = Partition(n)
    edges = part.edges
    delta = part.delta
    a = abs_blocks(f, x, edges, **kw)
    ps = psi_blocks(pair, f, x, edges, **kw)
    k = np.arange(1, n + 2)
    avg = a / (k * delta)
    return {
        "delta": delta,
        "w1": float(a[0] / delta),
        "wpsi": float(pair.psi.inverse(ps[0] / delta, atol=inv_atol)),
        "g12": float(np.sqrt(np.sum(avg ** 2))),
        "g1psi": float(pair.psi.inverse(np.sum(pair.psi(avg)), atol=inv_atol)),
        "abs_blocks": a,
        "psi_blocks": ps,
    }


def profile(pair, f, x, n_grid, **kw):
    """Characteristics over delta = pi/(n+1) for n in ``n_grid`` (decreasing delta)."""
    prof = CharacteristicProfile(x)
    n_grid = sorted(n_grid)
    m_run = m_profile(pair, f, x, max(n_grid), **kw)
    for n in n_grid:
        c = partition_characteristics(pair, f, x, n, **kw)
        prof.delta_grid.append(c["delta"])
        prof.values.append({"n": n, "w_p": c["w1"], "w_psi": c["wpsi"], "G_ps": c["g12"],
                            "G_pPsi": c["g1psi"], "M": float(m_run[n])})
    return prof
