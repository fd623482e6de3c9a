"""Periodic test functions, Fourier coefficients, partial sums and phi_x.

Coefficients follow the real convention
    Sf(x) = a0/2 + sum_k (a_k cos kx + b_k sin kx),
    a_k = (1/pi) int f(x) cos kx dx,  b_k = (1/pi) int f(x) sin kx dx.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .quadrature import gauss_legendre

TWO_PI = 2.0 * math.pi
MAX_COEFFICIENTS = 2 ** 14


class Label(str, Enum):
    LPSI = "lpsi_point"
    NON_LPSI = "non_lpsi_point"


@dataclass(frozen=True)
class Discontinuity:
    point: float
    left: float
    right: float
    value: float


@dataclass(frozen=True)
class LabeledPoint:
    x: float
    label: Label
    reason: str


@dataclass(frozen=True)
class FourierCoefficients:
    a0: float
    a: np.ndarray  # a[k-1] = a_k, k = 1..max_index
    b: np.ndarray

    @property
    def max_index(self):
        return len(self.a)

    def truncate(self, n):
        return FourierCoefficients(self.a0, self.a[:n], self.b[:n])


def wrap(x):
    """Reduce to [-pi, pi); points already inside are returned unchanged."""
    x = np.asarray(x, dtype=float)
    inside = (x >= -math.pi) & (x < math.pi)
    return np.where(inside, x, np.mod(x + math.pi, TWO_PI) - math.pi)


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """A 2pi-periodic function given by its restriction to [-pi, pi).

    ``kinks`` are continuity points where the derivative jumps and
    ``quad_breaks`` are extra split points for coefficient quadrature;
    both only steer quadrature.
    """

    id: str
    base: Callable[[np.ndarray], np.ndarray]
    analytic: Callable[[int], FourierCoefficients] | None = None
    discontinuities: tuple[Discontinuity, ...] = ()
    labeled_points: tuple[LabeledPoint, ...] = ()
    kinks: tuple[float, ...] = ()
    quad_breaks: tuple[float, ...] = ()
    parity: str | None = None
    description: str = ""
    _coef_cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __call__(self, x):
        return self.base(wrap(x))

    @property
    def singular_points(self):
        return tuple(d.point for d in self.discontinuities) + self.kinks


# -- coefficients ---------------------------------------------------------

def numeric_coefficients(f, n, nodes=64):
    """Composite Gauss-Legendre coefficients, panels split at every listed
    singular point and kept narrow enough to resolve cos(nx)."""
    cuts = [-math.pi, math.pi, *f.singular_points, *f.quad_breaks]
    cuts = np.unique(np.r_[wrap(np.array(cuts)), math.pi])
    if f.parity is not None:
        # integrate over [0, pi] and double
        cuts = np.unique(np.r_[0.0, cuts[cuts >= 0]])
    width = min(math.pi / 8, 20.0 / max(n, 1))
    lo, hi = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = max(1, int(math.ceil((b - a) / width)))
        e = np.linspace(a, b, m + 1)
        lo.append(e[:-1])
        hi.append(e[1:])
    lo, hi = np.concatenate(lo), np.concatenate(hi)
    x, w = gauss_legendre(nodes)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    fw = f.base(t) * wt / math.pi
    if f.parity is not None:
        fw = 2.0 * fw
    a0 = float(fw.sum()) if f.parity != "odd" else 0.0
    a = np.zeros(n)
    b = np.zeros(n)
    chunk = max(1, 2 ** 24 // max(t.size, 1))
    for start in range(0, n, chunk):
        k = np.arange(start + 1, min(n, start + chunk) + 1, dtype=float)
        arg = np.outer(k, t)
        if f.parity != "odd":
            a[start:start + k.size] = np.cos(arg) @ fw
        if f.parity != "even":
            b[start:start + k.size] = np.sin(arg) @ fw
    return FourierCoefficients(a0, a, b)


def coefficients(f, n, method="auto"):
    """Coefficients up to index n (analytic when available, cached)."""
    if n < 0 or n > MAX_COEFFICIENTS:
        raise ValueError(f"coefficient index {n} outside [0, {MAX_COEFFICIENTS}]")
    if method == "auto":
        method = "analytic" if f.analytic is not None else "numeric"
    for (m, cached_n), c in list(f._coef_cache.items()):
        if m == method and cached_n >= n:
            return c.truncate(n)
    c = f.analytic(n) if method == "analytic" else numeric_coefficients(f, n)
    with f._lock:
        f._coef_cache[(method, n)] = c
    return c


def partial_sums(c, x, nu_max=None):
    """S_0 f(x), ..., S_nu_max f(x) as an array."""
    nu_max = c.max_index if nu_max is None else nu_max
    if nu_max > c.max_index:
        raise ValueError(f"partial sum order {nu_max} exceeds max_index {c.max_index}")
    k = np.arange(1, nu_max + 1, dtype=float)
    terms = c.a[:nu_max] * np.cos(k * x) + c.b[:nu_max] * np.sin(k * x)
    return 0.5 * c.a0 + np.concatenate([[0.0], np.cumsum(terms)])


def partial_sum(c, nu, x):
    """S_nu f(x) = a0/2 + sum_{k<=nu} (a_k cos kx + b_k sin kx)."""
    return float(partial_sums(c, x, nu)[-1])


def phi_x(f, x, t):
    """Symmetric difference f(x+t) + f(x-t) - 2 f(x)."""
    t = np.asarray(t, dtype=float)
    return f(x + t) + f(x - t) - 2.0 * f(np.float64(x))


# -- corpus ---------------------------------------------------------------

def _coef_from_arrays(a0, a, b):
    return FourierCoefficients(float(a0), np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def _odd(k):
    return (k.astype(np.int64) % 2) == 1


def _constant(c=1.0):
    def analytic(n):
        return _coef_from_arrays(2 * c, np.zeros(n), np.zeros(n))

    pts = (LabeledPoint(0.0, Label.LPSI, "constant: phi_x vanishes"),
           LabeledPoint(1.0, Label.LPSI, "constant: phi_x vanishes"))
    return PeriodicFunction("const", lambda y: np.full_like(y, c, dtype=float), analytic,
                            labeled_points=pts, description=f"f = {c:g}")


def _cos3():
    def analytic(n):
        a = np.zeros(n)
        if n >= 3:
            a[2] = 1.0
        return _coef_from_arrays(0.0, a, np.zeros(n))

    pts = (LabeledPoint(0.0, Label.LPSI, "smooth function, continuity point"),
           LabeledPoint(math.pi / 3, Label.LPSI, "smooth function, continuity point"))
    return PeriodicFunction("cos3", lambda y: np.cos(3 * y), analytic, labeled_points=pts,
                            description="cos 3x")


def _square():
    def base(y):
        return np.where(y == -math.pi, 0.0, np.sign(y))

    def analytic(n):
        k = np.arange(1, n + 1, dtype=float)
        b = np.where(_odd(k), 4.0 / (math.pi * k), 0.0)
        return _coef_from_arrays(0.0, np.zeros(n), b)

    disc = (Discontinuity(0.0, -1.0, 1.0, 0.0), Discontinuity(-math.pi, 1.0, -1.0, 0.0))
    pts = (LabeledPoint(math.pi / 2, Label.LPSI, "continuity point"),
           LabeledPoint(0.0, Label.LPSI, "symmetric jump with midpoint value: phi_0 = 0"))
    return PeriodicFunction("square", base, analytic, disc, pts, description="sign(x)")


def _step():
    def base(y):
        return np.where(y >= 0.0, 1.0, 0.0)

    def analytic(n):
        k = np.arange(1, n + 1, dtype=float)
        b = np.where(_odd(k), 2.0 / (math.pi * k), 0.0)
        return _coef_from_arrays(1.0, np.zeros(n), b)

    disc = (Discontinuity(0.0, 0.0, 1.0, 1.0), Discontinuity(-math.pi, 1.0, 0.0, 0.0))
    pts = (LabeledPoint(0.0, Label.NON_LPSI,
                        "f(0)=1 is the right limit, not the midpoint: |phi_0(t)| = 1 for 0<t<pi"),
           LabeledPoint(math.pi / 2, Label.LPSI, "continuity point"))
    return PeriodicFunction("step", base, analytic, disc, pts, description="indicator of [0, pi)")


def _sawtooth():
    def base(y):
        return np.where(y == -math.pi, 0.0, y / math.pi)

    def analytic(n):
        k = np.arange(1, n + 1, dtype=float)
        b = 2.0 * np.where(_odd(k), 1.0, -1.0) / (math.pi * k)
        return _coef_from_arrays(0.0, np.zeros(n), b)

    disc = (Discontinuity(-math.pi, 1.0, -1.0, 0.0),)
    pts = (LabeledPoint(math.pi / 3, Label.LPSI, "continuity point"),
           LabeledPoint(math.pi, Label.LPSI, "symmetric jump with midpoint value: phi_pi = 0"))
    return PeriodicFunction("sawtooth", base, analytic, disc, pts, description="x/pi")


def _cusp():
    def analytic(n):
        k = np.arange(1, n + 1, dtype=float)
        a = np.where(_odd(k), -4.0 / (math.pi * k ** 2), 0.0)
        return _coef_from_arrays(math.pi, a, np.zeros(n))

    pts = (LabeledPoint(0.0, Label.LPSI, "continuous cusp: phi_0(t) = 2t"),
           LabeledPoint(1.0, Label.LPSI, "continuity point"))
    return PeriodicFunction("cusp", np.abs, analytic, (), pts, kinks=(0.0, -math.pi),
                            description="|x|")


OSCILLATOR_CUTOFF = 3e-4


def _oscillator():
    def base(y):
        safe = np.where(y == 0.0, 1.0, y)
        return np.where(y == 0.0, 0.0, y * np.sin(1.0 / safe))

    # zeros of sin(1/x) down to the cutoff; |f| <= |x| bounds the rest
    j = np.arange(1, int(1.0 / (math.pi * OSCILLATOR_CUTOFF)) + 1)
    zeros = 1.0 / (math.pi * j)
    breaks = tuple(np.r_[zeros, -zeros])

    pts = (LabeledPoint(0.0, Label.LPSI, "continuous at 0 with |phi_0(t)| <= 2t"),
           LabeledPoint(1.0, Label.LPSI, "continuity point"))
    return PeriodicFunction("oscillator", base, None, (), pts, quad_breaks=breaks, parity="even",
                            description="x sin(1/x), bounded and not of bounded variation")


SPIKE_COUNT = 14


def spike_layout(count=SPIKE_COUNT):
    """Heights e^j on [w_j, 2 w_j) with w_j = e^-j / j^3, j = 1..count.

    Spike j has mass j^-3 and Psi-mass about j^-2 (Psi(h) ~ h log h), so the
    untruncated series is in L log L; its L^p mass sum_j j^-3 e^((p-1) j)
    diverges for every p > 1.
    """
    j = np.arange(1, count + 1, dtype=float)
    heights = np.exp(j)
    widths = np.exp(-j) / j ** 3
    return heights, widths, widths, 2.0 * widths


def spike_series_masses(count, p):
    """(log sum_{j<=count} w_j h_j^p, sum_{j<=count} w_j Psi(h_j)) for the
    untruncated layout and the exp-pair Psi, computed without overflow."""
    j = np.arange(1, count + 1, dtype=float)
    log_terms = (p - 1.0) * j - 3.0 * np.log(j)
    log_lp = float(np.logaddexp.reduce(log_terms))
    # w Psi(h) = j^-3 Psi(h)/h,  Psi(h)/h = (1 + 1/h) log1p(h) - 1
    log1p_h = j + np.log1p(np.exp(-j))
    psi_mass = float(np.sum(j ** -3.0 * ((1.0 + np.exp(-j)) * log1p_h - 1.0)))
    return log_lp, psi_mass


def _spikes():
    heights, widths, left, right = spike_layout()

    def base(y):
        idx = np.searchsorted(-left, -y, side="left")  # left is decreasing
        # candidate spike: largest left endpoint <= y
        cand = np.clip(idx, 0, len(left) - 1)
        inside = (y >= left[cand]) & (y < right[cand])
        return np.where(inside, heights[cand], 0.0)

    def analytic(n):
        k = np.arange(1, n + 1, dtype=float)[:, None]
        centre = 0.5 * (left + right)[None, :]
        mass = (heights * widths)[None, :]
        half = 0.5 * k * widths[None, :]
        sinc = np.sinc(half / math.pi)
        a = (mass * sinc * np.cos(k * centre)).sum(axis=1) / math.pi
        b = (mass * sinc * np.sin(k * centre)).sum(axis=1) / math.pi
        return _coef_from_arrays((heights * widths).sum() / math.pi, a, b)

    disc = tuple(Discontinuity(float(l), 0.0, float(h), float(h)) for l, h in zip(left, heights)) + \
        tuple(Discontinuity(float(r), float(h), 0.0, 0.0) for r, h in zip(right, heights))
    pts = (LabeledPoint(-math.pi / 2, Label.LPSI, "f vanishes near the point"),
           LabeledPoint(2.0, Label.LPSI, "f vanishes near the point"))
    return PeriodicFunction("spikes", base, analytic, disc, pts,
                            description=f"{SPIKE_COUNT} rectangular spikes accumulating at 0+")


def from_samples(path, fn_id=None):
    """Function sampled on a uniform grid over [-pi, pi), linearly
    interpolated (periodically).  Approximate by construction."""
    data = np.loadtxt(path, ndmin=2)
    xs, ys = data[:, 0].astype(float), data[:, 1].astype(float)
    h = np.diff(xs)
    if xs.size < 2 or not np.allclose(h, h[0], rtol=1e-9, atol=1e-12):
        raise ValueError(f"{path}: samples must lie on a uniform grid")
    xp = np.r_[xs, xs[0] + TWO_PI]
    yp = np.r_[ys, ys[0]]

    def base(y):
        y = np.where(y < xs[0], y + TWO_PI, y)
        return np.interp(y, xp, yp)

    return PeriodicFunction(fn_id or f"table:{path}", base, None, (), (),
                            kinks=tuple(wrap(xs)), description="sampled table (approximate)")


_BUILDERS = {
    "const": _constant,
    "cos3": _cos3,
    "square": _square,
    "step": _step,
    "sawtooth": _sawtooth,
    "cusp": _cusp,
    "oscillator": _oscillator,
    "spikes": _spikes,
}
CORPUS_IDS = tuple(_BUILDERS)
_corpus: dict[str, PeriodicFunction] = {}
_corpus_lock = threading.Lock()


def get_function(fn_id):
    """Corpus member by id (shared instance), or ``table:<path>``."""
    if fn_id.startswith("table:"):
        return from_samples(fn_id.split(":", 1)[1], fn_id)
    if fn_id not in _BUILDERS:
        raise KeyError(f"unknown function id {fn_id!r}")
    with _corpus_lock:
        if fn_id not in _corpus:
            _corpus[fn_id] = _BUILDERS[fn_id]()
        return _corpus[fn_id]
