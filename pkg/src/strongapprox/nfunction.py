"""N-functions, complementary pairs and the structural checks on them.

An N-function is stored through its left derivative ``p``; the built-in
kinds also carry closed forms for the value, which are used instead of
quadrature.  All evaluators accept scalars or numpy arrays and act on |u|.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np

from .quadrature import bisect_increasing, grow_bracket, simpson

DOMAIN_CAP = 700.0
_SERIES_CUT = 0.1


class NFunctionOverflow(OverflowError):
    """Raised when an exponential-kind value exceeds the representable cap.

    ``log_value`` holds log(Phi(u)) for the offending arguments so callers
    can continue in the log domain.
    """

    def __init__(self, message, log_value):
        super().__init__(message)
        self.log_value = log_value


class BracketError(ValueError):
    pass


class Kind(str, Enum):
    EXP = "closed_form_exp"
    EXP_CONJUGATE = "closed_form_exp_conjugate"
    POWER = "closed_form_power"
    FROM_DERIVATIVE = "from_derivative"


# Taylor coefficients: e^u - u - 1 = sum_{k>=2} u^k/k!,
# (1+v)log(1+v) - v = sum_{k>=2} (-1)^k v^k/(k(k-1)).
_EXP_SERIES = np.array([1.0 / math.factorial(k) for k in range(2, 19)])
_XLOGX_SERIES = np.array([(-1.0) ** k / (k * (k - 1)) for k in range(2, 19)])


def _horner_sq(coefs, u):
    # u^2 * (c0 + c1 u + c2 u^2 + ...)
    acc = np.zeros_like(u)
    for c in coefs[::-1]:
        acc = acc * u + c
    return acc * u * u


def _exp_phi(u):
    u = np.abs(np.asarray(u, dtype=float))
    small = u < _SERIES_CUT
    with np.errstate(over="ignore"):
        out = np.where(small, _horner_sq(_EXP_SERIES, np.where(small, u, 0.0)),
                       np.expm1(np.where(small, 1.0, u)) - u)
    return out


def _exp_log_phi(u):
    u = np.abs(np.asarray(u, dtype=float))
    big = u > DOMAIN_CAP
    safe = np.where(big, 1.0, u)
    with np.errstate(divide="ignore"):
        direct = np.log(_exp_phi(safe))
    asym = u + np.log1p(-(1.0 + u) * np.exp(-np.where(big, u, DOMAIN_CAP)))
    return np.where(big, asym, direct)


def _xlogx_psi(v):
    v = np.abs(np.asarray(v, dtype=float))
    small = v < _SERIES_CUT
    vv = np.where(small, 1.0, v)
    return np.where(small, _horner_sq(_XLOGX_SERIES, np.where(small, v, 0.0)),
                    (1.0 + vv) * np.log1p(vv) - vv)


@dataclass(frozen=True, eq=False)
class NFunction:
    """An N-function determined by its left derivative ``p_left`` on (0, inf).

    ``alpha`` is the exponent of the power kind; ``domain_cap`` is the largest
    argument the exponential kind evaluates directly before switching to
    log-domain arithmetic.
    """

    kind: Kind
    p_left: Callable[[np.ndarray], np.ndarray]
    alpha: float | None = None
    domain_cap: float = DOMAIN_CAP
    name: str = ""
    _memo: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __call__(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        if self.kind is Kind.EXP:
            if np.any(u > self.domain_cap):
                raise NFunctionOverflow(
                    f"{self.name or 'Phi'}: argument beyond domain cap {self.domain_cap}",
                    _exp_log_phi(u))
            return _exp_phi(u)
        if self.kind is Kind.EXP_CONJUGATE:
            return _xlogx_psi(u)
        if self.kind is Kind.POWER:
            return u ** self.alpha
        return self._quadrature_value(u)

    def _quadrature_value(self, u):
        flat = u.ravel()
        out = np.empty_like(flat)
        for i, ui in enumerate(flat):
            key = float(ui)
            val = self._memo.get(key)
            if val is None:
                val = simpson(self.p_left, 0.0, key) if key > 0 else 0.0
                with self._lock:
                    self._memo.setdefault(key, val)
            out[i] = val
        return out.reshape(u.shape)

    def log_value(self, u):
        """log of the value; finite for every u > 0, also beyond ``domain_cap``."""
        u = np.abs(np.asarray(u, dtype=float))
        if self.kind is Kind.EXP:
            return _exp_log_phi(u)
        with np.errstate(divide="ignore"):
            return np.log(self(u))

    def derivative(self, t):
        """Left derivative at |t| (zero at the origin)."""
        t = np.abs(np.asarray(t, dtype=float))
        return np.where(t > 0, self.p_left(np.where(t > 0, t, 1.0)), 0.0)

    def inverse(self, y, atol=1e-12):
        """Nonnegative u with value(u) = y, by bracketing and bisection."""
        y = np.asarray(y, dtype=float)
        if np.any(y < 0):
            raise ValueError("inverse of an N-function needs y >= 0")
        if self.kind is Kind.POWER:
            return y ** (1.0 / self.alpha)
        if self.kind is Kind.EXP:
            with np.errstate(divide="ignore"):
                return self.inverse_log(np.log(y), atol=atol)
        hi = grow_bracket(self, y)
        u = bisect_increasing(self, y, 0.0, hi, atol=atol)
        return np.where(y == 0, 0.0, u)

    def inverse_log(self, log_y, atol=1e-12):
        """Inverse from log(y); the overflow-safe path of the exponential kind."""
        log_y = np.asarray(log_y, dtype=float)
        if self.kind is not Kind.EXP:
            return self.inverse(np.exp(log_y), atol=atol)
        zero = np.isneginf(log_y)
        target = np.where(zero, 0.0, log_y)
        hi = grow_bracket(self.log_value, target)
        u = bisect_increasing(self.log_value, target, 0.0, hi, atol=atol)
        return np.where(zero, 0.0, u)


def _expm1_pos(t):
    return np.expm1(np.asarray(t, dtype=float))


def _log1p_pos(s):
    return np.log1p(np.asarray(s, dtype=float))


def left_inverse(p, s, atol=1e-13):
    """q(s) = inf{t > 0 : p(t) > s} for a nondecreasing p."""
    s = np.asarray(s, dtype=float)
    hi = grow_bracket(lambda t: np.where(p(t) > s, np.inf, -np.inf), np.zeros_like(s))
    return np.where(s > 0, bisect_increasing(p, s, 0.0, hi, atol=atol), 0.0)


@dataclass(frozen=True, eq=False)
class ComplementaryPair:
    """A (Phi, Psi) pair with q the left derivative of Psi.

    ``exact`` is True when Psi is the Legendre conjugate of Phi (so q is
    the left inverse of p); the power pair t^a, t^(a/(a-1)) is only
    complementary up to constants and has ``exact=False``.
    ``declared_shape`` records whether p and q are convex or concave.
    """

    pair_id: str
    phi: NFunction
    psi: NFunction
    q_left: Callable[[np.ndarray], np.ndarray]
    exact: bool = True
    declared_shape: tuple[str | None, str | None] = (None, None)

    @cached_property
    def condition_flags(self):
        return check_conditions(self).flags


def exp_pair():
    phi = NFunction(Kind.EXP, _expm1_pos, name="e^u-u-1")
    psi = NFunction(Kind.EXP_CONJUGATE, _log1p_pos, name="(1+v)log(1+v)-v")
    return ComplementaryPair("exp", phi, psi, _log1p_pos, exact=True,
                             declared_shape=("convex", "concave"))


def power_pair(alpha):
    """Phi(t) = t^alpha with Psi(t) = t^(alpha/(alpha-1))."""
    alpha = float(alpha)
    if alpha <= 1:
        raise ValueError("power pair needs alpha > 1")
    beta = alpha / (alpha - 1.0)
    phi = NFunction(Kind.POWER, lambda t: alpha * np.asarray(t) ** (alpha - 1), alpha=alpha,
                    name=f"t^{alpha:g}")
    psi = NFunction(Kind.POWER, lambda t: beta * np.asarray(t) ** (beta - 1), alpha=beta,
                    name=f"t^{beta:g}")

    def shape(e):
        return "convex" if e >= 2 else "concave"

    return ComplementaryPair(f"power:{alpha:g}", phi, psi, psi.p_left, exact=False,
                             declared_shape=(shape(alpha), shape(beta)))


def pair_from_derivative(p, pair_id="custom", declared_shape=(None, None)):
    """Exact complementary pair generated by a left derivative p."""
    def q(s):
        return left_inverse(p, s)

    phi = NFunction(Kind.FROM_DERIVATIVE, p, name=f"{pair_id}:phi")
    psi = NFunction(Kind.FROM_DERIVATIVE, q, name=f"{pair_id}:psi")
    return ComplementaryPair(pair_id, phi, psi, q, exact=True, declared_shape=declared_shape)


def load_pair_file(path):
    """Pair from a two-column (t, p(t)) text file with strictly increasing t.

    p is linearly interpolated and extended beyond the last sample with
    the slope of the final segment; (0, 0) is prepended when missing.
    """
    data = np.loadtxt(path, ndmin=2)
    t, pv = data[:, 0].astype(float), data[:, 1].astype(float)
    if np.any(np.diff(t) <= 0):
        raise ValueError(f"{path}: t column must be strictly increasing")
    if np.any(np.diff(pv) < 0) or np.any(pv[t > 0] <= 0):
        raise ValueError(f"{path}: p must be positive and nondecreasing")
    if t[0] > 0:
        t, pv = np.r_[0.0, t], np.r_[0.0, pv]
    elif t[0] < 0 or pv[0] != 0:
        raise ValueError(f"{path}: table must start at t = 0 with p(0) = 0")
    slope = (pv[-1] - pv[-2]) / (t[-1] - t[-2])
    if slope <= 0:
        raise ValueError(f"{path}: final segment must be increasing")

    def p(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= t[-1], np.interp(x, t, pv), pv[-1] + slope * (x - t[-1]))

    return pair_from_derivative(p, pair_id=f"file:{path}")


def get_pair(pair_id):
    """Resolve "exp", "power:<alpha>" or "file:<path>"."""
    if pair_id == "exp":
        return exp_pair()
    if pair_id.startswith("power:"):
        return power_pair(float(pair_id.split(":", 1)[1]))
    if pair_id.startswith("file:"):
        return load_pair_file(pair_id.split(":", 1)[1])
    raise KeyError(f"unknown pair id {pair_id!r}")


# -- operations -------------------------------------------------------------

def eval_phi(nf, u):
    return nf(u)


def eval_psi(pair, v):
    return pair.psi(v)


def inverse_phi(nf, y, atol=1e-12):
    return nf.inverse(y, atol=atol)


def inverse_psi(pair, y, atol=1e-12):
    return pair.psi.inverse(y, atol=atol)


def legendre_conjugate(nf, v, u_max=64.0):
    """sup{u|v| - Phi(u) : 0 <= u <= u_max}, via the root of p(u) = |v|."""
    v = np.abs(np.asarray(v, dtype=float))
    if np.any(nf.derivative(u_max) <= v):
        raise BracketError(f"p(u_max={u_max}) does not exceed |v|; enlarge u_max")
    u = bisect_increasing(nf.derivative, v, 0.0, u_max, atol=1e-15)
    return np.where(v > 0, u * v - nf(u), 0.0)


def young_gap(pair, u, v):
    """Phi(u) + Psi(v) - |uv|; nonnegative by the Young inequality."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return pair.phi(u) + pair.psi(v) - np.abs(u * v)


def lemma1_ratio(pair, u, n):
    """Psi(u/(n+1)) / (Psi(1/(n+1)) Psi(u)), broadcast over u and n."""
    u = np.asarray(u, dtype=float)
    m = np.asarray(n, dtype=float) + 1.0
    psi = pair.psi
    return psi(u / m) / (psi(1.0 / m) * psi(u))


@dataclass(frozen=True)
class ConditionGrid:
    u_min: float = 2.0 ** -20
    u_max: float = 2.0 ** 6
    points: int = 241
    u_small: float = 1.0
    equiv_ratio_max: float = 100.0
    series_terms: int = 100_000
    series_eps: float = 0.05
    rtol: float = 1e-10
    series_override: bool | None = None


@dataclass
class ConditionReport:
    pair_id: str
    flags: dict
    diagnostics: dict

    @property
    def all_true(self):
        return all(self.flags.values())


def _nondecreasing(v, rtol):
    return bool(np.all(np.diff(v) >= -rtol * np.abs(v[:-1])))


def _slopes(t, y):
    return np.diff(y) / np.diff(t)


def _shape(t, y, rtol):
    s = _slopes(t, y)
    scale = np.abs(s[:-1]) + np.abs(s[1:]) + 1e-300
    d = np.diff(s)
    return bool(np.all(d >= -rtol * scale * 1e3)), bool(np.all(d <= rtol * scale * 1e3))


def series_heuristic(q, terms=100_000, eps=0.05):
    """Partial sum of sum_k q(1/(k+1))/(k+1)^(1/2) and the log-log slope of
    the terms over the last decade; convergent when slope <= -(1+eps)."""
    k1 = np.arange(1, terms + 1, dtype=float)
    a = q(1.0 / k1) / np.sqrt(k1)
    tail = k1 >= terms / 10
    slope = float(np.polyfit(np.log(k1[tail]), np.log(a[tail]), 1)[0])
    return float(a.sum()), slope, slope <= -(1.0 + eps)


def check_conditions(pair, grid=ConditionGrid()):
    """Evaluate the hypotheses of the main estimate on a geometric grid."""
    t = np.geomspace(grid.u_min, grid.u_max, grid.points)
    psi_t = pair.psi(t)
    q = pair.q_left
    qt = q(t)
    p_t = pair.phi.derivative(t)
    flags, diag = {}, {}

    flags["psi_over_x_nondecreasing"] = _nondecreasing(psi_t / t, grid.rtol)
    flags["psi_over_x2_nonincreasing"] = _nondecreasing(-psi_t / t ** 2, grid.rtol)
    p_convex, p_concave = _shape(t, p_t, grid.rtol)
    q_convex, q_concave = _shape(t, qt, grid.rtol)
    flags["p_convex"] = p_convex
    flags["phi_in_class_F"] = p_convex or p_concave
    flags["psi_in_class_F"] = q_convex or q_concave
    flags["q_strictly_increasing"] = bool(np.all(np.diff(qt) > 0))
    flags["q_over_s_nonincreasing"] = _nondecreasing(-qt / t, grid.rtol)
    jump = np.abs(q(t * (1 + 1e-9)) - qt)
    diag["q_max_jump"] = float(jump.max())
    flags["q_continuous"] = bool(np.all(jump <= 1e-6 * (1.0 + np.abs(qt))))

    partial, slope, converges = series_heuristic(q, grid.series_terms, grid.series_eps)
    diag["series_partial_sum"] = partial
    diag["series_tail_slope"] = slope
    if grid.series_override is not None:
        converges = grid.series_override
        diag["series_override"] = grid.series_override
    flags["series_converges_heuristic"] = converges

    ts = t[t <= grid.u_small]
    ratio = pair.psi(ts) / ts ** 2
    c1, c2 = float(ratio.min()), float(ratio.max())
    diag["psi_u2_c1"], diag["psi_u2_c2"] = c1, c2
    flags["psi_equiv_u2_small"] = bool(c1 > 0 and c2 / c1 <= grid.equiv_ratio_max)
    diag["declared_shape"] = pair.declared_shape
    diag["exact_conjugate"] = pair.exact
    return ConditionReport(pair.pair_id, flags, diag)


def is_convex_on(func, grid, tol=1e-12):
    """Midpoint convexity on every pair of grid points."""
    a, b = np.meshgrid(grid, grid)
    mid = func(0.5 * (a + b))
    avg = 0.5 * (func(a) + func(b))
    return bool(np.all(mid <= avg + tol * (1.0 + np.abs(avg))))
