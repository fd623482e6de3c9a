"""Strong means H_n^Phi, the right-hand side of the main estimate and the
Psi-domain chain of intermediate quantities used to bound it.

Conventions: Delta_k = (pi k/(n+1), pi (k+1)/(n+1)), A_k = int_{Delta_k} |phi_x|,
I_k = int_{Delta_k} Psi(|phi_x|) and P_k = I_0 + ... + I_k, so that
Psi(w_x f(pi(k+1)/(n+1))_Psi) = P_k (n+1) / (pi (k+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import Partition, abs_blocks, g_p_psi, psi_blocks
from .fourier import coefficients, partial_sums
from .nfunction import Kind, NFunctionOverflow


def deviations(f, x, n_max, coef=None):
    """|S_nu f(x) - f(x)| for nu = 0..n_max."""
    coef = coefficients(f, n_max) if coef is None else coef
    return np.abs(partial_sums(coef, x, n_max) - float(f(np.float64(x))))


def strong_means_from_deviations(phi, dev, atol=1e-12):
    """H_n^Phi for every n = 0..len(dev)-1 from the deviations, using the
    log domain when Phi values would overflow."""
    dev = np.asarray(dev, dtype=float)
    counts = np.arange(1, dev.size + 1, dtype=float)
    try:
        vals = phi(dev)
    except NFunctionOverflow:
        vals = None
    if vals is not None and np.all(np.isfinite(np.cumsum(vals))):
        return phi.inverse(np.cumsum(vals) / counts, atol=atol)
    logs = phi.log_value(dev)
    log_means = np.logaddexp.accumulate(logs) - np.log(counts)
    return phi.inverse_log(log_means, atol=atol)


def strong_mean(pair, f, x, n, coef=None):
    """Phi^{-1} of the average of Phi(|S_nu f(x) - f(x)|) over nu = 0..n."""
    return float(strong_means_from_deviations(pair.phi, deviations(f, x, n, coef))[n])


def strong_means(pair, f, x, n_values, coef=None, atol=1e-12):
    """strong_mean for several n from a single pass of partial sums."""
    n_values = np.asarray(n_values, dtype=int)
    h = strong_means_from_deviations(pair.phi, deviations(f, x, int(n_values.max()), coef), atol)
    return h[n_values]


def psi_prefix(pair, f, x, n, **kw):
    """P_k = int_0^{pi(k+1)/(n+1)} Psi(|phi_x|), k = 0..n."""
    return np.cumsum(psi_blocks(pair, f, x, Partition(n).edges, **kw))


def _psi_w(prefix, n):
    k1 = np.arange(1, n + 2, dtype=float)
    return prefix * (n + 1) / (math.pi * k1)


WEIGHTS = ("thm", "proof_k2", "proof_k32")


def rhs_inner(pair, prefix, n, variant="thm"):
    """The bracket of the main estimate before Psi^{-1}.

    ``thm``: sum_{k=0}^n q(1/(k+1)) (k+1)^(-1/2) Psi(w_k) as stated;
    ``proof_k2``: sum_{k=0}^{n-1} (k+1)^(-2) Psi(w_k), the target of the proof;
    ``proof_k32``: sum_{k=0}^{n} q(1/(k+1)) (k+1)^(-1) Psi(w_k), the
    (k+1)^(3/2)-normalized averages of the middle of the proof.
    All three add (n+1) Psi(1/(n+1)) Psi(w_x f(pi)_Psi).
    """
    psi_w = _psi_w(prefix, n)
    k1 = np.arange(1, n + 2, dtype=float)
    tail = (n + 1) * float(pair.psi(1.0 / (n + 1))) * psi_w[-1]
    if variant == "thm":
        weights = pair.q_left(1.0 / k1) / np.sqrt(k1)
    elif variant == "proof_k2":
        weights = np.where(k1 <= n, 1.0 / k1 ** 2, 0.0)
    elif variant == "proof_k32":
        weights = pair.q_left(1.0 / k1) / k1
    else:
        raise ValueError(f"unknown weight variant {variant!r}")
    return float(np.sum(weights * psi_w) + tail)


def theorem_rhs(pair, f, x, n, variant="thm", prefix=None, inv_atol=1e-12, **kw):
    """Psi^{-1} of the bracket; one pass of Psi-block integrals over (0, pi)."""
    prefix = psi_prefix(pair, f, x, n, **kw) if prefix is None else prefix
    return float(pair.psi.inverse(rhs_inner(pair, prefix, n, variant), atol=inv_atol))


def theorem_rhs_variants(pair, f, x, n, **kw):
    prefix = psi_prefix(pair, f, x, n, **kw)
    return {v: theorem_rhs(pair, f, x, n, v, prefix=prefix) for v in WEIGHTS}


@dataclass
class ChainRecord:
    """Quantities of the Psi-domain argument at one (x, n).

    psi_g            Psi[G_x f(pi/(n+1))_{1,Psi}] via blocks Delta_k (k = 0..n)
    psi_g_definition the same through the k = 1..[pi/delta] definition
    lemma_sum        sum_k Psi(1/(k+1)) Psi((n+1)/pi A_k)
    jensen_sum       sum_k Psi(1/(k+1)) (n+1)/pi I_k
    abel_sum         summation-by-parts form of jensen_sum
    mvt_bound        (n+1)/pi sum_{k<n} q(1/(k+1)) (k+1)^-2 P_k + (n+1)Psi(1/(n+1)) P_n/pi
    rhs_*            brackets of the three weight variants
    """

    n: int
    psi_g: float
    psi_g_definition: float
    lemma_sum: float
    jensen_sum: float
    abel_sum: float
    mvt_bound: float
    rhs_thm: float
    rhs_proof_k2: float
    rhs_proof_k32: float
    ratios: dict = field(default_factory=dict)

    @property
    def chain(self):
        return (self.psi_g, self.lemma_sum, self.mvt_bound, self.rhs_thm)


def _ratio(a, b):
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return a / b


def psi_domain_chain(pair, f, x, n, **kw):
    part = Partition(n)
    psi = pair.psi
    a = abs_blocks(f, x, part.edges, **kw)
    blocks = psi_blocks(pair, f, x, part.edges, **kw)
    prefix = np.cumsum(blocks)
    k1 = np.arange(1, n + 2, dtype=float)
    scale = (n + 1) / math.pi
    psi_k = psi(1.0 / k1)

    psi_g = float(np.sum(psi(scale * a / k1)))
    psi_g_def = float(psi(g_p_psi(pair, f, x, part.delta, **kw)))
    lemma_sum = float(np.sum(psi_k * psi(scale * a)))
    jensen_sum = float(np.sum(psi_k * scale * blocks))
    diffs = psi_k[:-1] - psi_k[1:]
    abel_sum = float(scale * np.sum(diffs * prefix[:-1]) + scale * psi_k[-1] * prefix[-1])
    mvt = float(scale * np.sum(pair.q_left(1.0 / k1[:-1]) / k1[:-1] ** 2 * prefix[:-1])
                + scale * psi_k[-1] * prefix[-1])
    rec = ChainRecord(n, psi_g, psi_g_def, lemma_sum, jensen_sum, abel_sum, mvt,
                      rhs_inner(pair, prefix, n, "thm"),
                      rhs_inner(pair, prefix, n, "proof_k2"),
                      rhs_inner(pair, prefix, n, "proof_k32"))
    rec.ratios = {
        "psi_g/lemma_sum": _ratio(psi_g, lemma_sum),
        "lemma_sum/jensen_sum": _ratio(lemma_sum, jensen_sum),
        "abel_sum/mvt_bound": _ratio(abel_sum, mvt),
        "mvt_bound/rhs_thm": _ratio(mvt, rec.rhs_thm),
        "psi_g/rhs_thm": _ratio(psi_g, rec.rhs_thm),
    }
    return rec


def safe_ratio(num, den, floor=0.0):
    """num/den with the convention 0/0 = 0; returns (value, flag)."""
    if den <= floor:
        if num <= floor:
            return 0.0, "zero_over_zero"
        return math.inf, "zero_denominator"
    return num / den, ""


def hn_vs_g_ratio(pair, f, x, n, **kw):
    """H_n^Phi f(x) / G_x f(pi/(n+1))_{1,Psi} (0 when both vanish)."""
    h = strong_mean(pair, f, x, n)
    g = g_p_psi(pair, f, x, math.pi / (n + 1), **kw)
    return safe_ratio(h, g)[0]


@dataclass
class StrongMeanSeries:
    fn_id: str
    x: float
    pair_id: str
    n_grid: list
    h_values: list
    g_values: list
    rhs_values: list


def strong_mean_series(pair, f, x, n_grid, **kw):
    n_grid = sorted(int(n) for n in n_grid)
    h = strong_means(pair, f, x, n_grid)
    g = [g_p_psi(pair, f, x, math.pi / (n + 1), **kw) for n in n_grid]
    rhs = [theorem_rhs(pair, f, x, n, **kw) for n in n_grid]
    return StrongMeanSeries(f.id, x, pair.pair_id, n_grid, [float(v) for v in h], g, rhs)


def direct_quadratic_mean(f, x, n, coef=None):
    """{(1/(n+1)) sum_nu (S_nu f(x) - f(x))^2}^(1/2) with explicit loops."""
    coef = coefficients(f, n) if coef is None else coef
    fx = float(f(np.float64(x)))
    total = 0.0
    s = 0.5 * coef.a0
    for nu in range(n + 1):
        if nu > 0:
            s += coef.a[nu - 1] * math.cos(nu * x) + coef.b[nu - 1] * math.sin(nu * x)
        total += (s - fx) ** 2
    return math.sqrt(total / (n + 1))


__all__ = [
    "Kind", "deviations", "strong_mean", "strong_means", "psi_prefix", "rhs_inner",
    "theorem_rhs", "theorem_rhs_variants", "psi_domain_chain", "ChainRecord",
    "hn_vs_g_ratio", "safe_ratio", "StrongMeanSeries", "strong_mean_series",
    "direct_quadratic_mean",
]
