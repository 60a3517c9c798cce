"""
Independent reference values: closed forms, quadrature and grid searches
that do not go through the convex solver.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar

from ..core.analytic import AnalyticView, LaurentOperatorFamily
from ..core.interpolation import InterpProblem, interp_norm, interp_objective
from ..core.sequences import SparseSeq
from ..core.spaces import weighted_lp_norm

logger = logging.getLogger(__name__)

POISSON_HALF_WIDTH = 12.0
POISSON_POINTS = 4001
PERIOD_GRID = 2001
PERIOD_TERMS = 50
LOG_FLOOR = 1e-300
REFINE_POINTS = 2001


# --- Weighted l^p couples ---

def oracle_stein_weiss(w0, w1, p: float, theta: float, x) -> float:
    """||x|| in l^p(w0^(1-theta) w1^theta)."""
    w = np.asarray(w0, dtype=float) ** (1.0 - theta) * np.asarray(w1, dtype=float) ** theta
    return float(weighted_lp_norm(np.abs(np.asarray(x, dtype=complex)), w, p))


def diagonal_placement(x, w0, w1, base: float = math.e) -> SparseSeq:
    """Coordinate i of x placed alone at index floor(log_b(w0_i / w1_i))."""
    x = np.asarray(x, dtype=complex)
    r = np.log(np.asarray(w0, dtype=float) / np.asarray(w1, dtype=float)) / math.log(base)
    out = {}
    for i in np.flatnonzero(x):
        k = int(math.floor(r[i] + 1e-12))
        blk = out.setdefault(k, np.zeros(x.size, dtype=complex))
        blk[i] = x[i]
    return SparseSeq(x.size, out)


# --- Hilbert couples with l^2 structures ---

@dataclass
class HilbertClosedForm:
    value: float
    mu: float
    seq: Optional[SparseSeq]


def _tail_window(theta: float, base: float) -> int:
    """Indices beyond which b^(-2 min(theta, 1-theta)|k|) < 1e-18."""
    rate = 2.0 * min(theta, 1.0 - theta) * math.log(base)
    return min(int(math.ceil(41.5 / rate)), 150)


def hilbert_closed_form(w0, w1, theta: float, x, base: float = math.e,
                        window: Optional[int] = None) -> HilbertClosedForm:
    """
    sup_mu ( sum_i |x_i|^2 / sum_k 1 / (mu q0_ki + (1-mu) q1_ki) )^(1/2),
    q^j_ki = (w^j_i b^{k(j-theta)})^2, over |k| <= window (None: effectively all k).
    With a finite window the optimal decomposition is returned as well.
    """
    x = np.asarray(x, dtype=complex)
    w0, w1 = np.asarray(w0, dtype=float), np.asarray(w1, dtype=float)
    N = _tail_window(theta, base) if window is None else int(window)
    ks = np.arange(-N, N + 1)[:, None]
    lb = math.log(base)
    with np.errstate(over="ignore"):
        q0 = (w0[None, :] * np.exp(-theta * lb * ks)) ** 2
        q1 = (w1[None, :] * np.exp((1.0 - theta) * lb * ks)) ** 2
    ax2 = np.abs(x) ** 2

    def inv_sum(mu):
        with np.errstate(over="ignore", divide="ignore"):
            return (1.0 / (mu * q0 + (1.0 - mu) * q1)).sum(axis=0)

    def g(mu):
        return float((ax2 / inv_sum(mu)).sum())

    if not np.any(ax2):
        return HilbertClosedForm(0.0, 0.5, SparseSeq.zeros(x.size))
    res = minimize_scalar(lambda m: -g(m), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    mu = float(res.x)
    for edge in (0.0, 1.0):
        if g(edge) > g(mu): mu = edge
    value = math.sqrt(g(mu))
    seq = None
    if window is not None:
        with np.errstate(over="ignore", divide="ignore"):
            r = 1.0 / (mu * q0 + (1.0 - mu) * q1)
        seq = SparseSeq.from_dense(-N, x[None, :] * r / r.sum(axis=0)[None, :])
    return HilbertClosedForm(value, mu, seq)


def hilbert_phi(u: float, mu: float, theta: float, base: float = math.e) -> float:
    """sum_k 1 / (mu b^{2 theta (u-k)} + (1-mu) b^{-2(1-theta)(u-k)}), 1-periodic in u."""
    N = _tail_window(theta, base)
    d = u - np.arange(-N, N + 1)
    lb = math.log(base)
    with np.errstate(over="ignore", divide="ignore"):
        return float((1.0 / (mu * np.exp(2 * theta * lb * d) + (1.0 - mu) * np.exp(-2 * (1.0 - theta) * lb * d))).sum())


def hilbert_stein_weiss_bounds(theta: float, base: float = math.e, grid: int = 1001) -> Tuple[float, float]:
    """
    (L, U) with L * SW <= ||x||_theta (infinite window, mu = 1/2) and the
    infinite-window norm <= U * SW, over a grid of fractional offsets.
    """
    us = np.linspace(0.0, 1.0, grid, endpoint=False)
    mus = np.linspace(0.01, 0.99, 99)
    half = np.array([hilbert_phi(u, 0.5, theta, base) for u in us])
    low = min(hilbert_phi(u, m, theta, base) for u in us[:: max(grid // 50, 1)] for m in mus)
    return 1.0 / math.sqrt(half.max()), 1.0 / math.sqrt(low)


# --- Poisson kernels of the strip 0 < Re z < 1 ---

def poisson_p0(s: float, u):
    return math.sin(math.pi * s) / (2.0 * (np.cosh(np.pi * np.asarray(u)) - math.cos(math.pi * s)))


def poisson_p1(s: float, u):
    return math.sin(math.pi * s) / (2.0 * (np.cosh(np.pi * np.asarray(u)) + math.cos(math.pi * s)))


def poisson_constants(theta: float, base: float = math.e) -> Tuple[float, float]:
    """
    rho_j = tau * max_t sum_m P_j(theta, t + m tau) / mass_j, tau = 2 pi / ln b,
    mass_0 = 1 - theta, mass_1 = theta.
    """
    tau = 2.0 * math.pi / math.log(base)
    ts = np.linspace(0.0, tau, PERIOD_GRID)[:, None] + tau * np.arange(-PERIOD_TERMS, PERIOD_TERMS + 1)[None, :]
    per0 = poisson_p0(theta, ts).sum(axis=1).max()
    per1 = poisson_p1(theta, ts).sum(axis=1).max()
    return float(tau * per0 / (1.0 - theta)), float(tau * per1 / theta)


def poisson_factor(seq: SparseSeq, theta: float, base: float = math.e) -> Tuple[np.ndarray, np.ndarray]:
    """
    Factors u, v with |x| <= u^(1-theta) v^theta for x = sum of seq, from the
    Poisson averages of log|f| on the two boundary lines of the strip.
    """
    view = AnalyticView(seq, theta, base)
    us = np.linspace(-POISSON_HALF_WIDTH, POISSON_HALF_WIDTH, POISSON_POINTS)
    ts = us * math.log(base)
    out = []
    for j, kernel in ((0, poisson_p0), (1, poisson_p1)):
        w = kernel(theta, us)
        mass = trapezoid(w, us)
        f = np.abs(view.boundary_function(float(j), ts))
        logf = np.log(np.maximum(f, LOG_FLOOR))
        out.append(np.exp(trapezoid(w[:, None] * logf, us, axis=0) / mass))
    return out[0], out[1]


# --- Torus quadrature ---

def fft_coefficients(samples: np.ndarray) -> np.ndarray:
    """c_k = (1/T) sum_r f(t_r) e^{-i k t_r}, t_r = 2 pi r / T, along axis 0."""
    samples = np.asarray(samples, dtype=complex)
    return np.fft.fft(samples, axis=0) / samples.shape[0]


def stein_fft_coeffs(fam: LaurentOperatorFamily, j: int, s: SparseSeq, nodes: int = 256) -> SparseSeq:
    """Fourier coefficients of t -> sum_k e^{ikt} T(j + it) x_k by sampling and FFT."""
    if s.is_zero(): return SparseSeq.zeros(fam.dim_out)
    lo, hi = s.support()
    ms = list(fam.coeffs)
    out_lo, out_hi = lo + ms[0], hi + ms[-1]
    width = out_hi - out_lo + 1
    T = max(nodes, 4 * width)
    ts = 2.0 * np.pi * np.arange(T) / T
    g = np.zeros((T, fam.dim_out), dtype=complex)
    for r, t in enumerate(ts):
        Tz = fam.eval_at(j + 1j * t)
        g[r] = sum(np.exp(1j * (k - out_lo) * t) * (Tz @ blk) for k, blk in s.entries.items())
    c = fft_coefficients(g)[:width]
    return SparseSeq.from_dense(out_lo, c)


# --- Search oracles ---

def grid_search_two_block(prob: InterpProblem, x: float, grid: Iterable[float], refine: int = 0) -> float:
    """
    min over c in grid of the objective of the decomposition (x - c at 0, c at 1), scalar x.
    The objective is convex in c, so each refinement re-grids one spacing either side of the best point.
    """
    grid = np.asarray(list(grid), dtype=float)
    for level in range(refine + 1):
        vals = np.array([interp_objective(prob, SparseSeq(1, {0: [x - c], 1: [c]})) for c in grid])
        i = int(np.argmin(vals))
        if level == refine or grid.size < 2:
            return float(vals[i])
        step = float(grid[1] - grid[0])
        grid = np.linspace(grid[i] - step, grid[i] + step, REFINE_POINTS)


def support_function_estimate(prob: InterpProblem, xstar, directions: Sequence[np.ndarray]) -> Tuple[float, int]:
    """
    max_d |<d, x*>| / ||d||_theta over the given directions. Each computed
    norm is an upper bound, so this is a lower estimate of the dual norm.
    """
    xstar = np.asarray(xstar, dtype=complex)
    best, arg = 0.0, -1
    for i, d in enumerate(directions):
        d = np.asarray(d, dtype=complex)
        if not np.any(d): continue
        nd = interp_norm(prob, d, SparseSeq.delta(d, 0), check_window=False).value
        if nd <= 0: continue
        val = abs(np.sum(d * xstar)) / nd
        if val > best: best, arg = val, i
    return best, arg
