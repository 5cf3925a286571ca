"""Generalized extreme value distribution: density, CDF, quantile threshold,
maximum likelihood fitting, and inverse-CDF sampling.

Parameterization: shape kappa, location mu, scale sigma > 0. For kappa away
from zero,

    F(x) = exp(-(1 + kappa*(x - mu)/sigma)**(-1/kappa))

on the support 1 + kappa*(x - mu)/sigma > 0; the kappa -> 0 limit is the
Gumbel law F(x) = exp(-exp(-(x - mu)/sigma)). |kappa| <= KAPPA_EPS selects
the Gumbel branch everywhere (pdf, cdf, quantiles) so the branches can never
disagree about one parameter value.

Fitting follows a two-stage scheme: the Gumbel score equations are solved
first for (mu, sigma), then the shape is estimated by maximizing the
likelihood in kappa alone with the location and scale held fixed. That
matches the classic sequential recipe but is not the joint maximum
likelihood estimate when the true shape is nonzero; pass refine=True to
polish all three parameters against the full likelihood.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

KAPPA_EPS = 1e-6

logger = logging.getLogger(__name__)

__all__ = [
    "KAPPA_EPS",
    "GevParams",
    "FitReport",
    "DegenerateDataError",
    "pdf",
    "cdf",
    "threshold_for_pf",
    "log_likelihood",
    "fit_gumbel_mle",
    "fit_gev_mle",
    "sample_gev",
]


class DegenerateDataError(ValueError):
    """Sample set cannot support a fit (too small or zero variance)."""


@dataclass(frozen=True)
class GevParams:
    """Shape, location, and scale of a generalized extreme value law."""

    kappa: float
    mu: float
    sigma: float

    def __post_init__(self) -> None:
        for name in ("kappa", "mu", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def is_gumbel(self) -> bool:
        return abs(self.kappa) <= KAPPA_EPS


@dataclass(frozen=True)
class FitReport:
    """Outcome of a maximum likelihood fit."""

    params: GevParams
    log_likelihood: float
    iterations: int
    converged: bool
    sample_count: int
    solver_tol: float


def _as_finite_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    return arr


def pdf(x, p: GevParams):
    """Density at x. Points outside the support have density zero."""
    arr = _as_finite_array(x)
    z = (arr - p.mu) / p.sigma
    if p.is_gumbel:
        # exp(-z) may overflow to inf far below the location; the density
        # underflows to the correct 0 there
        with np.errstate(over="ignore"):
            out = np.exp(-z - np.exp(-z)) / p.sigma
    else:
        t = 1.0 + p.kappa * z
        out = np.zeros_like(z)
        inside = t > 0
        log_t = np.log(t[inside])
        out[inside] = np.exp(
            -(1.0 + 1.0 / p.kappa) * log_t - np.exp(-log_t / p.kappa)
        ) / p.sigma
    return out if arr.ndim else float(out)


def cdf(x, p: GevParams):
    """Distribution function at x, clamped to {0, 1} outside the support."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise ValueError("x must not be NaN")
    z = (arr - p.mu) / p.sigma
    if p.is_gumbel:
        with np.errstate(over="ignore"):
            out = np.exp(-np.exp(-z))
    else:
        t = 1.0 + p.kappa * z
        out = np.empty_like(z)
        inside = t > 0
        out[inside] = np.exp(-np.power(t[inside], -1.0 / p.kappa))
        # below the lower endpoint (kappa > 0) the CDF is 0; above the upper
        # endpoint (kappa < 0) it is 1
        out[~inside] = 0.0 if p.kappa > 0 else 1.0
    return out if arr.ndim else float(out)


def _quantile(prob: np.ndarray, p: GevParams) -> np.ndarray:
    """Inverse CDF for probabilities in (0, 1)."""
    v = -np.log(prob)  # t**(-1/kappa) at the quantile
    if p.is_gumbel:
        return p.mu - p.sigma * np.log(v)
    # (v**-kappa - 1)/kappa, written with expm1 for small-kappa accuracy
    return p.mu + p.sigma * np.expm1(-p.kappa * np.log(v)) / p.kappa


def threshold_for_pf(pf: float, p: GevParams) -> float:
    """Detection threshold whose exceedance probability equals pf.

    With y_p = -log(1 - pf) the closed form is mu - (sigma/kappa)*(1 - y_p**-kappa),
    reducing to mu - sigma*log(y_p) on the Gumbel branch. The round trip
    1 - cdf(threshold_for_pf(pf)) == pf holds to ~1e-15.
    """
    if not (np.isfinite(pf) and 0.0 < pf < 1.0):
        raise ValueError("pf must lie strictly between 0 and 1")
    y_p = -np.log1p(-pf)
    if p.is_gumbel:
        return float(p.mu - p.sigma * np.log(y_p))
    return float(p.mu + p.sigma * np.expm1(-p.kappa * np.log(y_p)) / p.kappa)


def sample_gev(p: GevParams, n: int, seed: int) -> np.ndarray:
    """Draw n values by inverse-CDF sampling of uniform variates."""
    if n != int(n) or int(n) < 1:
        raise ValueError("n must be a positive integer")
    rng = np.random.default_rng(int(seed))
    u = rng.random(int(n))
    u = np.clip(u, np.finfo(np.float64).tiny, 1.0 - np.finfo(np.float64).epsneg)
    return _quantile(u, p)


def log_likelihood(samples, p: GevParams) -> float:
    """Joint log likelihood of the samples; -inf if any point is off-support."""
    x = _as_finite_array(samples)
    z = (x - p.mu) / p.sigma
    if p.is_gumbel:
        return float(-x.size * np.log(p.sigma) - np.sum(z) - np.sum(np.exp(-z)))
    t = 1.0 + p.kappa * z
    if np.any(t <= 0):
        return float("-inf")
    log_t = np.log(t)
    return float(
        -x.size * np.log(p.sigma)
        - (1.0 + 1.0 / p.kappa) * np.sum(log_t)
        - np.sum(np.exp(-log_t / p.kappa))
    )


def _solve_scalar(func, lo: float, hi: float, f_lo: float, f_hi: float,
                  tol_x: float, max_iter: int):
    """Safeguarded root solve on a bracket with sign change.

    Secant steps alternate with plain bisection, so the bracket is guaranteed
    to halve at least every other iteration no matter how lopsided the
    endpoint magnitudes are. Returns (root, f(root), iterations, converged).
    """
    if f_lo == 0.0:
        return lo, 0.0, 0, True
    if f_hi == 0.0:
        return hi, 0.0, 0, True
    if np.sign(f_lo) == np.sign(f_hi):
        raise ValueError("root bracket does not straddle a sign change")
    a, b, fa, fb = lo, hi, f_lo, f_hi
    x, fx = b, fb
    for iteration in range(1, max_iter + 1):
        if abs(b - a) <= tol_x:
            mid = 0.5 * (a + b)
            return mid, func(mid), iteration, True
        candidate = 0.5 * (a + b)
        if iteration % 2 == 0 and fb != fa:
            secant = b - fb * (b - a) / (fb - fa)
            if min(a, b) < secant < max(a, b):
                candidate = secant
        x = candidate
        fx = func(x)
        if fx == 0.0:
            return x, fx, iteration, True
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
    return x, fx, max_iter, False


def _gumbel_score_residuals(x: np.ndarray, mu: float, sigma: float) -> tuple[float, float]:
    """Normalized residuals of the two Gumbel score equations."""
    z = (x - mu) / sigma
    w = np.exp(-z)
    r_mu = abs(np.mean(w) - 1.0)
    r_sigma = abs(np.mean(z * (1.0 - w)) - 1.0)
    return r_mu, r_sigma


def fit_gumbel_mle(samples, tol: float = 1e-9, max_iter: int = 200) -> FitReport:
    """Gumbel (kappa = 0) maximum likelihood fit.

    The scale solves sigma = mean(x) - sum(x*w)/sum(w) with weights
    w = exp(-x/sigma); the location then follows in closed form as
    mu = -sigma*log(mean(exp(-x/sigma))). The scalar equation is solved by
    a safeguarded secant/bisection iteration; exponentials are shifted by
    min(x) so the weights never overflow.
    """
    x = _as_finite_array(samples)
    if x.size < 30:
        raise DegenerateDataError(f"need at least 30 samples, got {x.size}")
    if np.var(x) == 0.0:
        raise DegenerateDataError("samples have zero variance")
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be positive and max_iter >= 1")

    x_bar = float(np.mean(x))
    shift = float(np.min(x))

    def score(sigma: float) -> float:
        w = np.exp(-(x - shift) / sigma)
        weighted_mean = float(np.sum(x * w) / np.sum(w))
        return x_bar - weighted_mean - sigma

    # moment estimate seeds the bracket; score is positive below the root
    sigma_0 = float(np.std(x)) * math.sqrt(6.0) / math.pi
    iterations = 0
    lo, hi = sigma_0, sigma_0
    f_lo = score(lo)
    iterations += 1
    while f_lo < 0.0 and iterations < max_iter:
        lo *= 0.5
        f_lo = score(lo)
        iterations += 1
    f_hi = score(hi)
    iterations += 1
    while f_hi > 0.0 and iterations < max_iter:
        hi *= 2.0
        f_hi = score(hi)
        iterations += 1

    sigma_hat, _, solve_iters, bracket_ok = _solve_scalar(
        score, lo, hi, f_lo, f_hi,
        tol_x=tol * max(1.0, sigma_0), max_iter=max_iter,
    )
    iterations += solve_iters

    mu_hat = shift - sigma_hat * math.log(float(np.mean(np.exp(-(x - shift) / sigma_hat))))
    r_mu, r_sigma = _gumbel_score_residuals(x, mu_hat, sigma_hat)
    converged = bool(bracket_ok and r_mu <= tol and r_sigma <= tol)
    params = GevParams(0.0, mu_hat, sigma_hat)
    return FitReport(
        params=params,
        log_likelihood=log_likelihood(x, params),
        iterations=iterations,
        converged=converged,
        sample_count=int(x.size),
        solver_tol=tol,
    )


def _kappa_score(kappa: float, z: np.ndarray) -> float:
    """d/dkappa of the profile log likelihood at fixed standardized residuals z.

    Near kappa = 0 the exact expression suffers heavy cancellation, so a
    first-order expansion around the Gumbel limit is used there.
    """
    if abs(kappa) < 1e-4:
        w = np.exp(-z)
        a0 = float(np.sum(0.5 * z * z - z - 0.5 * z * z * w))
        a1 = float(-2.0 * np.sum(z**3 / 3.0 - 0.5 * z * z + w * (z**4 / 8.0 - z**3 / 3.0)))
        return a0 + a1 * kappa
    t = 1.0 + kappa * z
    log_t = np.log(t)
    u = np.exp(-log_t / kappa)
    term_ll = np.sum(log_t) / kappa**2 - (1.0 + 1.0 / kappa) * np.sum(z / t)
    term_tail = np.sum(u * (log_t / kappa**2 - z / (kappa * t)))
    return float(term_ll - term_tail)


def fit_gev_mle(samples, tol: float = 1e-9, max_iter: int = 200,
                kappa_bracket: tuple[float, float] = (-0.5, 0.5),
                refine: bool = False) -> FitReport:
    """Two-stage GEV fit: Gumbel for (mu, sigma), then the shape by profiling.

    The shape search bracket starts at kappa_bracket and shrinks so that
    1 + kappa*(x - mu)/sigma stays positive on every sample. If the profile
    score has no sign change across the bracket, the Gumbel solution is kept
    with kappa = 0. With refine=True a cyclic coordinate ascent then polishes
    (kappa, mu, sigma) against the full three-parameter likelihood, which
    removes the location/scale bias the staged scheme has when the true
    shape is nonzero.
    """
    base = fit_gumbel_mle(samples, tol=tol, max_iter=max_iter)
    x = _as_finite_array(samples)
    mu_hat, sigma_hat = base.params.mu, base.params.sigma
    z = (x - mu_hat) / sigma_hat
    iterations = base.iterations

    margin = 1.0 - 1e-9
    lo, hi = float(kappa_bracket[0]), float(kappa_bracket[1])
    z_max, z_min = float(np.max(z)), float(np.min(z))
    if z_max > 0:
        lo = max(lo, -margin / z_max)
    if z_min < 0:
        hi = min(hi, margin / (-z_min))

    kappa_hat = 0.0
    converged = base.converged
    if lo < hi:
        score = lambda k: _kappa_score(k, z)
        f_lo, f_hi = score(lo), score(hi)
        iterations += 2
        if np.sign(f_lo) != np.sign(f_hi) and f_lo != 0.0 and f_hi != 0.0:
            kappa_hat, _, solve_iters, ok = _solve_scalar(
                score, lo, hi, f_lo, f_hi, tol_x=tol, max_iter=max_iter,
            )
            iterations += solve_iters
            converged = bool(converged and ok)
        else:
            logger.info(
                "profile score has no interior stationary point in [%.3g, %.3g]; "
                "keeping the Gumbel shape", lo, hi,
            )
    else:
        logger.info("kappa bracket empty after support shrinkage; keeping the Gumbel shape")

    params = GevParams(kappa_hat, mu_hat, sigma_hat)
    if refine:
        params, refine_iters = _refine_joint(x, params, tol, max_iter)
        iterations += refine_iters
    return FitReport(
        params=params,
        log_likelihood=log_likelihood(x, params),
        iterations=iterations,
        converged=converged,
        sample_count=int(x.size),
        solver_tol=tol,
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(func, lo: float, hi: float, tol_x: float, max_iter: int = 200):
    """Golden-section maximization on [lo, hi]; returns (argmax, iterations)."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    iterations = 2
    while abs(b - a) > tol_x and iterations < max_iter:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = func(d)
        iterations += 1
    return 0.5 * (a + b), iterations


def _refine_joint(x: np.ndarray, start: GevParams, tol: float, max_iter: int):
    """Cyclic coordinate ascent of the full likelihood from the staged fit."""

    def objective(kappa: float, mu: float, sigma: float) -> float:
        if sigma <= 0:
            return float("-inf")
        try:
            return log_likelihood(x, GevParams(kappa, mu, sigma))
        except ValueError:
            return float("-inf")

    kappa, mu, sigma = start.kappa, start.mu, start.sigma
    spread = float(np.std(x))
    iterations = 0
    for _ in range(60):
        prev = (kappa, mu, sigma)
        # keep the shape slice inside the support of every sample
        z = (x - mu) / sigma
        k_lo, k_hi = -0.95, 0.95
        z_max, z_min = float(np.max(z)), float(np.min(z))
        if z_max > 0:
            k_lo = max(k_lo, -(1.0 - 1e-9) / z_max)
        if z_min < 0:
            k_hi = min(k_hi, (1.0 - 1e-9) / (-z_min))
        kappa, it = _golden_max(
            lambda k: objective(k, mu, sigma), k_lo, k_hi,
            tol_x=max(tol, 1e-12), max_iter=max_iter,
        )
        iterations += it
        mu, it = _golden_max(
            lambda m: objective(kappa, m, sigma), mu - 4.0 * spread, mu + 4.0 * spread,
            tol_x=max(tol * max(1.0, abs(mu)), 1e-12), max_iter=max_iter,
        )
        iterations += it
        sigma, it = _golden_max(
            lambda s: objective(kappa, mu, s), sigma / 8.0, sigma * 8.0,
            tol_x=max(tol * sigma, 1e-12), max_iter=max_iter,
        )
        iterations += it
        moved = max(
            abs(kappa - prev[0]),
            abs(mu - prev[1]) / max(1.0, abs(mu)),
            abs(sigma - prev[2]) / sigma,
        )
        if moved <= 10.0 * tol:
            break
    return GevParams(kappa, mu, sigma), iterations
