"""Covertness budgets and relative-entropy evaluation.

All quantities here are plain floats or numpy arrays; nothing depends on
routing.  The per-link "warden load" ``T_i = sum_k P_i / (wnoise_k * d_ik**alpha)``
is the amount of signal power the wardens collectively see from link ``i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from . import kernels
from .scenario import Scenario, ScenarioError


@dataclass(frozen=True)
class CovertBudget:
    """Relative-entropy budget ``delta``; the detector guarantee is ``P_FA + P_MD >= 1 - epsilon``."""

    delta: float
    blocklength: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be a positive finite number, got {self.delta!r}")
        if self.blocklength is not None and self.blocklength < 1:
            raise ValueError("blocklength must be a positive integer")

    @classmethod
    def from_epsilon(cls, epsilon: float, blocklength: int | None = None) -> "CovertBudget":
        return cls(2.0 * epsilon * epsilon, blocklength)

    @property
    def epsilon(self) -> float:
        return math.sqrt(self.delta / 2.0)

    def gamma1(self, n: int | None = None) -> float:
        return gamma1(self, self._n(n))

    def gamma2(self, n: int | None = None) -> float:
        return gamma2(self, self._n(n))

    def _n(self, n):
        n = self.blocklength if n is None else n
        if n is None:
            raise ValueError("no blocklength given")
        return n


def _check_n(n) -> None:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"blocklength must be a positive integer, got {n!r}")


def gamma1(budget: CovertBudget, n: int) -> float:
    """Single-key budget on the summed warden load: ``2 sqrt(delta / n)``."""
    _check_n(n)
    return 2.0 * math.sqrt(budget.delta / n)


def gamma2(budget: CovertBudget, n: int) -> float:
    """Independent-key budget on the summed squared loads: ``4 delta / n``."""
    _check_n(n)
    return 4.0 * budget.delta / n


# -- exposure -----------------------------------------------------------


@dataclass(frozen=True)
class LinkExposure:
    omega: float


def link_exposure(scenario: Scenario, tx: int, rx: int) -> LinkExposure:
    """Warden exposure of the directed link ``tx -> rx``.

    ``+inf`` when a warden is co-located with the transmitter.
    """
    if tx == rx:
        raise ScenarioError("tx and rx must differ")
    i, j = scenario.index_of(tx), scenario.index_of(rx)
    node_xy, node_noise, warden_xy, warden_noise = scenario.arrays()
    sub = kernels.exposure_matrix(
        node_xy[[i, j]], node_noise[[i, j]], warden_xy, warden_noise, scenario.alpha
    )
    return LinkExposure(float(sub[0, 1]))


def exposure_matrix(scenario: Scenario) -> np.ndarray:
    """``omega`` for every ordered node pair, rows/cols in ``scenario.nodes`` order."""
    node_xy, node_noise, warden_xy, warden_noise = scenario.arrays()
    return kernels.exposure_matrix(node_xy, node_noise, warden_xy, warden_noise, scenario.alpha)


def warden_gain_matrix(scenario: Scenario, tx_ids: Sequence[int]) -> np.ndarray:
    """Path gains ``1 / d(tx_i, W_k)**alpha`` from each transmitter to each warden, ``(H, M)``."""
    node_xy, _, warden_xy, _ = scenario.arrays()
    rows = node_xy[[scenario.index_of(t) for t in tx_ids]]
    out = np.empty((len(rows), len(warden_xy)))
    for i, (x, y) in enumerate(rows):
        for k, (wx, wy) in enumerate(warden_xy):
            dx, dy = x - wx, y - wy
            d = math.sqrt(dx * dx + dy * dy)
            out[i, k] = math.inf if d == 0.0 else 1.0 / d**scenario.alpha
    return out


# -- relative entropy -----------------------------------------------------


def x_minus_log1p(x):
    """``x - ln(1 + x)`` without cancellation for small ``x``.

    Works on scalars and arrays.  For ``|x| < 0.05`` the alternating series
    ``x^2/2 - x^3/3 + ...`` is summed to 20 terms (truncation below 1e-24
    relative); larger arguments use ``log1p`` directly.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.05
    xs = x[small]
    acc = np.zeros_like(xs)
    for k in range(21, 1, -1):
        acc = (1.0 if k % 2 == 0 else -1.0) / k + xs * acc
    out[small] = xs * xs * acc
    xl = x[~small]
    out[~small] = xl - np.log1p(xl)
    return out if out.ndim else float(out)


def bound_sk(loads: Sequence[float], n: int) -> float:
    """Quadratic single-key bound ``(n/4) (sum T_i)^2``."""
    t = float(np.sum(np.asarray(loads, dtype=float)))
    return n / 4.0 * t * t


def bound_ik(loads: Sequence[float], n: int) -> float:
    """Quadratic independent-key bound ``(n/4) sum T_i^2``."""
    t = np.asarray(loads, dtype=float)
    return n / 4.0 * float(np.sum(t * t))


def exact_kl_sk(warden_terms, n: int) -> float:
    """Exact relative entropy for a single shared key.

    ``warden_terms`` holds the per-link per-warden loads (any shape, or
    already-summed per-link loads); only their grand total matters because
    the warden observations are a rank-one perturbation of white noise.
    """
    _check_n(n)
    t = float(np.sum(np.asarray(warden_terms, dtype=float)))
    return 0.5 * n * x_minus_log1p(t)


def exact_kl_ik(loads: Sequence[float], n: int) -> float:
    """Exact relative entropy with independent per-hop keys: per-hop terms add."""
    _check_n(n)
    t = np.asarray(loads, dtype=float)
    return 0.5 * n * float(np.sum(x_minus_log1p(t)))


# -- Gaussian oracle ------------------------------------------------------


@dataclass(frozen=True)
class GaussianPair:
    """Covariances ``S (x) I_n`` versus ``(S + u u^T) (x) I_n`` with diagonal ``S``."""

    sigma_diag: np.ndarray
    u: np.ndarray
    replication: int = 1

    def __post_init__(self) -> None:
        s = np.asarray(self.sigma_diag, dtype=float).ravel()
        u = np.asarray(self.u, dtype=float).ravel()
        if s.shape != u.shape:
            raise ValueError("sigma_diag and u must have the same length")
        if self.replication < 1:
            raise ValueError("replication must be >= 1")
        object.__setattr__(self, "sigma_diag", s)
        object.__setattr__(self, "u", u)


def kl_gaussian_oracle(pair: GaussianPair, digits: int = 40) -> float:
    """Relative entropy between the two zero-mean Gaussians of ``pair``.

    Evaluated in ``digits``-digit arithmetic: the trace term from the explicit
    matrix ``S^-1 (S + u u^T)``, the log-determinant ratio from the matrix
    determinant lemma ``|S + u u^T| = |S| (1 + u^T S^-1 u)``.  The Kronecker
    replication only scales the result.  Extended precision keeps the
    ``trace - dim - logdet`` cancellation (the result is about ``q^2 / 2``
    for small loads ``q``) from eating the answer.
    """
    s = pair.sigma_diag
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise np.linalg.LinAlgError("S must be positive definite")
    with mpmath.workdps(digits):
        dim = len(s)
        S_inv = mpmath.diag([1 / mpmath.mpf(float(v)) for v in s])
        u = mpmath.matrix([mpmath.mpf(float(v)) for v in pair.u])
        sigma1 = mpmath.diag([mpmath.mpf(float(v)) for v in s]) + u * u.T
        prod = S_inv * sigma1
        trace = mpmath.fsum(prod[i, i] for i in range(dim))
        quad = (u.T * S_inv * u)[0, 0]
        value = pair.replication * (trace - dim - mpmath.log1p(quad)) / 2
        return float(value)


def sk_gaussian_pair(powers, gains, warden_noise, n: int) -> GaussianPair:
    """Covariance pair seen by the wardens when one codeword is relayed over every hop.

    ``gains[i, k] = 1 / d(tx_i, W_k)**alpha`` for transmit power ``powers[i]``.
    ``S`` repeats each warden's noise variance once per hop, warden-major.
    """
    powers = np.asarray(powers, dtype=float)
    gains = np.asarray(gains, dtype=float)
    h, m = gains.shape
    sigma = np.repeat(np.asarray(warden_noise, dtype=float), h)
    u = (np.sqrt(powers)[:, None] * np.sqrt(gains)).T.ravel()
    return GaussianPair(sigma, u, n)
