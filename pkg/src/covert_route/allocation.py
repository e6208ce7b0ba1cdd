"""Per-relay power allocation on a fixed path.

Everything is normalized in the blocklength ``n``: a plan stores

* ``power_coeffs`` ``p_i`` with transmit power ``P_i = p_i / sqrt(n)``,
* ``link_rate_coeffs`` ``c_i`` with throughput ``C_i = c_i / sqrt(n)``,
* ``delay_coeffs`` ``D_i`` with delay ``Delta_i = D_i * sqrt(n)``,
* ``load_coeffs`` ``t_i`` with warden load ``T_i = t_i / sqrt(n)``.

In these units the single-key budget is ``sum t_i <= 2 sqrt(delta)`` and the
independent-key budget is ``sum t_i**2 <= 4 delta``, for every ``n``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .covertness import (
    CovertBudget, bound_ik, bound_sk, exact_kl_ik, exact_kl_sk, exposure_matrix,
)
from .scenario import Scenario, ScenarioError


class Regime(str, enum.Enum):
    MT_SK = "mt-sk"
    MD_SK = "md-sk"
    MT_IK = "mt-ik"
    MD_IK = "md-ik"

    @property
    def max_throughput(self) -> bool:
        return self in (Regime.MT_SK, Regime.MT_IK)

    @property
    def independent_keys(self) -> bool:
        return self in (Regime.MT_IK, Regime.MD_IK)

    def __str__(self) -> str:
        return self.value


ALL_REGIMES = (Regime.MT_SK, Regime.MD_SK, Regime.MT_IK, Regime.MD_IK)


class InfeasibleLinkError(ValueError):
    """A link on the path has infinite exposure (warden on the transmitter)."""


class OracleError(RuntimeError):
    """The numeric oracle failed to converge; ``trace`` holds the iterates."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        if len(self.nodes) < 2:
            raise ScenarioError("a path needs at least one link")
        if len(set(self.nodes)) != len(self.nodes):
            raise ScenarioError(f"path {self.nodes} repeats a node")

    @property
    def links(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    def __str__(self) -> str:
        return "-".join(str(v) for v in self.nodes)


@dataclass(frozen=True)
class PathPlan:
    path: Path | None
    regime: Regime
    exposures: tuple[float, ...]
    power_coeffs: tuple[float, ...]
    link_rate_coeffs: tuple[float, ...]
    delay_coeffs: tuple[float, ...]
    load_coeffs: tuple[float, ...]
    delay_total: float
    #: set when no warden constrains the path (all exposures zero); the
    #: rate is then unbounded and reported as ``None`` rather than ``inf``
    unconstrained: bool = False

    @property
    def hop_count(self) -> int:
        return len(self.exposures)

    @property
    def rate_coeff(self) -> float | None:
        """End-to-end throughput coefficient: the bottleneck link rate."""
        if self.unconstrained:
            return None
        return min(self.link_rate_coeffs)

    def warden_loads(self, n: int) -> np.ndarray:
        """Per-link warden load ``T_i`` at blocklength ``n``."""
        return np.asarray(self.load_coeffs) / math.sqrt(n)

    def constraint_value(self) -> float:
        """Left side of the normalized budget: ``sum t_i`` (SK) or ``sum t_i^2`` (IK)."""
        t = np.asarray(self.load_coeffs)
        return float(np.sum(t * t)) if self.regime.independent_keys else float(np.sum(t))

    def constraint_budget(self, delta: float) -> float:
        return 4.0 * delta if self.regime.independent_keys else 2.0 * math.sqrt(delta)


# -- closed forms on exposure vectors ---------------------------------------


def _prepare(omega, gains):
    omega = np.asarray(omega, dtype=float).ravel()
    if omega.size == 0:
        raise ValueError("empty path")
    if np.any(omega < 0) or np.any(np.isnan(omega)):
        raise ValueError("exposures must be non-negative")
    if np.any(np.isinf(omega)):
        bad = int(np.flatnonzero(np.isinf(omega))[0])
        raise InfeasibleLinkError(f"link {bad} has infinite warden exposure")
    gains = np.ones_like(omega) if gains is None else np.asarray(gains, dtype=float).ravel()
    if gains.shape != omega.shape:
        raise ValueError("gains and exposures differ in length")
    return omega, gains


def _tuple(a) -> tuple[float, ...]:
    return tuple(float(v) for v in a)


def _mt_plan(regime, omega, gains, rate, path):
    h = omega.size
    if rate is None:
        inf = (math.inf,) * h
        return PathPlan(path, regime, _tuple(omega), inf, inf, (0.0,) * h, (0.0,) * h, 0.0, True)
    return PathPlan(
        path,
        regime,
        _tuple(omega),
        _tuple(2.0 * gains * rate),
        (float(rate),) * h,
        (1.0 / rate,) * h,
        _tuple(2.0 * rate * omega),
        h / rate,
    )


def _md_plan(regime, omega, gains, delays, total, path):
    free = delays == 0.0
    with np.errstate(divide="ignore"):
        inv = np.where(free, math.inf, 1.0 / np.where(free, 1.0, delays))
    load = np.where(free, 0.0, 2.0 * omega * np.where(free, 0.0, inv))
    return PathPlan(
        path,
        regime,
        _tuple(omega),
        _tuple(2.0 * gains * inv),
        _tuple(inv),
        _tuple(delays),
        _tuple(load),
        float(total),
        bool(np.all(free)),
    )


def mt_sk(omega, delta: float, gains=None, path=None) -> PathPlan:
    """Max-min throughput, single key: ``c = sqrt(delta) / sum(omega)``, equal on every link."""
    omega, gains = _prepare(omega, gains)
    total = math.fsum(omega)
    rate = None if total == 0.0 else math.sqrt(delta) / total
    return _mt_plan(Regime.MT_SK, omega, gains, rate, path)


def mt_ik(omega, delta: float, gains=None, path=None) -> PathPlan:
    """Max-min throughput, independent keys: ``c = sqrt(delta) / ||omega||_2``."""
    omega, gains = _prepare(omega, gains)
    norm = math.hypot(*omega)
    rate = None if norm == 0.0 else math.sqrt(delta) / norm
    return _mt_plan(Regime.MT_IK, omega, gains, rate, path)


def md_sk(omega, delta: float, gains=None, path=None) -> PathPlan:
    """Min end-to-end delay, single key.

    ``D_i = sqrt(omega_i) * sum_j sqrt(omega_j) / sqrt(delta)``; zero-exposure
    links get zero delay and drop out of the budget.
    """
    omega, gains = _prepare(omega, gains)
    root = np.sqrt(omega)
    s = math.fsum(root)
    scale = 1.0 / math.sqrt(delta)
    delays = root * (s * scale)
    return _md_plan(Regime.MD_SK, omega, gains, delays, s * s * scale, path)


def md_ik(omega, delta: float, gains=None, path=None) -> PathPlan:
    """Min end-to-end delay, independent keys.

    Stationarity gives ``D_i`` proportional to ``omega_i**(2/3)``:
    ``D_i = omega_i**(2/3) * sqrt(s) / sqrt(delta)`` with ``s = sum omega_j**(2/3)``.
    """
    omega, gains = _prepare(omega, gains)
    w23 = np.cbrt(omega) ** 2
    s = math.fsum(w23)
    scale = 1.0 / math.sqrt(delta)
    delays = w23 * (math.sqrt(s) * scale)
    return _md_plan(Regime.MD_IK, omega, gains, delays, s * math.sqrt(s) * scale, path)


_CLOSED_FORMS = {
    Regime.MT_SK: mt_sk,
    Regime.MT_IK: mt_ik,
    Regime.MD_SK: md_sk,
    Regime.MD_IK: md_ik,
}


def closed_form(regime: Regime, omega, delta: float, gains=None, path=None) -> PathPlan:
    return _CLOSED_FORMS[Regime(regime)](omega, delta, gains=gains, path=path)


# -- numeric oracle -------------------------------------------------------


def numeric_oracle(regime: Regime, omega, delta: float, gains=None, path=None,
                   rtol: float = 1e-15, max_iter: int = 400) -> PathPlan:
    """Solve the per-path program by scalar search instead of the closed form.

    Max-throughput: bisection on the common rate ``t``; the cheapest way to
    give every link rate ``>= t`` is rate exactly ``t`` everywhere, so ``t``
    is feasible iff that allocation meets the budget.

    Min-delay: Newton iteration on the Lagrange multiplier of the budget,
    with the per-link delays taken from the stationarity conditions.
    """
    regime = Regime(regime)
    omega, gains = _prepare(omega, gains)
    if regime.max_throughput:
        return _oracle_mt(regime, omega, gains, delta, path, rtol, max_iter)
    return _oracle_md(regime, omega, gains, delta, path, rtol, max_iter)


def _oracle_mt(regime, omega, gains, delta, path, rtol, max_iter):
    ik = regime.independent_keys
    budget = 4.0 * delta if ik else 2.0 * math.sqrt(delta)

    def usage(t):
        loads = 2.0 * t * omega
        return float(np.sum(loads * loads)) if ik else float(np.sum(loads))

    if usage(1.0) == 0.0:
        return _mt_plan(regime, omega, gains, None, path)
    trace = []
    hi = 1.0
    if usage(hi) <= budget:
        while usage(hi) <= budget:
            hi *= 2.0
        lo = hi / 2.0
    else:
        while usage(hi) > budget:
            hi /= 2.0
        lo, hi = hi, hi * 2.0
    for _ in range(max_iter):
        trace.append((lo, hi))
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if usage(mid) <= budget:
            lo = mid
        else:
            hi = mid
    else:
        raise OracleError("rate bisection did not converge", trace)
    return _mt_plan(regime, omega, gains, lo, path)


def _oracle_md(regime, omega, gains, delta, path, rtol, max_iter):
    active = omega > 0.0
    if not np.any(active):
        return _md_plan(regime, omega, gains, np.zeros_like(omega), 0.0, path)
    if regime.independent_keys:
        coef = (2.0 * omega[active]) ** 2  # budget term h_i / Delta_i^2
        budget = 4.0 * delta

        def delays(lam):
            # stationarity: 1 - 2 lam h_i / Delta_i^3 = 0
            return np.cbrt(2.0 * lam * coef)

        def usage(lam):
            d = delays(lam)
            return float(np.sum(coef / (d * d)))

        def dusage_dx(lam):
            return -2.0 / 3.0 * usage(lam)
    else:
        coef = 2.0 * omega[active]  # budget term b_i / Delta_i
        budget = 2.0 * math.sqrt(delta)

        def delays(lam):
            # stationarity: 1 - lam b_i / Delta_i^2 = 0
            return np.sqrt(lam * coef)

        def usage(lam):
            return float(np.sum(coef / delays(lam)))

        def dusage_dx(lam):
            return -0.5 * usage(lam)

    # Safeguarded Newton on x = ln(lambda): usage is decreasing in x.
    trace = []
    lo = hi = 0.0
    while usage(math.exp(lo)) < budget:
        lo -= 8.0
        if lo < -1400:
            raise OracleError("could not bracket the multiplier", trace)
    while usage(math.exp(hi)) > budget:
        hi += 8.0
        if hi > 1400:
            raise OracleError("could not bracket the multiplier", trace)
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        lam = math.exp(x)
        f = usage(lam) - budget
        trace.append((lam, f))
        if abs(f) <= rtol * budget:
            break
        if f > 0:
            lo = x
        else:
            hi = x
        new = x - f / dusage_dx(lam)
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - x) <= 1e-17 * max(1.0, abs(x)) or hi - lo <= 4e-16 * max(1.0, abs(x)):
            x = new
            break
        x = new
    else:
        raise OracleError("multiplier iteration did not converge", trace)
    d = np.zeros_like(omega)
    d[active] = delays(math.exp(x))
    return _md_plan(regime, omega, gains, d, math.fsum(d), path)


# -- path-level API --------------------------------------------------------


def link_gain(scenario: Scenario, tx: int, rx: int) -> float:
    """``noise(rx) * d(tx, rx)**alpha``: the power needed per unit of link rate, halved."""
    a, b = scenario.node(tx), scenario.node(rx)
    dx, dy = a.position.x - b.position.x, a.position.y - b.position.y
    return b.noise_var * math.sqrt(dx * dx + dy * dy) ** scenario.alpha


def path_exposures(path: Path, scenario: Scenario, omega_matrix=None):
    """Return ``(omega, gains)`` arrays along ``path``."""
    if path.nodes[0] != scenario.source or path.nodes[-1] != scenario.dest:
        raise ScenarioError(
            f"path {path} must run from {scenario.source} to {scenario.dest}"
        )
    if omega_matrix is None:
        omega_matrix = exposure_matrix(scenario)
    idx = [scenario.index_of(v) for v in path.nodes]
    omega = np.array([omega_matrix[i, j] for i, j in zip(idx[:-1], idx[1:])])
    gains = np.array([link_gain(scenario, a, b) for a, b in path.links])
    return omega, gains


def _as_path(path) -> Path:
    return path if isinstance(path, Path) else Path(tuple(path))


def allocate(regime: Regime, path, scenario: Scenario, budget: CovertBudget,
             omega_matrix=None) -> PathPlan:
    path = _as_path(path)
    omega, gains = path_exposures(path, scenario, omega_matrix)
    return closed_form(regime, omega, budget.delta, gains=gains, path=path)


def allocate_mt_sk(path, scenario: Scenario, budget: CovertBudget) -> PathPlan:
    return allocate(Regime.MT_SK, path, scenario, budget)


def allocate_mt_ik(path, scenario: Scenario, budget: CovertBudget) -> PathPlan:
    return allocate(Regime.MT_IK, path, scenario, budget)


def allocate_md_sk(path, scenario: Scenario, budget: CovertBudget) -> PathPlan:
    return allocate(Regime.MD_SK, path, scenario, budget)


def allocate_md_ik(path, scenario: Scenario, budget: CovertBudget) -> PathPlan:
    return allocate(Regime.MD_IK, path, scenario, budget)


def allocate_numeric_oracle(path, scenario: Scenario, budget: CovertBudget,
                            regime: Regime) -> PathPlan:
    path = _as_path(path)
    if path.hop_count > 8:
        raise ValueError("numeric oracle is limited to paths of at most 8 hops")
    omega, gains = path_exposures(path, scenario)
    return numeric_oracle(regime, omega, budget.delta, gains=gains, path=path)


def path_metric(regime: Regime, omega: Sequence[float], delta: float) -> float:
    """End-to-end objective of the optimal allocation: rate for MT, total delay for MD.

    A scalar shortcut for ranking many candidate paths.  Unconstrained MT
    paths rank as ``inf``; this is never a reported quantity.
    """
    regime = Regime(regime)
    root_delta = math.sqrt(delta)
    if any(math.isinf(w) for w in omega):
        return 0.0 if regime.max_throughput else math.inf
    if regime is Regime.MT_SK:
        s = math.fsum(omega)
        return math.inf if s == 0.0 else root_delta / s
    if regime is Regime.MT_IK:
        s = math.hypot(*omega)
        return math.inf if s == 0.0 else root_delta / s
    if regime is Regime.MD_SK:
        s = math.fsum(math.sqrt(w) for w in omega)
        return s * s / root_delta
    s = math.fsum((w ** (1.0 / 3.0)) ** 2 for w in omega)
    return s * math.sqrt(s) / root_delta


@dataclass(frozen=True)
class Certificate:
    n: int
    kl_exact: float
    kl_bound: float
    delta: float

    @property
    def passed(self) -> bool:
        return self.kl_exact <= self.delta


def certify(plan: PathPlan, delta: float, n: int) -> Certificate:
    """Evaluate the exact relative entropy the wardens see for ``plan`` at blocklength ``n``."""
    loads = plan.warden_loads(n)
    if plan.regime.independent_keys:
        return Certificate(n, exact_kl_ik(loads, n), bound_ik(loads, n), delta)
    return Certificate(n, exact_kl_sk(loads, n), bound_sk(loads, n), delta)
