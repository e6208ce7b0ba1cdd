"""Shared checks for allocation optimality used by unit and acceptance tests."""
import math

import numpy as np

from covert_route.allocation import Regime


def rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def project_rates(rates, omega, delta, regime):
    """Scale per-link rates so the covertness budget holds with equality."""
    x = rates * omega
    norm = math.hypot(*x) if regime.independent_keys else math.fsum(x)
    return rates * (math.sqrt(delta) / norm)


def project_delays(delays, omega, delta, regime):
    x = omega / delays
    norm = math.hypot(*x) if regime.independent_keys else math.fsum(x)
    return delays * (norm / math.sqrt(delta))


def worst_perturbation_gain(plan, delta, rng, count=1000):
    """Largest relative objective improvement over ``count`` random feasible points.

    Positive means a perturbed allocation beat the closed form.
    """
    omega = np.asarray(plan.exposures)
    scales = (1e-8, 1e-5, 1e-2, 0.3, 2.0)
    worst = -math.inf
    for k in range(count):
        noise = np.exp(scales[k % len(scales)] * rng.standard_normal(omega.size))
        if plan.regime.max_throughput:
            best = plan.rate_coeff
            r = project_rates(np.asarray(plan.link_rate_coeffs) * noise, omega, delta, plan.regime)
            gain = (float(np.min(r)) - best) / best
        else:
            best = plan.delay_total
            d = project_delays(np.asarray(plan.delay_coeffs) * noise, omega, delta, plan.regime)
            gain = (best - math.fsum(d)) / best
        worst = max(worst, gain)
    return worst


def kkt_residual(plan):
    """Spread of the Lagrange multiplier implied by each link of an MD plan."""
    omega = np.asarray(plan.exposures)
    d = np.asarray(plan.delay_coeffs)
    if plan.regime is Regime.MD_SK:
        lam = d * d / omega
    else:
        lam = d ** 3 / omega ** 2
    return float((lam.max() - lam.min()) / lam.max())
