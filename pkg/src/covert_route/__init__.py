"""Covert multi-hop route planning in wireless networks with wardens."""

__version__ = "0.1.0"

from .allocation import (
    ALL_REGIMES,
    Certificate,
    InfeasibleLinkError,
    OracleError,
    Path,
    PathPlan,
    Regime,
    allocate,
    allocate_md_ik,
    allocate_md_sk,
    allocate_mt_ik,
    allocate_mt_sk,
    allocate_numeric_oracle,
    certify,
    closed_form,
    numeric_oracle,
)
from .covertness import (
    CovertBudget,
    GaussianPair,
    LinkExposure,
    bound_ik,
    bound_sk,
    exact_kl_ik,
    exact_kl_sk,
    gamma1,
    gamma2,
    kl_gaussian_oracle,
    link_exposure,
)
from .experiment import ExperimentResult, SweepSpec, run_sweep, summarize
from .routing import (
    CostedGraph,
    NoRouteError,
    RouteResult,
    brute_force_route,
    build_graph,
    link_cost,
    route,
    shortest_path,
)
from .scenario import Point, Scenario, ScenarioError, SystemNode, Warden, distance, generate_random, load, save
