"""Exact solver and condition checker for two-sender sequential Bayesian persuasion."""

from .conditions import (
    SufficientSearchConfig,
    check_claim4,
    check_necessary,
    check_proposition,
    check_sufficient,
    collaborative_states,
)
from .equilibrium import (
    GridConfig,
    GridError,
    expected_utilities,
    order_matters,
    solve_s1_first,
    solve_s2_first,
    transfer_range,
    verify_equilibrium,
)
from .model import Scenario, ScenarioError, load_scenario, scenario_from_dict, validate_scenario
from .montecarlo import simulate
from .numerics import Eps, parse_eps, parse_rational
from .persuasion import s2_best_response
from .receiver import best_response, posterior
from .strategy import Commitment1, Commitment2, load_commitment

__version__ = "0.1.0"

__all__ = [
    "Commitment1",
    "Commitment2",
    "Eps",
    "GridConfig",
    "GridError",
    "Scenario",
    "ScenarioError",
    "SufficientSearchConfig",
    "best_response",
    "check_claim4",
    "check_necessary",
    "check_proposition",
    "check_sufficient",
    "collaborative_states",
    "expected_utilities",
    "load_commitment",
    "load_scenario",
    "order_matters",
    "parse_eps",
    "parse_rational",
    "posterior",
    "s2_best_response",
    "scenario_from_dict",
    "simulate",
    "solve_s1_first",
    "solve_s2_first",
    "transfer_range",
    "validate_scenario",
    "verify_equilibrium",
]
