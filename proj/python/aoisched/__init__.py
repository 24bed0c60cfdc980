"""Age-of-information scheduling under partially observed arrivals."""

from ._aoisched import (
    AoIError,
    BudgetExceeded,
    Config,
    Node,
    OptimalPolicy,
    OracleTooLarge,
    UnknownBeliefState,
    ValidationError,
    brute_force_ewsaoi,
    episode,
    load_config,
    myopic_ewsaoi,
    parse_config,
    policy_table_text,
    simulate,
    solve,
    success_probability,
    sweep,
)

__all__ = [
    "AoIError",
    "BudgetExceeded",
    "Config",
    "Node",
    "OptimalPolicy",
    "OracleTooLarge",
    "UnknownBeliefState",
    "ValidationError",
    "brute_force_ewsaoi",
    "episode",
    "load_config",
    "myopic_ewsaoi",
    "parse_config",
    "policy_table_text",
    "simulate",
    "solve",
    "success_probability",
    "sweep",
]
