"""Occupation-time transforms and samplers for skip-free Markov chains."""

import json as _json

from ._core import (
    Generator,
    OccutimeError,
    gaussian_sigma,
    green,
    joint_lt_general,
    joint_lt_skipfree,
    load,
    marginal_rates,
    mass_identity_residual,
    mc_transform,
    mu_total_mass,
    occupation_covariance,
    phi,
    sample_gaussian,
    simulate_occupations,
    validate,
)
from ._core import markov_verdict as _markov_verdict

__all__ = [
    "Generator",
    "OccutimeError",
    "gaussian_sigma",
    "green",
    "joint_lt_general",
    "joint_lt_skipfree",
    "load",
    "marginal_rates",
    "markov_verdict",
    "mass_identity_residual",
    "mc_transform",
    "mu_total_mass",
    "occupation_covariance",
    "phi",
    "sample_gaussian",
    "simulate_occupations",
    "validate",
]


def markov_verdict(g):
    """Markov verdict for a skip-free generator, as a dict."""
    return _json.loads(_markov_verdict(g))
