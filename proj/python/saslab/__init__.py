"""Logic-locking laboratory: lock, attack and measure combinational netlists."""

import json
from fractions import Fraction

from . import _core
from ._core import (
    Circuit,
    EngineError,
    LockedCircuit,
    NetlistError,
    ParseError,
    SpecError,
    array_multiplier,
    corrupted_set,
    removal_attack,
    sfll_sat_success_prob,
)

__all__ = [
    "Circuit",
    "EngineError",
    "LockedCircuit",
    "NetlistError",
    "ParseError",
    "SpecError",
    "array_multiplier",
    "corrupted_set",
    "error_profile",
    "expected_iterations",
    "lock",
    "model_attack_sim",
    "removal_attack",
    "sas_gamma",
    "sat_attack",
    "select_critical_minterms",
    "sfll_sat_success_prob",
]


def _fraction(obj):
    return Fraction(int(obj["num"]), int(obj["den"]))


def _rationals(value):
    if isinstance(value, dict):
        if set(value) == {"num", "den"}:
            return _fraction(value)
        return {k: _rationals(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_rationals(v) for v in value]
    return value


def lock(circuit, scheme, spec, seed):
    """Lock `circuit`; `spec` is a dict or JSON text in the spec-file format."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return _core.lock(circuit, scheme, text, seed)


def sat_attack(locked, oracle, seed, iteration_limit=1_000_000, branching="inputs-first"):
    return json.loads(_core.sat_attack(locked, oracle, seed, iteration_limit, branching))


def error_profile(locked, original, inputs=None, threads=1):
    """Exhaustive KER/IER profile; rationals come back as Fraction."""
    return _rationals(json.loads(_core.error_profile(locked, original, inputs, threads)))


def expected_iterations(n, m, l=1):
    return _fraction(json.loads(_core.expected_iterations(n, m, l)))


def sas_gamma(n, m, l=1):
    return _fraction(json.loads(_core.sas_gamma(n, m, l)))


def model_attack_sim(spec, trials, seed, threads=1):
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return json.loads(_core.model_attack_sim(text, trials, seed, threads))


def select_critical_minterms(traces, width, m, weights=None):
    """`traces` is a list of {minterm: count}; returns (minterms, fallback)."""
    return _core.select_critical_minterms(traces, width, m, weights or {})
