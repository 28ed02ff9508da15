"""Multi-agent navigation through interpolating bridges."""

import json

from ._core import (
    BridgeNavError,
    Limits,
    Result,
    Scenario,
    entrance_line_length,
    entrance_turn_time,
    geometric_path,
    load_scenario,
    optimal_connect,
    parse_scenario,
    run,
    scenario_violations,
    travel_time,
)

__all__ = [
    "BridgeNavError",
    "Limits",
    "Result",
    "Scenario",
    "entrance_line_length",
    "entrance_turn_time",
    "geometric_path",
    "load_scenario",
    "metrics",
    "optimal_connect",
    "parse_scenario",
    "run",
    "scenario_violations",
    "travel_time",
]


def metrics(result, scenario):
    """Run metrics as a dict."""
    return json.loads(result.metrics_json(scenario))
