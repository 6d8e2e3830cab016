"""Damped wave equation lab.

Thin wrapper over the native core: scenarios run in C++, summaries come back
as dicts and traces as lists of row dicts keyed by the CSV header.
"""

import csv
import io
import json
import os

from . import _dampwave
from ._dampwave import (
    ConfigError,
    DampingProfile,
    InstabilityError,
    TRACE_HEADER,
    default_params,
    derive_constants,
    find_t0,
)

__all__ = [
    "ConfigError",
    "DampingProfile",
    "InstabilityError",
    "RunResult",
    "TRACE_HEADER",
    "default_params",
    "derive_constants",
    "feasibility_margins",
    "find_t0",
    "fit_trace",
    "parse_trace",
    "run",
    "validate_profile",
]


def parse_trace(text):
    """Rows of a trace CSV as dicts of floats ("nan" becomes float nan)."""
    reader = csv.DictReader(io.StringIO(text))
    return [{k: float(v) for k, v in row.items()} for row in reader]


class RunResult:
    def __init__(self, native):
        self.summary = json.loads(native.summary_json)
        self.trace_csv = native.trace_csv
        self.checks_pass = native.checks_pass

    @property
    def trace(self):
        return parse_trace(self.trace_csv)


def run(config, overrides=None):
    """Runs a scenario given a config path or config text."""
    overrides = dict(overrides or {})
    if os.path.exists(str(config)):
        return RunResult(_dampwave.run_config_file(str(config), overrides))
    return RunResult(_dampwave.run_config_text(str(config), overrides))


def validate_profile(profile, sample_resolution=0.01, x_max=200.0):
    return json.loads(_dampwave.validate_profile(profile, sample_resolution, x_max))


def feasibility_margins(V0, V_star):
    return json.loads(_dampwave.feasibility_margins(V0, V_star))


def fit_trace(trace_csv, t_lo, t_hi):
    return json.loads(_dampwave.fit_trace(trace_csv, t_lo, t_hi))
