"""Inexact moving balls (iMBA) for min f + phi - psi subject to g <= 0."""

import json

import numpy as np

from ._dcmba import (
    Instance,
    InfeasibleStartError,
    InstanceFormatError,
    gen_qcqp,
    gen_student_t,
    load_instance,
    save_instance,
)
from . import _dcmba

__all__ = [
    "Instance",
    "InfeasibleStartError",
    "InstanceFormatError",
    "default_config",
    "gen_qcqp",
    "gen_student_t",
    "load_instance",
    "save_instance",
    "solve",
]


def default_config(algo="imba"):
    return json.loads(_dcmba.default_config(algo))


def solve(instance, algo="imba", config=None, x0=None, trace=False):
    """Solve `instance` and return the report as a dict.

    `config` holds solver settings (missing keys keep their defaults). The
    final point is also returned as numpy arrays under report["final"].
    """
    text = _dcmba.solve_json(instance, algo, json.dumps(config) if config else "",
                             None if x0 is None else np.asarray(x0, dtype=float), trace)
    report = json.loads(text)
    report["final"] = {k: np.asarray(v) for k, v in report["final"].items()}
    return report
