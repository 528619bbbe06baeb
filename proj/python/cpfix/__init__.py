"""Fixed points of commuting CP semigroups on multi-matrix algebras."""

import json

from . import _core
from ._core import (
    CPMap,
    CpfixError,
    Dilation,
    Element,
    Family,
    amplitude_damping,
    compose,
    conjugation,
    cstar_closure,
    demo_families,
    ergodic_projection,
    fixed_space,
    identity_map,
    kernel_ideal_check,
    lift_fixed_point,
    phi_limit,
    pi_limit,
    property_suite,
    random_instance,
    random_mixture_family,
    rotation,
    tail_shift,
    validate_cp,
)

__version__ = "0.1.0"


def demo(family, **params):
    """Problem document (a dict) for one of the built-in families."""
    return json.loads(_core.demo(family, **params))


def _run(fn, problem):
    doc = problem if isinstance(problem, str) else json.dumps(problem)
    code, report = fn(doc)
    return code, json.loads(report)


def validate(problem):
    """Returns (exit_code, report) for a problem dict or JSON string."""
    return _run(_core.validate, problem)


def analyze(problem):
    return _run(_core.analyze, problem)


def dilation(problem):
    return _run(_core.dilation, problem)


def render_table(report):
    return _core.render_table(json.dumps(report))
