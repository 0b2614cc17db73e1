"""Grounding of logic programs with recursive aggregates."""

from .analysis import SafetyError, check_safety, instantiation_sequence, refine_sequence
from .formulas import GroundAggregate, GroundRule, render_ground
from .ground import Interp4, simplify, stable_relative, strip_certain, well_founded_model
from .grounder import BudgetExhausted, ground_component, ground_program
from .syntax import ParseError, parse_program, render

__all__ = [
    "BudgetExhausted",
    "GroundAggregate",
    "GroundRule",
    "Interp4",
    "ParseError",
    "SafetyError",
    "check_safety",
    "ground_component",
    "ground_program",
    "instantiation_sequence",
    "parse_program",
    "refine_sequence",
    "render",
    "render_ground",
    "simplify",
    "stable_relative",
    "strip_certain",
    "well_founded_model",
]
