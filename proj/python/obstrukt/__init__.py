"""Isovariant pair maps, triple-point obstructions, linking numbers and twisted cobordism classes."""

from ._core import (
    InputError,
    NumericalError,
    alpha_linking,
    crossing_linking,
    double_points,
    eval_alpha,
    eval_generator,
    gauss_linking,
    generator_obstruction,
    knotting_table,
    pi0,
    run,
    sample_min_distance,
)

__all__ = [
    "InputError",
    "NumericalError",
    "alpha_linking",
    "crossing_linking",
    "double_points",
    "eval_alpha",
    "eval_generator",
    "gauss_linking",
    "generator_obstruction",
    "knotting_table",
    "pi0",
    "run",
    "sample_min_distance",
]
