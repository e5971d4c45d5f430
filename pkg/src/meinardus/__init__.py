"""Weighted partitions: exact counts, saddle-point (Khintchine) asymptotics,
closed-form Meinardus estimates and numerical checks of the decay conditions."""
from .weights import (
    DirichletMeta,
    StructureKind,
    WeightSequence,
    make_example2,
    make_example3,
    make_forest,
    make_power_law,
    make_tabulated,
)
from .exact import count_exact, count_bruteforce, log_count
from .khintchine import TiltedEnsemble, solve_saddle
from .asymptotics import meinardus_estimate, khintchine_estimate

__version__ = "0.1.0"

__all__ = [
    "DirichletMeta",
    "StructureKind",
    "WeightSequence",
    "make_example2",
    "make_example3",
    "make_forest",
    "make_power_law",
    "make_tabulated",
    "count_exact",
    "count_bruteforce",
    "log_count",
    "TiltedEnsemble",
    "solve_saddle",
    "meinardus_estimate",
    "khintchine_estimate",
]
