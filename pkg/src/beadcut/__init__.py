"""Envy-free division of necklaces and grids of indivisible items."""

from .continuous import PiecewiseCake, build_cake, solve_exact, solve_sperner
from .errors import (
    BeadcutError,
    BudgetExceeded,
    InstanceParseError,
    InternalInvariantError,
    PreconditionError,
    ShapeError,
)
from .grid import (
    GridSpec,
    LatticeCutSet,
    divide_by_columns,
    project_columns,
    solve_grid,
    verify_lattice_cuts,
)
from .instances import GeneratorConfig, Instance, generate, parse_instance, serialize_instance
from .model import (
    Allocation,
    EnvyReport,
    Necklace,
    envy_report,
    is_eps_envy_free,
    piece_value,
)
from .oracle import oracle1d, oracle2d
from .rounding import divide_binary, divide_general, round_cuts

__all__ = [
    "Allocation", "BeadcutError", "BudgetExceeded", "EnvyReport", "GeneratorConfig",
    "GridSpec", "Instance", "InstanceParseError", "InternalInvariantError",
    "LatticeCutSet", "Necklace", "PiecewiseCake", "PreconditionError", "ShapeError",
    "build_cake", "divide_binary", "divide_by_columns", "divide_general", "envy_report",
    "generate", "is_eps_envy_free", "oracle1d", "oracle2d", "parse_instance",
    "piece_value", "project_columns", "round_cuts", "serialize_instance", "solve_exact",
    "solve_grid", "solve_sperner", "verify_lattice_cuts",
]
