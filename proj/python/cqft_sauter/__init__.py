"""Pair production from vacuum in combined static and oscillating Sauter wells.

Quantities are in atomic units; ``C2`` converts energies given in units of
the electron rest energy, e.g. ``params.static_depth = 2.1 * C2``.
"""

from ._core import (
    SPEED_OF_LIGHT,
    ConfigError,
    NumericalGrid,
    NumericsError,
    PotentialMode,
    SignConvention,
    StepperConfig,
    SweepAxis,
    SweepParameter,
    SweepRecord,
    WellParameters,
    WellShape,
    __version__,
    bound_spectrum,
    critical_depth,
    find_optimum,
    gain_number,
    parse_config,
    potential_at,
    read_sweep_csv,
    run_sweep,
    sauter_shape,
    simulate,
    write_sweep_csv,
)

C2 = SPEED_OF_LIGHT**2

__all__ = [name for name in dir() if not name.startswith("_")]
