"""Self-trapped maximum-entropy wave packets for a single free particle."""

from .dynamics import (
    ContinuityReport,
    EnergyDecomposition,
    EvolutionConfig,
    EvolutionResult,
    MovingPacket,
    ShapeReport,
    build_packet,
    continuity_check,
    density_peak,
    density_width,
    energy_decomposition,
    energy_direct,
    evolve,
    gaussian_packet,
    grid_energy,
    momentum_average,
    momentum_complex,
    schrodinger_residual,
    support_interior_mask,
)
from .numerics import (
    HBAR,
    MASS,
    UNITS,
    ComplexField,
    RealField,
    SpatialGrid,
    UnitsConvention,
    average_potential,
    derivative,
    integrate,
    shannon_entropy,
)
from .profile import (
    ProfileParams,
    ProfileSolution,
    StationarityReport,
    StepControl,
    SweepRecord,
    integrate_amplitude,
    integrate_potential_direct,
    maxent_stationarity_check,
    recover_potential,
    solve_profile,
    sweep_temperature,
)
from .zerot import (
    ZeroTLimit,
    amplitude_profile,
    box_potential,
    density_profile,
    zero_t_from_ubar,
)

__version__ = "0.1.0"
