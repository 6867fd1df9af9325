"""Pseudo-spectral laboratory for the Klein-Gordon-Schrodinger system."""

from .grids import (
    Grid,
    SpectralField,
    ContractViolation,
    bessel_multiplier,
    field_from_function,
    free_half_wave,
    free_schrodinger,
    half_wave_power,
    l2_norm,
    random_field,
    sobolev_norm,
    to_physical,
    to_spectral,
    transform,
    zero_field,
)
from .reduction import FirstOrderState, SecondOrderState, to_first_order, to_second_order
from .evolution import (
    Diagnostics,
    IntegrationFailure,
    TimeGrid,
    Trajectory,
    coupling_schrodinger,
    coupling_wave,
    default_dt,
    picard_iterate,
    simulate,
    step,
)
from .spacetime import (
    SCHRODINGER,
    WAVE_MINUS,
    WAVE_PLUS,
    SpaceTimeField,
    free_schrodinger_spacetime,
    free_wave_spacetime,
    from_state_sequence,
    from_time_samples,
)
from .norms import (
    BourgainSpec,
    bourgain_norm,
    restricted_norm,
    schrodinger_admissible,
    strichartz_norm,
    time_localization_slope,
    wave_admissible,
)
from .decomposition import (
    angular_project,
    decompose,
    frequency_project,
    hhl_index_blocks,
    modulation_project,
)

__version__ = "0.1.0"
