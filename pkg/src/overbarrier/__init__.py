"""Above-barrier 1D reflection: exact solvers, first-order (Born) and
quasiclassical (WKB, complex turning point) approximations, applicability
maps over the (delta, eps) plane, and localization lengths in smooth random
potentials."""

from .born import (
    BornAmplitude,
    BornOptions,
    born_amplitude,
    born_closed_form,
    ln_born_closed_form,
    reflectance_born,
)
from .exact import (
    ScatterResult,
    SolveOptions,
    chain_transmission,
    closed_form_result,
    ln_reflectance_closed_form,
    reflectance_closed_form,
    reflectance_exact,
)
from .localization import (
    EnsembleConfig,
    LocalizationEstimate,
    MGammaHistogram,
    WkbLlocEstimate,
    born_lloc,
    estimate_lloc,
    ln_transmission_samples,
    measure_transmission,
    realization_spec,
    turning_point_histogram,
    wkb_lloc_estimate,
)
from .potentials import (
    Family,
    FourierSeriesParams,
    PhysicalScales,
    PotentialSpec,
    TabulatedParams,
    TailValues,
    eval_shape,
    eval_shape_derivative,
    fourier_spec_from_json,
    fourier_spec_to_json,
    load_tabulated,
    nondimensionalize,
    tail_values,
)
from .random_potential import (
    GaussianCorrelation,
    correlation_fourier,
    sample_realization,
    synthesize_random,
)
from .regime_map import (
    CrossoverLine,
    RegimeCell,
    classify,
    crossover_line,
    default_delta_grid,
    default_eps_grid,
    sweep,
    write_cells_csv,
    write_line_csv,
)
from .wkb import (
    TurningPoint,
    WkbOptions,
    WkbResult,
    find_turning_points,
    reflectance_wkb,
    smoothness_criterion,
    wkb_action,
)

__version__ = "0.1.0"
