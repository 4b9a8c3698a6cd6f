"""Monte Carlo toolkit for planar Brownian occupation measure and hulls.

Samplers for Brownian paths, bridges, and loop-measure proposals; raster
geometry for outer boundaries, enclosed areas, and boundary bands; exact
occupation binning; closed-form Green and Poisson kernels with slit maps;
and reproducible experiment drivers behind the `simulate` CLI.
"""

__version__ = "0.1.0"

from .errors import (
    BandTooThinError,
    ConfigError,
    DegenerateSampleError,
    OutOfBoundsError,
    ResolutionError,
    SingularityError,
)
from .rng import RngStream
from .paths import (
    DtRule,
    Path,
    Square,
    UNIT_SQUARE,
    WeightedLoopSample,
    refine_path,
    rotate_path,
    sample_bm,
    sample_bridge,
    sample_loop_measure,
)
from .hulls import (
    GridSpec,
    RasterHull,
    boundary_band,
    diameter,
    enlargement_area,
    outer_decompose,
    rasterize,
    trace_grid,
)
from .occupation import (
    OccupationField,
    TestFunctionSpec,
    assumption_integral,
    green_hitting_estimate,
    integrate_test_function,
    minkowski_estimate,
    occupation_grid,
)
from .kernels import (
    MobiusMap,
    SlitHullMap,
    UNIT_DISC,
    UPPER_HALF_PLANE,
    boundary_poisson,
    cayley,
    conformal_covariance_check,
    disc_automorphism,
    green,
    hull_map_scaling_check,
    imaginary_identity_check,
    poisson,
    slit_map,
    strip,
    strip_poisson,
)
from .experiments import Estimate, ExperimentConfig, parse_config, run_experiment
