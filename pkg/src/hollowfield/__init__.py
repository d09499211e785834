"""hollowfield: exterior 2-D sound-field tomography toolkit.

Generates multi-source reference fields, samples them along
concentric-circle tangent chords, and reconstructs the exterior field by
circular-harmonic expansion, with filtered back-projection, algebraic
(Kaczmarz) and plane-wave-expansion baselines, error metrics, noise /
expansion-order / circle-count studies and a spectral time-domain
pipeline.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    HollowfieldError,
    InvalidSchemeError,
    ShapeMismatchError,
    SingularPointError,
)
from .field import (
    CheCoefficients,
    FieldGrid,
    PointSource,
    ReferenceFieldSpec,
    SOUND_SPEED,
    che_evaluator,
    eval_che_field,
    eval_point_source_field,
    point_source_evaluator,
    reference_source_cluster,
    synthesize_grid,
)
from .geometry import (
    ChordQuadrature,
    SamplingScheme,
    TangentChord,
    build_scheme,
    chord_point,
    polar_of,
    quadrature_nodes,
)
from .metrics import AnnulusMask, annulus_mask, nmse_db, pixel_error_db
from .projection import (
    ForwardMatrix,
    ProjectionSet,
    add_noise,
    assemble_che_matrix,
    assemble_pwe_matrix,
    project_field,
)
from .reconstruct import (
    ReconstructionResult,
    art_reconstruct,
    che_reconstruct,
    default_epsilon,
    fbp_pipeline,
    order_for_frequency,
    pwe_reconstruct,
)
from .solvers import (
    RegularizationSpec,
    Sinogram,
    SolveDiagnostics,
    chords_to_sinogram,
    fbp_reconstruct,
    kaczmarz_art,
    solve_min_norm,
    svd_decompose,
)
from .specfun import bessel_j, bessel_y, hankel2
from .timedomain import (
    BurstFieldSpec,
    FieldMovie,
    TimeSeriesProjectionSet,
    probe_series,
    reconstruct_time_domain,
    synthesize_burst_projections,
)

__version__ = "0.1.0"
