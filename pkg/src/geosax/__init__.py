"""geosax: geometry-aware symbolic approximation for manifold-valued
time series, with fast symbol-space matching, kNN search, and motif
discovery."""

from .codebook import (
    Codebook,
    ConscienceConfig,
    assign,
    assign_many,
    build_lut,
    conscience_learn,
    entropy,
    hybrid_learn,
    kmeans_geodesic,
)
from .discover import MotifQuery, MotifResult, find_motifs, is_trivial_match, subsequence
from .encode import BitBudget, SymbolSequence, bit_budget, encode, reconstruct
from .errors import (
    ArtifactMismatchError,
    DegenerateMeanError,
    DegenerateProjectionError,
    FormatVersionError,
    GeosaxError,
    IncompatibleManifoldsError,
    InjectivityRadiusError,
    LengthMismatchError,
    StorageError,
    ValidationError,
)
from .features import hoof, landmarks_to_grassmann
from .geometry import (
    ManifoldDescriptor,
    ManifoldPoint,
    TangentVector,
    ValidationReport,
    distance,
    exp_map,
    geometry_call_count,
    grassmann_project,
    log_map,
    random_point,
    reset_geometry_calls,
    validate_point,
)
from .match import (
    DtwResult,
    SequenceDatabase,
    dtw,
    dtw_geodesic,
    dtw_symbolic,
    find_exact,
    knn,
    nn_classify,
    symbol_distance,
)
from .stats import (
    KarcherConfig,
    ManifoldSequence,
    MeanResult,
    extrinsic_mean,
    karcher_mean,
    paa,
)
from .storage import (
    ClustersScenario,
    ConcatenatedScenario,
    DatasetFile,
    LabeledClassesScenario,
    gen_synthetic,
    load_codebook,
    load_dataset,
    load_symbol_sequences,
    save_codebook,
    save_dataset,
    save_symbol_sequences,
)

__version__ = "0.1.0"
