"""Sampling-score design and bandlimited recovery of signals on graphs."""

__version__ = "0.1.0"

from .analysis import (
    BoundParams,
    LowerBoundResult,
    MonteCarloResult,
    RiskReport,
    SlopeFit,
    TypeDiagnostics,
    convergence_slope_fit,
    design_risk_bound,
    exact_mse,
    minimax_lower_bound,
    monte_carlo_mse,
    projection_variance_term,
    type_diagnostics,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    DegenerateGraphError,
    DegenerateScoresError,
    GraphSampError,
    InfiniteVarianceError,
    NumericError,
    ParameterError,
    SymmetryError,
)
from .graphs import (
    Graph,
    NormalizedShift,
    SpectralBasis,
    degree_vector,
    generate_graph,
    load_graph,
    normalize_shift,
    save_graph,
    spectral_decompose,
)
from .harness import (
    ExperimentConfig,
    GraphSpec,
    ResultRow,
    SignalSpec,
    emit_results,
    load_config,
    parse_results,
    reproduce_figure,
    run_experiment,
)
from .recovery import (
    Estimate,
    bandwidth_rule,
    full_rank_sample_set,
    least_squares_proj,
    sample_proj,
    sampling_theory_recover,
)
from .sampling import (
    SampleDraw,
    SamplingScores,
    band_energies,
    draw_samples,
    make_scores,
    mix_seed,
)
from .signals import (
    ClassParams,
    ClassThresholds,
    GraphSignal,
    SpectralSignal,
    min_tail_budget,
    class_thresholds,
    gft,
    igft,
    load_signal,
    save_signal,
    smoothness_quadratic,
    synthesize_signal,
)
