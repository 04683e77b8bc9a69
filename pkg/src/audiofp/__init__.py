"""audiofp: deterministic web-audio fingerprinting vectors and the
collation, stability and diversity analytics built on top of them."""

from .analysis import (
    MatchOutcome,
    ami,
    combine_vectors,
    compare_vectors,
    diversity_report,
    match_score,
    normalized_entropy,
    shannon_entropy,
    split_iterations,
    stability_report,
    ua_homogeneity,
)
from .collate import CollationGraph, Clustering, collate_records, distinct_per_user
from .data import Dataset, UserRecord, dedup, load, prune_incomplete, save
from .dsp import (
    AnalyserConfig,
    CompressorParams,
    FrequencyFrame,
    analyse,
    compress,
    compress_curve,
    fft,
    ifft,
)
from .simulate import (
    DeviceProfile,
    PopulationConfig,
    generate_population,
    paper_like_config,
    perturb,
)
from .synth import (
    AudioBuffer,
    GainSpec,
    OscillatorSpec,
    PeriodicWaveCoefficients,
    am_modulate,
    apply_gain,
    custom_wave_coefficients,
    eval_periodic_wave,
    fm_modulate,
    merge,
    synth_wave,
)
from .vectors import (
    DEFAULT_ENGINE,
    VECTOR_ORDER,
    ElementaryFingerprint,
    EngineConfig,
    IterationResult,
    VectorId,
    digest_buffer,
    render_vector,
    run_all,
    run_vector,
)

__version__ = "0.1.0"
