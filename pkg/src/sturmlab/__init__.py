"""sturmlab: exact Sturmian words, forbidden-distance Hamiltonians, stability experiments."""

from .quadirr import (
    Arc,
    ContinuedFraction,
    QuadIrrError,
    QuadraticIrrational,
    badly_constant_scan,
    cf_expand,
    cmp,
    convergents,
    floor_frac,
    in_arc,
    make_quad,
)
from .words import (
    FiniteWord,
    FluctuationStats,
    PeriodicWord,
    RotationWord,
    SturmianWord,
    factor_complexity,
    fluctuation_stats,
    frequency_estimate,
    pattern_count,
    periodic_sturmian,
    symbol_at,
    window,
    word_from_string,
)
from .forbidden import (
    ForbiddenModel,
    forbidden_set,
    is_forbidden_distance,
    verify_characterization,
    zero_run_bound,
)
from .energy import (
    DensityEstimate,
    HamiltonianSpec,
    PatternTable,
    density_estimate_stream,
    density_periodic_exact,
    perturb,
    summability_bound,
    window_energy,
)
from .ergodicity import hitting_count, hitting_scan, lemma_bound_check
from .stability import (
    ScalingFit,
    StabilityRecord,
    family_word,
    scaling_fit,
    stability_scan_family,
    stability_scan_periodic,
)

__version__ = "0.1.0"
