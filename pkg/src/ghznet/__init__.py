"""Secret-key rates for GHZ-based secret sharing and conference key
agreement over bottleneck networks, with and without quantum memories."""

__version__ = "0.1.0"

from .core import binary_entropy, transmission
from .network import (
    BasisStrategy,
    Family,
    NetworkConfig,
    ProtocolSpec,
    SiftingEfficiencies,
    expected_counts,
    sifting,
    simulate_sifting,
    yields,
)
from .noise import (
    GhzPrefactors,
    NoiseParams,
    PairCoefficients,
    QberPair,
    alpha_beta_closed_form,
    ghz_prefactors,
    memoryless_qber,
    memory_qbers,
    memory_qbers_from_exponents,
    pair_coefficients,
)
from .memory import (
    AlphaBetaEstimate,
    RoundSample,
    TimingConfig,
    expected_alpha_beta,
    expected_memory_qbers,
    sample_round,
    trial_times,
    waiting_times,
)
from .rates import AsymptoticRate, asymptotic_rate, cka_equals_qss_check, hbb_rate
from .finite import (
    BipartiteOptimum,
    EpsilonBudget,
    FiniteSizeParams,
    KeyLengthResult,
    bipartite_optimal,
    epsilon_budget,
    expected_key_length,
    expected_key_length_cka,
    expected_key_length_qss,
    xi1,
    xi2,
)
from .analysis import (
    AdvantageProfile,
    AdvantageRow,
    ThresholdQuery,
    ThresholdResult,
    advantage_profile,
    best_cka_fraction,
    find_threshold,
    optimize_pkey,
    optimized_fraction,
    scenario_asymptotic_rate,
    scenario_qbers,
)

import types as _types

__all__ = [
    name
    for name, obj in list(globals().items())
    if not name.startswith("_") and not isinstance(obj, _types.ModuleType)
]
