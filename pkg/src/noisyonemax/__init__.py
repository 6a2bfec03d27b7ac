"""Random Mutation Hill-Climbing with resampling on noisy OneMax.

Simulation (``rmhc``), exact expected runtimes (``theory``) and repeated-trial
experiments (``harness``).
"""
__version__ = "0.1.0"

from .onemax import (  # noqa: E402
    Genome,
    NoiseModel,
    RngStream,
    derive_seed,
    mutate_one_bit,
    noisy_fitness,
    sample_gaussian,
    true_fitness,
)
from .rmhc import PolicyConfig, RunResult, SearchState, accept_decision, run_noise_free, run_noisy  # noqa: E402
from .theory import (  # noqa: E402
    AcceptanceProbs,
    RecursionOverflowError,
    TheoryResult,
    erf,
    expected_evaluations,
    expected_generations,
    optimal_resampling,
    p_ta_case1,
    p_ta_resampled,
    p_ta_with_history,
    simulate_chain,
    step_expectations,
    transition_probs,
)
from .harness import (  # noqa: E402
    CellRecord,
    ExperimentConfig,
    ExperimentReport,
    load_report,
    persist_report,
    run_cell,
    sweep,
    validate_table,
)
