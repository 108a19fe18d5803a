"""Conservative two-stage group testing in the linear prevalence regime.

Pooling-design generators, stage-one decoding, closed-form theory,
lower bounds, and a seeded Monte Carlo harness, plus a CSV-emitting CLI.
"""

from .bounds import (
    BoundReport,
    bound_crossover,
    conservative_lower_bound,
    f_of_p,
    g_of_p,
    two_stage_lower_bound,
)
from .decoding import (
    Classification,
    HypercubeResult,
    classify,
    dd_set,
    dnd_set,
    hypercube_decode,
    run_tests,
    stage2_count,
)
from .designs import (
    Bernoulli,
    ConstantTestsPerItem,
    Dorfman,
    DoublyConstant,
    Hypercube,
    HypercubeDesign,
    Individual,
    PoolingDesign,
    SchemeConfig,
    bernoulli_design,
    ctpi_design,
    dorfman_design,
    doubly_constant_design,
    generate_design,
    hypercube_design,
    scheme_t1,
    write_design_csv,
)
from .simulate import (
    DefectivePrior,
    ExperimentSummary,
    FixedKPrior,
    IIDPrior,
    TrialResult,
    exact_dc_fixed_k_et2,
    run_experiment,
    run_trial,
    sample_defectives,
    table1_preset,
)
from .theory import (
    bernoulli_et,
    bernoulli_optimum,
    ctpi_et,
    dc_et,
    dorfman_et,
    entropy,
    mutesa_asymptotic_et,
    mutesa_rate,
    optimize_scheme,
    rate,
)

__version__ = "0.1.0"
