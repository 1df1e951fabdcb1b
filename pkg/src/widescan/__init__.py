"""Compressed wideband spectrum sensing at sub-Nyquist rates.

Block-structured occupancy simulation, reduction-matrix and PN-mixing
measurement, a sparse-recovery solver suite built around block-weighted l1
minimization, cooperative fusion, occupancy forecasting, and a seeded
Monte Carlo experiment harness.
"""

from .cooperative import (
    PENDING,
    Contribution,
    FusionCenter,
    SecondaryUser,
    fuse_votes,
    pool_and_recover,
    su_sense,
)
from .greedy import solve_assamp, solve_cosamp, solve_omp
from .measurement import (
    AfeBank,
    ReductionMatrix,
    SensingMatrix,
    afe_measure,
    bank_to_reduction,
    build_reduction,
    coherence,
    compose_sensing,
    load_reduction,
    make_afe_bank,
    measure,
    reduction_to_bank,
    save_reduction,
)
from .prediction import (
    OccupancyHistory,
    Predictor,
    fit_gd,
    fit_svr,
    history_from_csv,
    history_to_csv,
    predict_sparsity,
    required_measurements,
)
from .recovery import (
    RecoveryProblem,
    RecoveryResult,
    WeightMatrix,
    calibrate_threshold,
    decide_occupancy,
    design_weights,
    error_gain,
    nmse,
    nmse_l2,
    solve_bp,
    solve_lasso,
    solve_wlasso,
    solve_wlasso_scaled,
)
from .spectrum import (
    BlockPartition,
    NoiseModel,
    SpectrumInstance,
    add_time_noise,
    average_block_sparsity,
    make_block_partition,
    sample_instance,
    snr_of,
)

__version__ = "0.1.0"
