//! Restricted ergodic averages and the statistics built on them.

mod average;
mod loyd;
mod normal;
mod observable;
mod probe;
mod propositions;
mod richter;

pub use average::{
    checkpoint_grid, default_checkpoints, omega_histograms, restricted_average, restricted_average_with, Accumulator,
    AverageOptions, AverageSeries, Checkpoint, Enumerator, HorizonMode, Member, Normalization, OmegaHistogram,
    Restriction, RestrictionKind, SumCount, DEFAULT_BLOCK_LEN,
};
pub use loyd::{loyd_observable, LoydObservable, Statistic};
pub use normal::{
    bkw_normalized, ek_ks_distance, ek_normalized, gaussian_expectation, ks_distance_to_gaussian, ks_distance_weighted,
    normal_cdf, CompactFunction, NormalizerParams, MIN_HORIZON,
};
pub use observable::{Constant, Context, Dilated, FnObservable, Observable, Point, RandomDisc, DENSE_TABLE_CAP};
pub use probe::multiplication_probe;
pub use propositions::{
    iterated_totient_omega, proposition3_residual, proposition3_sides, proposition5_range, proposition5_residual,
    proposition5_sides, totient_shift_bound_check,
};
pub use richter::{richter_shift_delta, richter_shift_deltas, ShiftDelta};
