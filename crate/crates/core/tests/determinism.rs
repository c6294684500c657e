use omega_ergodic::arith::{PrimeFamily, PrimeSet};
use omega_ergodic::dynamics::{br_observable, AdditiveSystem, State, StateFunction};
use omega_ergodic::ergodic::{
    default_checkpoints, omega_histograms, restricted_average_with, AverageOptions, Normalization, RandomDisc,
    Restriction,
};

fn restrictions() -> Vec<Restriction> {
    vec![
        Restriction::all(),
        Restriction::squarefree(PrimeSet::new([2, 7]).unwrap(), None),
        Restriction::squarefree(PrimeSet::empty(), Some(PrimeFamily::one_mod_four())),
        Restriction::kfull(3, Normalization::PerRoot).unwrap(),
    ]
}

#[test]
fn averages_do_not_depend_on_threads_or_blocks() {
    let obs =
        br_observable(&AdditiveSystem::golden(), &State::point(0.25).unwrap(), &StateFunction::sin_squared()).unwrap();
    let grid = default_checkpoints(300_000);
    for r in restrictions() {
        let base = restricted_average_with(&obs, &r, &AverageOptions::new(grid.clone())).unwrap();
        for (threads, block_len) in [(2, 1 << 16), (7, 1000), (4, 1)] {
            let mut options = AverageOptions::new(grid.clone()).threads(threads);
            options.block_len = block_len;
            let other = restricted_average_with(&obs, &r, &options).unwrap();
            for (a, b) in base.checkpoints.iter().zip(&other.checkpoints) {
                assert_eq!(a.members, b.members);
                // the merge order is fixed, but block boundaries move
                assert!((a.value - b.value).norm() < 1e-14, "{r:?} threads={threads}");
            }
        }
        let repeat =
            restricted_average_with(&RandomDisc::new(1), &r, &AverageOptions::new(grid.clone()).threads(8)).unwrap();
        let again =
            restricted_average_with(&RandomDisc::new(1), &r, &AverageOptions::new(grid.clone()).threads(8)).unwrap();
        assert_eq!(repeat, again);
    }
}

#[test]
fn histograms_do_not_depend_on_threads() {
    for r in restrictions() {
        let one = omega_histograms(&r, &[1000, 50_000, 200_000], 1).unwrap();
        let many = omega_histograms(&r, &[1000, 50_000, 200_000], 6).unwrap();
        assert_eq!(one, many);
        assert_eq!(one[2].counts.iter().sum::<u64>(), one[2].members);
    }
}
