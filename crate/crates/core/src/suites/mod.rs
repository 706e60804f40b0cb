//! Verification suites shared by the command-line harness and the
//! acceptance tests. Every suite appends lines to a [`Report`](crate::report::Report).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Vec2, Window};
use crate::substitution::{SubstitutionSystem, SystemError};

pub mod assumptions;
pub mod filters;
pub mod groupoid;
pub mod semigroup;

/// Individual failing instances listed per check before truncation.
pub const FAILURE_LINES: usize = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` windows `(T - x)(B_radius)` of the fixed point at seeded
/// positions `x ∈ B_reach`.
pub fn seeded_windows(
    system: &SubstitutionSystem,
    count: usize,
    radius: u32,
    reach: u32,
    seed: u64,
) -> Result<Vec<Window>, SystemError> {
    let big = system.fixed_point_window(reach + radius)?;
    let mut rng = rng(seed);
    let r = reach as i32;
    Ok((0..count)
        .map(|_| {
            let x = Vec2::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
            big.shifted(x).expect("inside the generated ball").restrict(radius)
        })
        .collect())
}
