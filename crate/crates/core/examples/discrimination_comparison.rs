//! Filtering versus full three-state discrimination and two-state
//! discrimination.
//!
//!     cargo run --release --example discrimination_comparison

use std::f64::consts::SQRT_2;

use qfilter::instances;
use qfilter::oracle::compare;

fn main() -> qfilter::Result<()> {
    let cases = [
        ("symmetric s = 0.5", instances::symmetric(0.5)?),
        ("s1 = sqrt(2)/5, s2 = 0.8", instances::two_overlap(SQRT_2 / 5.0, 0.8)?),
        ("second optical example", instances::worked_example_two()),
    ];
    for (label, e) in cases {
        let c = compare(&e, 1e-3)?;
        println!(
            "{label:<26} Q = {:.5}  Q' = {:.5}  Q'' = {:.5}  Q/Q' = {:.4}",
            c.q, c.q_prime, c.q_double_prime, c.ratio
        );
    }
    Ok(())
}
