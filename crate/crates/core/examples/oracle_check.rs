//! Brute-force scan against the closed form on random ensembles, with the
//! Lagrange-condition residuals at each optimum.
//!
//!     cargo run --release --example oracle_check -- [count]

use qfilter::oracle::{appendix_residuals, brute_force_filter};
use qfilter::random::random_ensemble;
use qfilter::solve;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qfilter::Result<()> {
    let count = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!("{:>18} {:>10} {:>10} {:>9} {:>9}", "regime", "Q", "scan", "|dQ|", "residual");
    for _ in 0..count {
        let e = random_ensemble(&mut rng)?;
        let sol = solve(&e)?;
        let scan = brute_force_filter(&e, 1e-4)?;
        let res = appendix_residuals(&e, &sol);
        println!(
            "{:>18} {:>10.6} {:>10.6} {:>9.1e} {:>9.1e}",
            sol.regime.to_string(),
            sol.average_failure,
            scan.q_star,
            (scan.q_star - sol.average_failure).abs(),
            res.max_required()
        );
    }
    Ok(())
}
