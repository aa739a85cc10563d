//! The three optimal regimes across the symmetric family and for a skewed
//! prior where projecting onto the parallel part wins.
//!
//!     cargo run --example filter_regimes

use qfilter::simulator::von_neumann_baselines;
use qfilter::{instances, solve};

fn main() -> qfilter::Result<()> {
    println!("{:>5} {:>18} {:>9} {:>9} {:>9}", "s", "regime", "q1", "Q", "best VN");
    for s in [0.1, 0.3, 0.5, 0.7, 0.75, 0.9] {
        let e = instances::symmetric(s)?;
        let sol = solve(&e)?;
        let vn = von_neumann_baselines(&e)?.best();
        println!(
            "{s:>5} {:>18} {:>9.6} {:>9.6} {:>9.6}",
            sol.regime.to_string(),
            sol.q[0],
            sol.average_failure,
            vn
        );
    }

    // psi_1 nearly certain and weakly overlapping: q1 sits on its lower bound
    let e = instances::two_overlap_with_priors(0.1, 0.0, [0.98, 0.01, 0.01])?;
    let sol = solve(&e)?;
    println!(
        "\nskewed priors: {} with q1 = {:.4} = w = {:.4}",
        sol.regime, sol.q[0], sol.parallel_norm2
    );
    Ok(())
}
