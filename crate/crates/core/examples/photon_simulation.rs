//! Monte-Carlo single-photon counting on the second example.
//!
//!     cargo run --release --example photon_simulation -- [trials] [seed]

use qfilter::simulator::{port_probabilities, sample};
use qfilter::{design, instances, solve};

fn main() -> qfilter::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|a| a.parse().ok()).unwrap_or(1_000_000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    let e = instances::worked_example_two();
    let sol = solve(&e)?;
    let d = design(&e, &sol)?;
    for i in 0..3 {
        println!("P(port | psi_{}) = {:.6?}", i + 1, port_probabilities(&d, i));
    }

    let r = sample(&d, &e, trials, seed)?;
    for (i, s) in r.per_state.iter().enumerate() {
        println!("psi_{}: {} trials, counts {:?}", i + 1, s.trials, s.counts);
    }
    let sigma = (sol.average_failure * (1.0 - sol.average_failure) / trials as f64).sqrt();
    println!(
        "failure rate {:.6} vs {:.6} ({:+.2} sigma), forbidden clicks {}",
        r.empirical_failure,
        sol.average_failure,
        (r.empirical_failure - sol.average_failure) / sigma,
        r.violations
    );
    Ok(())
}
