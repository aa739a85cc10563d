//! CSV of Q, Q' and Q'' over the symmetric family, ready for plotting.
//!
//!     cargo run --release --example figure_sweep > sweep.csv

use qfilter::cli::{sweep, sweep_csv, SweepSpec};

fn main() {
    match sweep(&SweepSpec::symmetric_default()) {
        Ok(rows) => print!("{}", sweep_csv(&rows)),
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(1);
        }
    }
}
