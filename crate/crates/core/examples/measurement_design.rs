//! Success and failure vectors and the four-mode unitary for the second
//! optical example.
//!
//!     cargo run --example measurement_design

use qfilter::designer::{build_l, design};
use qfilter::{instances, solve};

fn main() -> qfilter::Result<()> {
    let e = instances::worked_example_two();
    let sol = solve(&e)?;
    println!("q = {:?}, Q = {:.6}", sol.q, sol.average_failure);

    let l = build_l(&e, &sol)?;
    println!("success Gram matrix L = {:.6}", l);

    let d = design(&e, &sol)?;
    d.validate(1e-10)?;
    println!("placement {:?}, theta = {:.6}", d.placement, d.theta);
    for (i, out) in d.outputs().iter().enumerate() {
        let parts: Vec<String> = out.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
        println!("psi_{} out = ({})", i + 1, parts.join(", "));
    }
    println!("M(4) = {:.6}", d.unitary);
    Ok(())
}
