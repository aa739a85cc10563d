//! Overlaps, the parallel/perpendicular split of psi_1 and the weight w that
//! bounds q1 from below.
//!
//!     cargo run --example geometry

use qfilter::instances;
use qfilter::linalg::C64;
use qfilter::states::{overlaps, parallel_component, parallel_component_norm2, perpendicular_component};

fn main() -> qfilter::Result<()> {
    let e = instances::worked_example_two();
    let o = overlaps(&e);
    println!("O12 = {:.6}", o.o12);
    println!("O13 = {:.6}", o.o13);
    println!("O23 = {:.6}", o.o23);
    println!("alpha = {:.6}", o.alpha);

    let par = parallel_component(&e)?;
    let perp = perpendicular_component(&e)?;
    println!("psi_1 parallel      = {}", show(par.iter()));
    println!("psi_1 perpendicular = {}", show(perp.iter()));
    println!("w = |psi_1 parallel|^2 = {:.6}", parallel_component_norm2(&e)?);
    Ok(())
}

fn show<'a>(v: impl Iterator<Item = &'a C64>) -> String {
    let parts: Vec<String> = v.map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}
