//! Factor the designed unitaries into beam splitters and phase shifters.
//!
//!     cargo run --example beam_splitter_mesh

use qfilter::designer::{design, design_with, Placement};
use qfilter::linalg::max_abs_diff;
use qfilter::{decompose, instances, recompose, solve, Ensemble};

fn show(label: &str, e: &Ensemble, placement: Option<Placement>) -> qfilter::Result<()> {
    let sol = solve(e)?;
    let d = match placement {
        Some(p) => design_with(e, &sol, p)?,
        None => design(e, &sol)?,
    };
    let mesh = decompose(&d.unitary)?;
    println!("{label}: {} layers", mesh.layers.len());
    for l in &mesh.layers {
        println!("  T({},{})  t = {:+.6}  r = {:+.6}  phi = {:+.6}", l.p, l.q, l.t, l.r, l.phi);
    }
    println!("  output phases {:?}", mesh.output_phases.map(|x| (x * 1e6).round() / 1e6));
    println!("  recomposition error {:.1e}", max_abs_diff(&recompose(&mesh), &d.unitary));
    Ok(())
}

fn main() -> qfilter::Result<()> {
    show("second example", &instances::worked_example_two(), None)?;
    show("first example, s = 0.5", &instances::worked_example_one(0.5)?, Some(Placement::Swapped))?;
    show("orthogonal triple", &instances::orthogonal_triple(), None)?;
    Ok(())
}
