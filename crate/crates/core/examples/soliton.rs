//! Single-pulse dNLS soliton on a 1-d lattice, in both frames.
//!
//! `cargo run --example soliton -- 5.0`

use kg_breathers::dnls::{anticontinuum_focusing_seed, single_pulse_soliton, solve_focusing_soliton};
use kg_breathers::lattice::stagger;
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let omega_tilde: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let grid = LatticeGrid::dirichlet(1, 10);
    let branch = single_pulse_soliton(1, omega_tilde, &grid, 1e-12)?;
    println!(
        "Omega = {}  mass = {:.6}  energy = {:.6}  residual = {:.1e}",
        branch.params.omega, branch.mass, branch.energy, branch.residual_norm
    );

    let focus = solve_focusing_soliton(1, omega_tilde, &grid, &anticontinuum_focusing_seed(&grid, 1, omega_tilde), 1e-12)?;
    let (staggered, _) = stagger(&focus, omega_tilde);
    println!("{:>4} {:>14} {:>14}", "n", "defocusing A", "focusing A");
    for (i, (a, f)) in branch.amplitude.values.iter().zip(&focus.values).enumerate() {
        println!("{:>4} {a:>14.8} {f:>14.8}", i as isize - 10);
    }
    let diff = staggered.values.iter().zip(&branch.amplitude.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    println!("max |stagger(focusing) - defocusing| = {diff:.1e}");
    Ok(())
}
