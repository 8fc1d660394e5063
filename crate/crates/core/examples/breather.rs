//! Klein-Gordon breather continued from the dNLS soliton, with its
//! harmonic content and a one-period check in the time domain.

use kg_breathers::dnls::single_pulse_soliton;
use kg_breathers::kg_breather::{seed_from_soliton, solve_breather, time_domain_check, SolveMode};
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let eps = 0.05;
    let grid = LatticeGrid::dirichlet(1, 15);
    let branch = single_pulse_soliton(1, 5.0, &grid, 1e-13)?;
    let b = solve_breather(&seed_from_soliton(&branch, eps, 8)?, 1e-12, SolveMode::FixFrequencyParam)?;
    println!("omega = {:.12}  (1 - eps*Omega/2 = {:.12})", b.omega, 1.0 - eps * branch.params.omega / 2.0);
    println!("residual = {:.2e}", b.residual_norm);
    for (m, n) in b.harmonic_norms().iter().enumerate() {
        println!("  |A^({m})| = {n:.3e}");
    }
    println!("return-map error over one period: {:.2e}", time_domain_check(&b, 1e-10)?);
    Ok(())
}
