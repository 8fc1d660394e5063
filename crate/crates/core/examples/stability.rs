//! Perturbed breather over a few hundred periods: orbital distance, energy and `G`.

use kg_breathers::dnls::single_pulse_soliton;
use kg_breathers::dynamics::orbital_stability_run;
use kg_breathers::kg_breather::{seed_from_soliton, solve_breather, SolveMode};
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let eps = 0.05;
    let grid = LatticeGrid::dirichlet(1, 15);
    let branch = single_pulse_soliton(1, 5.0, &grid, 1e-13)?;
    let b = solve_breather(&seed_from_soliton(&branch, eps, 8)?, 1e-12, SolveMode::FixFrequencyParam)?;
    let t_final = 500.0 * b.period();
    let trace = orbital_stability_run(&b, 1e-3, t_final, b.period() / 2000.0)?;
    println!("|B| = {:.4}", trace.breather_norm);
    println!("max orbital distance      {:.3e}", trace.max_distance());
    println!("relative H oscillation    {:.3e}", trace.relative_h_oscillation());
    println!("relative H drift          {:.3e}", trace.relative_h_drift());
    println!("max |G - G0| / (eps G0)   {:.3}  (sampled once per period)", trace.max_g_variation() / (eps * trace.g_values[0]));
    Ok(())
}
