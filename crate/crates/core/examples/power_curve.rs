//! Mass and energy along the single-pulse branch.

use kg_breathers::dnls::power_curve;
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 20);
    let omegas: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
    println!("{:>8} {:>10} {:>12} {:>12}", "Omega~", "Omega", "mass", "energy");
    for pt in power_curve(1, &grid, &omegas, 1e-12)? {
        println!("{:>8.2} {:>10.2} {:>12.6} {:>12.6}", pt.omega_tilde, pt.omega, pt.mass, pt.energy);
    }
    Ok(())
}
