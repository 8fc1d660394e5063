//! Stationary profile of the truncated normal form next to the dNLS soliton.

use kg_breathers::dnls::single_pulse_soliton;
use kg_breathers::lattice::l2_norm;
use kg_breathers::normal_form::{build_scaled_hamiltonian, continue_generalized_soliton, lie_transform_normal_form, NormalFormBudget, Poly};
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 6);
    let branch = single_pulse_soliton(1, 5.0, &grid, 1e-13)?;
    let h: Poly<faer::c64> = build_scaled_hamiltonian(grid, 1, 1.0, 6)?;
    for eps in [0.04, 0.02, 0.01, 0.005] {
        let mut budget = NormalFormBudget::new(2, 0.5, 0.25, eps)?;
        let nf = lie_transform_normal_form(&h, 2, &mut budget)?;
        let sol = continue_generalized_soliton(&nf.z, &branch.amplitude, branch.params.omega, eps, 1e-13, 0.01)?;
        let gap = l2_norm(&sol.amplitude.sub(&branch.amplitude));
        println!("eps = {eps:<6} |frak A - A| = {gap:.4e}  ratio/eps = {:.4}", gap / eps);
    }
    Ok(())
}
