//! Resonant normal form in exact rational arithmetic.

use kg_breathers::normal_form::{
    build_scaled_hamiltonian, harmonic_action, lie_transform_normal_form, GaussRational, NormalFormBudget, Poly,
};
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 1);
    let r = 2;
    let h: Poly<GaussRational> = build_scaled_hamiltonian(grid, 1, 1.0, 2 + 2 * r)?;
    let mut budget = NormalFormBudget::new(r, 0.5, 0.25, 0.05)?;
    let nf = lie_transform_normal_form(&h, r, &mut budget)?;
    for (s, z) in nf.z.iter().enumerate() {
        println!("Z_{} ({} terms):", s + 1, z.len());
        for (m, c) in &z.terms {
            println!("  {:<28} {}", m.label(), kg_breathers::normal_form::Coeff::render(c));
        }
    }
    let commutes = harmonic_action::<GaussRational>(grid, 2 + 2 * r).bracket(&nf.normal_form_part())?.is_empty();
    println!("{{G, Z}} = 0: {commutes}");
    println!("homological residuals: {:?}", nf.homological_residuals);
    println!("budget: {:?}", budget.diagnostics);
    Ok(())
}
