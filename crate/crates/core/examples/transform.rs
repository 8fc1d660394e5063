use faer::c64;
use kg_breathers::normal_form::{
    build_scaled_hamiltonian, lie_transform_normal_form, CoordinateTransform, NormalFormBudget, Poly,
};
use kg_breathers::LatticeGrid;

/// Round trip through the near-identity change of coordinates.
fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 2);
    let eps = 0.03;
    let h: Poly<c64> = build_scaled_hamiltonian(grid, 1, 1.0, 6)?;
    let mut budget = NormalFormBudget::new(2, 0.5, 0.25, eps)?;
    let nf = lie_transform_normal_form(&h, 2, &mut budget)?;
    let tr = CoordinateTransform::new(&nf.chi, eps)?;
    let z: Vec<c64> = (0..grid.num_sites()).map(|j| c64::new(0.3 / (1.0 + j as f64), 0.1)).collect();
    let original = tr.forward(&z);
    let back = tr.inverse(&original)?;
    for ((a, b), c) in z.iter().zip(&original).zip(&back) {
        println!("{a:.6}  ->  {b:.6}  ->  {c:.6}");
    }
    Ok(())
}
