//! Linear spectrum: dNLS eigenvalues, and Floquet multipliers of the
//! breather from the Hill method and from the monodromy matrix.

use faer::c64;
use kg_breathers::dnls::{dnls_spectrum, single_pulse_soliton};
use kg_breathers::kg_breather::{seed_from_soliton, solve_breather, SolveMode};
use kg_breathers::kg_spectrum::{
    floquet_multiplier, hill_assemble, hill_eigenvalues, in_fundamental_strip, monodromy_oracle,
};
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 8);
    let branch = single_pulse_soliton(1, 1.0, &grid, 1e-13)?;
    println!("dNLS eigenvalues off the real axis:");
    for pair in dnls_spectrum(&branch)?.iter().filter(|p| p.lambda.im > 1e-9) {
        println!("  Λ = {:+.6}i  krein {}  band {}", pair.lambda.im, pair.krein, pair.in_band);
    }

    let b = solve_breather(&seed_from_soliton(&branch, 0.05, 10)?, 1e-13, SolveMode::FixFrequencyParam)?;
    let mut hill: Vec<c64> = hill_eigenvalues(&hill_assemble(&b, 10)?)?
        .into_iter()
        .filter(|l| in_fundamental_strip(*l, b.omega))
        .map(|l| floquet_multiplier(l, b.omega))
        .collect();
    let mono = monodromy_oracle(&b, b.period() / 4000.0)?;
    hill.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    println!("Floquet multipliers (Hill, nearest monodromy):");
    for mu in &hill {
        let near = mono.iter().min_by(|x, y| (*x - mu).norm().total_cmp(&(*y - mu).norm())).unwrap();
        println!("  {:+.8} {:+.8}i  |mu| = {:.10}  gap {:.1e}", mu.re, mu.im, mu.norm(), (near - mu).norm());
    }
    Ok(())
}
