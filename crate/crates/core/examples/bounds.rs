//! Scaling of the breather's frequency and profile errors with eps.

use kg_breathers::dnls::single_pulse_soliton;
use kg_breathers::kg_breather::verify_bounds;
use kg_breathers::LatticeGrid;

fn main() -> kg_breathers::Result<()> {
    let grid = LatticeGrid::dirichlet(1, 40);
    let branch = single_pulse_soliton(1, 5.0, &grid, 1e-13)?;
    let r = verify_bounds(&branch, &[0.02, 0.01, 0.005, 0.0025], 1e-12)?;
    println!("{:>8} {:>12} {:>12} {:>12}", "eps", "omega err", "profile err", "tail");
    for i in 0..r.eps_list.len() {
        println!("{:>8} {:>12.3e} {:>12.3e} {:>12.3e}", r.eps_list[i], r.omega_err[i], r.profile_err[i], r.tail_err[i]);
    }
    println!("log-log slopes: {:.3} {:.3} {:.3}", r.fitted_slopes[0], r.fitted_slopes[1], r.fitted_slopes[2]);
    Ok(())
}
