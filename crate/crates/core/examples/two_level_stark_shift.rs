//! Light shift and scattering rate of a driven two-level atom, and how well
//! the single-state effective model reproduces the ground population.

use adiabatic_elim::dynamics::{compare, integrate, DensityMatrix};
use adiabatic_elim::effective::{effective_operators_basic, effective_rate};
use adiabatic_elim::scenarios::two_level;
use adiabatic_elim::system::partition;

fn main() -> adiabatic_elim::error::Result<()> {
    let (omega, gamma) = (0.1, 0.2);
    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>10}", "delta", "shift", "closed form", "rate", "closed form", "deviation");
    for delta in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let spec = two_level(omega, delta, gamma)?;
        let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
        let denom = 4.0 * delta * delta + gamma * gamma;

        let rho0 = DensityMatrix::basis_state(2, 0)?;
        let full = integrate(&spec, &rho0, 50.0, 0.01, 100)?;
        let eff = integrate(&model, &rho0, 50.0, 0.01, 100)?;
        println!(
            "{delta:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e} {:>10.2e}",
            model.h_eff[(0, 0)].re,
            -omega * omega * delta / denom,
            effective_rate(&model, "gamma", 0, 0)?,
            gamma * omega * omega / denom,
            compare(&full, &eff)?.max_population_deviation,
        );
    }
    Ok(())
}
