//! Dissipative preparation of |g2> in the four-level scheme: full against
//! effective dynamics for increasing drive strength.

use adiabatic_elim::dynamics::{compare, integrate, DensityMatrix};
use adiabatic_elim::effective::{effective_operators_basic, effective_rate};
use adiabatic_elim::scenarios::{engineered_four_level, four_level, FourLevelParams};
use adiabatic_elim::system::partition;

fn main() -> adiabatic_elim::error::Result<()> {
    let dt: f64 = std::env::args().nth(1).map_or(0.05, |s| s.parse().expect("dt"));
    let weak = FourLevelParams::weak();
    let spec = engineered_four_level(&weak)?;
    let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
    let kappa_eff = effective_rate(&model, "kappa", four_level::G1, four_level::G2)?;
    let t_end = 10.0 / kappa_eff;
    println!("kappa_eff = {kappa_eff:.6e}, closed form {:.6e}, t_end = {t_end:.1}", weak.kappa_eff());

    let rho0 = DensityMatrix::basis_state(4, four_level::G1)?;
    for ratio in [0.1, 0.2, 0.5, 1.0] {
        let params = FourLevelParams::at_optimum(ratio * weak.gamma);
        let spec = engineered_four_level(&params)?;
        let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
        let start = std::time::Instant::now();
        let full = integrate(&spec, &rho0, t_end, dt, 100)?;
        let eff = integrate(&model, &rho0, t_end, dt, 100)?;
        let m = compare(&full, &eff)?;
        let last = full.populations.last().expect("sampled");
        println!(
            "Omega = {ratio:>4} gamma: max deviation {:.4}, leakage {:.4}, final P(g2) {:.4}, drift {:.1e} ({:.1?})",
            m.max_population_deviation,
            m.max_excited_population,
            last[four_level::G2],
            full.trace_drift.max(eff.trace_drift),
            start.elapsed()
        );
    }
    Ok(())
}
