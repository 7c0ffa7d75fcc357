//! Three-level Raman system: the dressed effective model against the full
//! dynamics, without and with spontaneous emission.

use std::f64::consts::PI;

use adiabatic_elim::dynamics::{compare, integrate, DensityMatrix, Trajectory};
use adiabatic_elim::effective::{effective_operators_basic, effective_operators_dressed, effective_rate, EffectiveModel};
use adiabatic_elim::scenarios::{raman, raman_three_level, RamanParams};
use adiabatic_elim::system::partition;

/// Period of the effective two-photon Rabi oscillation between |0> and |1>.
fn rabi_period(m: &EffectiveModel) -> f64 {
    let (g0, g1) = (raman::G0, raman::G1);
    let split = m.h_eff[(g0, g0)].re - m.h_eff[(g1, g1)].re;
    2.0 * PI / (split * split + 4.0 * m.h_eff[(g0, g1)].norm_sqr()).sqrt()
}

fn envelope_deviation(full: &Trajectory, eff: &Trajectory, window: f64) -> f64 {
    let smooth = full.running_average(window);
    let mut worst: f64 = 0.0;
    for (s, e) in smooth.iter().zip(&eff.populations) {
        for i in [raman::G0, raman::G1] {
            worst = worst.max((s[i] - e[i]).abs());
        }
    }
    worst
}

fn main() -> adiabatic_elim::error::Result<()> {
    let dt: f64 = std::env::args().nth(1).map_or(0.05, |s| s.parse().expect("dt"));
    let rho0 = DensityMatrix::basis_state(3, raman::G1)?;

    for (name, params, allow_no_decay) in [("no decay", RamanParams::undamped(), true), ("decay", RamanParams::damped(), false)] {
        let spec = raman_three_level(&params, allow_no_decay)?;
        let p = partition(&spec)?;
        let dressed = effective_operators_dressed(&p, &spec.jumps)?;
        let period = rabi_period(&dressed);
        let fast = 2.0 * PI / ((params.delta0 + params.delta1) / 2.0);
        let t_end = 5.0 * period;
        println!("{name}: effective Rabi period {period:.1}, fast period {fast:.2}, t_end {t_end:.1}");
        if !allow_no_decay {
            let up = effective_rate(&dressed, "gamma1", raman::G0, raman::G1)?;
            let down = effective_rate(&dressed, "gamma0", raman::G1, raman::G0)?;
            println!("  effective decays 0->1 {up:.4e}, 1->0 {down:.4e}");
            let basic = effective_operators_basic(&p, &spec.jumps)?;
            println!("  basic variant (ignoring H_g) 0->1 rate {:.4e}", effective_rate(&basic, "gamma1", raman::G0, raman::G1)?);
        }
        let full = integrate(&spec, &rho0, t_end, dt, 1)?;
        let eff = integrate(&dressed, &rho0, t_end, dt, 1)?;
        let m = compare(&full, &eff)?;
        println!(
            "  pointwise deviation {:.4}, envelope deviation {:.4}, excited leakage {:.4}",
            m.max_population_deviation,
            envelope_deviation(&full, &eff, fast),
            m.max_excited_population
        );
        let (f, e) = (full.populations.last().expect("sampled"), eff.populations.last().expect("sampled"));
        println!("  final populations full ({:.4}, {:.4}), effective ({:.4}, {:.4})", f[0], f[1], e[0], e[1]);
    }
    Ok(())
}
