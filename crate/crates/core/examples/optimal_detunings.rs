//! Engineered decay rate of the four-level scheme around its optimal
//! detunings, with the excited-state propagator table.

use adiabatic_elim::effective::{effective_operators_basic, effective_rate, excited_propagator_elements};
use adiabatic_elim::scenarios::{engineered_four_level, four_level, optimal_detunings, FourLevelParams};
use adiabatic_elim::system::partition;

fn kappa_eff(p: &FourLevelParams) -> adiabatic_elim::error::Result<f64> {
    let spec = engineered_four_level(p)?;
    let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
    effective_rate(&model, "kappa", four_level::G1, four_level::G2)
}

fn main() -> adiabatic_elim::error::Result<()> {
    let base = FourLevelParams::weak();
    let opt = optimal_detunings(base.g, base.gamma, base.kappa)?;
    println!("optimum: Delta = {}, delta = {}", opt.big_delta, opt.small_delta);
    if let Some(a) = &opt.advisory {
        println!("advisory: {}", a.message);
    }
    let best = kappa_eff(&base)?;
    println!("kappa_eff = {best:.6e}, Omega^2/(8 gamma) = {:.6e}", base.omega * base.omega / (8.0 * base.gamma));

    println!("\nkappa_eff relative to the optimum (rows Delta, columns delta):");
    let scales = [0.5, 0.8, 1.0, 1.25, 2.0];
    print!("{:>8}", "");
    for s in scales {
        print!("{:>8}", format!("x{s}"));
    }
    println!();
    for sd in scales {
        print!("{:>8}", format!("x{sd}"));
        for ss in scales {
            let p = FourLevelParams {
                big_delta: opt.big_delta * sd,
                small_delta: opt.small_delta * ss,
                ..base
            };
            print!("{:>8.3}", kappa_eff(&p)? / best);
        }
        println!();
    }

    let spec = engineered_four_level(&base)?;
    let model = effective_operators_basic(&partition(&spec)?, &spec.jumps)?;
    println!("\nexcited propagator elements 1/<i|H_NH^-1|j>:");
    for e in excited_propagator_elements(&model.h_nh, &spec.excited())? {
        let (i, j) = (four_level::LABELS[e.row], four_level::LABELS[e.col]);
        match e.effective {
            Some(z) => println!("  ({i}, {j}): {:+.4} {:+.4}i", z.re, z.im),
            None => println!("  ({i}, {j}): inf"),
        }
    }
    Ok(())
}
