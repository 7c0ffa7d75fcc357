//! Three drive fields of different frequency on a three-level system: the
//! time-dependent effective operators and their averaged rates.

use adiabatic_elim::dynamics::{compare, integrate, DensityMatrix};
use adiabatic_elim::effective::{effective_operators_fields, effective_operators_general, effective_rate};
use adiabatic_elim::linalg::{ComplexMatrix, C64};
use adiabatic_elim::system::{partition, FieldDrive, Jump, SystemSpec};

fn main() -> adiabatic_elim::error::Result<()> {
    // |0>, |1> ground with a small splitting, |e> detuned by 2
    let h = ComplexMatrix::real_diagonal(&[0.0, 0.05, 2.0])?;
    let decay = |g: usize, rate: f64| ComplexMatrix::ket_bra(3, g, 2, C64::new(rate.sqrt(), 0.0));
    let jumps = vec![Jump::new("to0", decay(0, 0.5)?), Jump::new("to1", decay(1, 0.5)?)];
    let drive = |g: usize, amp: f64| ComplexMatrix::ket_bra(3, 2, g, C64::new(amp, 0.0));
    let fields = vec![
        FieldDrive::new("pump", drive(0, 0.05)?, 0.3),
        FieldDrive::new("probe", drive(0, 0.03)?, -0.2),
        FieldDrive::new("repump", drive(1, 0.05)?, 0.1),
    ];
    let spec = SystemSpec::new(h, [0, 1], jumps).with_fields(fields).validated()?;
    let p = partition(&spec)?;

    for (name, model) in [
        ("fields", effective_operators_fields(&p, &spec.jumps, &spec.fields)?),
        ("general", effective_operators_general(&p, &spec.jumps, &spec.fields)?),
    ] {
        println!("{name}: {} propagated terms, fastest frequency {}", model.terms.len(), model.max_frequency());
        for t in [0.0, 2.5, 5.0, 10.0] {
            let at = model.at(t)?;
            println!(
                "  t = {t:>4}: <0|h_eff|0> = {:+.4e}, rate 0 -> 1 = {:.4e}",
                at.h_eff[(0, 0)].re,
                effective_rate(&at, "to1", 0, 1)?
            );
        }
        println!(
            "  time-averaged rates: 0 -> 1 = {:.4e}, 1 -> 0 = {:.4e}",
            model.time_averaged_rate("to1", 0, 1)?,
            model.time_averaged_rate("to0", 1, 0)?
        );

        let rho0 = DensityMatrix::basis_state(3, 0)?;
        let full = integrate(&spec, &rho0, 200.0, 0.02, 50)?;
        let eff = integrate(&model, &rho0, 200.0, 0.02, 50)?;
        let m = compare(&full, &eff)?;
        println!(
            "  against full dynamics: max deviation {:.3e}, leakage {:.3e}",
            m.max_population_deviation, m.max_excited_population
        );
    }
    Ok(())
}
