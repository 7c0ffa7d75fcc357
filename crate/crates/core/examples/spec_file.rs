//! Writes a system to the JSON document format, reads it back and derives
//! the effective operators from the copy.

use adiabatic_elim::cli::document::SpecDocument;
use adiabatic_elim::effective::{effective_operators_dressed, effective_rate};
use adiabatic_elim::scenarios::{raman, raman_three_level, RamanParams};
use adiabatic_elim::system::{partition, validate};
use serde_json::Map;

fn main() -> adiabatic_elim::error::Result<()> {
    let spec = raman_three_level(&RamanParams::damped(), false)?.with_basis_labels(raman::LABELS);
    let path = std::env::temp_dir().join("raman-spec.json");
    std::fs::write(&path, SpecDocument::from_spec(&spec, Map::new()).to_json())?;
    println!("wrote {}", path.display());

    let copy = SpecDocument::read(&path)?.to_spec()?;
    print!("validation: {}", validate(&copy));
    let a = effective_operators_dressed(&partition(&spec)?, &spec.jumps)?;
    let b = effective_operators_dressed(&partition(&copy)?, &copy.jumps)?;
    println!("h_eff identical after round trip: {}", a.h_eff == b.h_eff);
    for label in ["gamma0", "gamma1"] {
        println!(
            "{label}: rate 0 -> 1 = {:.6e}, 1 -> 0 = {:.6e}",
            effective_rate(&b, label, raman::G0, raman::G1)?,
            effective_rate(&b, label, raman::G1, raman::G0)?
        );
    }
    Ok(())
}
