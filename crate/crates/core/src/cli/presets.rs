use clap::{Args, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::Result;
use crate::scenarios::{self, FourLevelParams, RamanParams};
use crate::system::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    TwoLevel,
    FourLevel,
    Raman,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::TwoLevel => "two-level",
            Preset::FourLevel => "four-level",
            Preset::Raman => "raman",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Preset::TwoLevel => "driven two-level atom; --omega 0.1 --delta 1 --gamma 0.2",
            Preset::FourLevel => {
                "engineered decay into |g2>; --g 1 --gamma 0.1 --kappa 0.1 --omega 0.01, detunings default to the optimum"
            }
            Preset::Raman => {
                "three-level Raman system; --omega0 0.1 --omega1 0.1 --delta0 0.495 --delta1 0.505 --gamma0 0.1 --gamma1 0.1"
            }
        }
    }
}

/// Scenario parameters; unset values take the preset's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct PresetParams {
    /// Rabi frequency (two-level, four-level)
    #[arg(long)]
    pub omega: Option<f64>,
    /// Detuning of the excited state (two-level)
    #[arg(long)]
    pub delta: Option<f64>,
    /// Excited-state decay rate (two-level, four-level)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Detuning of |e1> (four-level)
    #[arg(long)]
    pub big_delta: Option<f64>,
    /// Detuning of |e2> (four-level)
    #[arg(long)]
    pub small_delta: Option<f64>,
    /// Excited-state coupling (four-level)
    #[arg(long)]
    pub g: Option<f64>,
    /// Decay of |e2> into |g2> (four-level)
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    /// Accept a Raman system without any decay
    #[arg(long)]
    pub allow_no_decay: bool,
}

/// Builds the preset system and records its parameters as metadata.
pub fn build(preset: Preset, p: &PresetParams) -> Result<(SystemSpec, Map<String, Value>)> {
    let (spec, params) = match preset {
        Preset::TwoLevel => {
            let (omega, delta, gamma) = (p.omega.unwrap_or(0.1), p.delta.unwrap_or(1.0), p.gamma.unwrap_or(0.2));
            (
                scenarios::two_level(omega, delta, gamma)?,
                json!({ "omega": omega, "delta": delta, "gamma": gamma }),
            )
        }
        Preset::FourLevel => {
            let base = FourLevelParams::weak();
            let g = p.g.unwrap_or(base.g);
            let gamma = p.gamma.unwrap_or(base.gamma);
            let kappa = p.kappa.unwrap_or(base.kappa);
            let opt = scenarios::optimal_detunings(g, gamma, kappa)?;
            let params = FourLevelParams {
                omega: p.omega.unwrap_or(base.omega),
                big_delta: p.big_delta.unwrap_or(opt.big_delta),
                small_delta: p.small_delta.unwrap_or(opt.small_delta),
                g,
                gamma,
                kappa,
            };
            (
                scenarios::engineered_four_level(&params)?,
                json!({
                    "omega": params.omega, "Delta": params.big_delta, "delta": params.small_delta,
                    "g": g, "gamma": gamma, "kappa": kappa,
                }),
            )
        }
        Preset::Raman => {
            let base = RamanParams::damped();
            let r = RamanParams {
                omega0: p.omega0.unwrap_or(base.omega0),
                omega1: p.omega1.unwrap_or(base.omega1),
                delta0: p.delta0.unwrap_or(base.delta0),
                delta1: p.delta1.unwrap_or(base.delta1),
                gamma0: p.gamma0.unwrap_or(base.gamma0),
                gamma1: p.gamma1.unwrap_or(base.gamma1),
            };
            (
                scenarios::raman_three_level(&r, p.allow_no_decay)?,
                json!({
                    "omega0": r.omega0, "omega1": r.omega1, "delta0": r.delta0, "delta1": r.delta1,
                    "gamma0": r.gamma0, "gamma1": r.gamma1,
                }),
            )
        }
    };
    let mut meta = Map::new();
    meta.insert("preset".into(), Value::from(preset.name()));
    meta.insert("parameters".into(), params);
    Ok((spec, meta))
}
