//! Ready-made systems: a driven two-level atom, the four-level engineered
//! decay scheme, and the three-level Raman system.
//!
//! Ground states come first in every basis, so population columns line up
//! across scenarios.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::system::{Advisory, Jump, SystemSpec};

/// Basis indices of the four-level scheme.
pub mod four_level {
    pub const G1: usize = 0;
    pub const G2: usize = 1;
    pub const E1: usize = 2;
    pub const E2: usize = 3;
    pub const LABELS: [&str; 4] = ["g1", "g2", "e1", "e2"];
}

/// Basis indices of the Raman system.
pub mod raman {
    pub const G0: usize = 0;
    pub const G1: usize = 1;
    pub const E: usize = 2;
    pub const LABELS: [&str; 3] = ["0", "1", "e"];
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")))
    }
}

fn finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Symmetric real coupling `x (|a><b| + |b><a|)`.
fn coupling(dim: usize, a: usize, b: usize, x: f64) -> ComplexMatrix {
    let ab = ComplexMatrix::ket_bra(dim, a, b, real(x)).expect("indices in range");
    &ab + &ab.adjoint()
}

fn decay(dim: usize, to: usize, from: usize, rate: f64) -> ComplexMatrix {
    ComplexMatrix::ket_bra(dim, to, from, real(rate.sqrt())).expect("indices in range")
}

/// Ground `|0>` driven to `|1>` with Rabi frequency `omega` and detuning
/// `delta`; `|1>` decays back at rate `gamma` (jump label `gamma`).
///
/// `H = delta |1><1| + omega/2 (|0><1| + |1><0|)`.
pub fn two_level(omega: f64, delta: f64, gamma: f64) -> Result<SystemSpec> {
    finite("omega", omega)?;
    finite("delta", delta)?;
    positive("gamma", gamma)?;
    let h = &ComplexMatrix::real_diagonal(&[0.0, delta])? + &coupling(2, 0, 1, omega / 2.0);
    SystemSpec::new(h, [0], vec![Jump::new("gamma", decay(2, 0, 1, gamma))])
        .with_basis_labels(["0", "1"])
        .validated()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelParams {
    /// Rabi frequency of the `|g1> <-> |e1>` drive.
    pub omega: f64,
    /// Detuning of `|e1>`.
    pub big_delta: f64,
    /// Detuning of `|e2>`.
    pub small_delta: f64,
    /// Coupling between `|e1>` and `|e2>`.
    pub g: f64,
    /// Decay `|e1> -> |g1>`.
    pub gamma: f64,
    /// Decay `|e2> -> |g2>`.
    pub kappa: f64,
}

impl FourLevelParams {
    /// `g = 1`, `gamma = kappa = g/10` at the optimal detunings.
    pub fn at_optimum(omega: f64) -> Self {
        let (g, gamma, kappa) = (1.0, 0.1, 0.1);
        let opt = optimal_detunings(g, gamma, kappa).expect("positive constants");
        Self {
            omega,
            big_delta: opt.big_delta,
            small_delta: opt.small_delta,
            g,
            gamma,
            kappa,
        }
    }

    /// `omega = gamma / 10` on top of [`Self::at_optimum`].
    pub fn weak() -> Self {
        Self::at_optimum(0.01)
    }

    pub fn tilde_big_delta(&self) -> C64 {
        C64::new(self.big_delta, -self.gamma / 2.0)
    }

    pub fn tilde_small_delta(&self) -> C64 {
        C64::new(self.small_delta, -self.kappa / 2.0)
    }

    /// `kappa g^2 omega^2 / (4 |g^2 - d~ D~|^2)`, the rate of `|g1> -> |g2>`.
    pub fn kappa_eff(&self) -> f64 {
        let denom = (real(self.g * self.g) - self.tilde_small_delta() * self.tilde_big_delta()).norm_sqr();
        self.kappa * self.g * self.g * self.omega * self.omega / (4.0 * denom)
    }

    /// `gamma |d~|^2 omega^2 / (4 |d~ D~ - g^2|^2)`, the dephasing of `|g1>`.
    pub fn gamma_eff(&self) -> f64 {
        let sd = self.tilde_small_delta();
        let denom = (sd * self.tilde_big_delta() - real(self.g * self.g)).norm_sqr();
        self.gamma * sd.norm_sqr() * self.omega * self.omega / (4.0 * denom)
    }
}

/// Four-level dissipative preparation of `|g2>`: `|g1>` is weakly driven to
/// `|e1>`, which is coupled to `|e2>`; `|e1>` decays to `|g1>` (label
/// `gamma`) and `|e2>` to `|g2>` (label `kappa`). `H_g = 0`.
pub fn engineered_four_level(p: &FourLevelParams) -> Result<SystemSpec> {
    use four_level::*;
    finite("omega", p.omega)?;
    finite("Delta", p.big_delta)?;
    finite("delta", p.small_delta)?;
    finite("g", p.g)?;
    positive("gamma", p.gamma)?;
    positive("kappa", p.kappa)?;
    let mut h = ComplexMatrix::real_diagonal(&[0.0, 0.0, p.big_delta, p.small_delta])?;
    h += &coupling(4, E1, E2, p.g);
    h += &coupling(4, G1, E1, p.omega / 2.0);
    let jumps = vec![
        Jump::new("gamma", decay(4, G1, E1, p.gamma)),
        Jump::new("kappa", decay(4, G2, E2, p.kappa)),
    ];
    SystemSpec::new(h, [G1, G2], jumps).with_basis_labels(LABELS).validated()
}

/// Detunings that maximize the engineered decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalDetunings {
    /// `g sqrt(gamma / kappa)`.
    pub big_delta: f64,
    /// `g^2 / big_delta`.
    pub small_delta: f64,
    /// Present when `g` is not much larger than `gamma` and `kappa`.
    pub advisory: Option<Advisory>,
}

/// Ratio `max(gamma, kappa) / g` above which the strong-coupling assumption
/// behind the optimum is flagged.
pub const STRONG_COUPLING_RATIO: f64 = 0.2;

pub fn optimal_detunings(g: f64, gamma: f64, kappa: f64) -> Result<OptimalDetunings> {
    positive("g", g)?;
    positive("gamma", gamma)?;
    positive("kappa", kappa)?;
    let big_delta = g * (gamma / kappa).sqrt();
    let ratio = gamma.max(kappa) / g;
    let advisory = (ratio > STRONG_COUPLING_RATIO).then(|| Advisory {
        message: format!(
            "coupling g = {g} is not much larger than the decay rates (max(gamma, kappa)/g = {ratio:.3}); \
             the detuning optimum is approximate"
        ),
        ratio,
    });
    Ok(OptimalDetunings {
        big_delta,
        small_delta: g * g / big_delta,
        advisory,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanParams {
    pub omega0: f64,
    pub omega1: f64,
    pub delta0: f64,
    pub delta1: f64,
    /// Decay `|e> -> |0>`.
    pub gamma0: f64,
    /// Decay `|e> -> |1>`.
    pub gamma1: f64,
}

impl RamanParams {
    /// `omega_{0,1} = Delta/10` with `Delta = delta0 + delta1 = 1`, detunings
    /// split symmetrically by `splitting = delta1 - delta0`, and equal decay
    /// rates `gamma` into both ground states.
    pub fn symmetric(splitting: f64, gamma: f64) -> Self {
        let total = 1.0;
        Self {
            omega0: total / 10.0,
            omega1: total / 10.0,
            delta0: (total - splitting) / 2.0,
            delta1: (total + splitting) / 2.0,
            gamma0: gamma,
            gamma1: gamma,
        }
    }

    /// Dissipation-free run: splitting `Delta/1000`, no decay.
    pub fn undamped() -> Self {
        Self::symmetric(1e-3, 0.0)
    }

    /// Dissipative run: splitting `Delta/100`, `gamma_{0,1} = Delta/10`.
    pub fn damped() -> Self {
        Self::symmetric(1e-2, 0.1)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma0 + self.gamma1
    }
}

/// Raman system with ground states `|0>`, `|1>` and excited `|e>`.
///
/// `H_g = -delta0 |0><0| - delta1 |1><1|` (nonperturbative, use the dressed
/// variant), `H_e = 0`, drives `omega_l/2 (|l><e| + h.c.)`, decays
/// `sqrt(gamma_l) |l><e>` labelled `gamma0` and `gamma1`. Both jumps are kept
/// even when their rate is zero.
///
/// Without any decay `H_NH` vanishes; pass `allow_no_decay` to accept the
/// purely Hermitian effective dynamics that remain.
pub fn raman_three_level(p: &RamanParams, allow_no_decay: bool) -> Result<SystemSpec> {
    use raman::*;
    for (name, v) in [("omega0", p.omega0), ("omega1", p.omega1), ("delta0", p.delta0), ("delta1", p.delta1)] {
        finite(name, v)?;
    }
    for (name, v) in [("gamma0", p.gamma0), ("gamma1", p.gamma1)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
        }
    }
    if p.gamma() <= 0.0 && !allow_no_decay {
        return Err(Error::InvalidParameter(
            "gamma0 + gamma1 must be positive (set allow_no_decay for Hermitian-only dynamics)".into(),
        ));
    }
    let mut h = ComplexMatrix::real_diagonal(&[-p.delta0, -p.delta1, 0.0])?;
    h += &coupling(3, G0, E, p.omega0 / 2.0);
    h += &coupling(3, G1, E, p.omega1 / 2.0);
    let jumps = vec![
        Jump::new("gamma0", decay(3, G0, E, p.gamma0)),
        Jump::new("gamma1", decay(3, G1, E, p.gamma1)),
    ];
    SystemSpec::new(h, [G0, G1], jumps).with_basis_labels(LABELS).validated()
}
