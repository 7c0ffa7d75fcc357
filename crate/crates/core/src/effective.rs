//! Effective ground-state operators obtained by adiabatically eliminating the
//! decaying excited states.
//!
//! All four variants share one structure. Excitations `V_+` are propagated
//! through the excited manifold by an inverse non-Hermitian Hamiltonian and
//! then either return to the ground states through `V_-`, giving the
//! effective Hamiltonian, or decay through a jump operator `L_k`, giving one
//! effective jump operator per decay channel:
//!
//! ```text
//! H_eff   = -1/2 [ V_- S + (V_- S)^dag ] + H_g
//! L_eff^k = L_k S
//! ```
//!
//! The variants differ only in the propagated excitation `S`:
//!
//! | variant   | `S`                                                    |
//! |-----------|--------------------------------------------------------|
//! | basic     | `H_NH^-1 V_+`                                          |
//! | dressed   | `sum_l (H_NH - E_l)^-1 V_+ P_l`                        |
//! | fields    | `sum_f (H_NH - w_f)^-1 v_+^f e^{-i w_f t}`             |
//! | general   | `sum_{f,l} (H_NH - E_l - w_f)^-1 v_+^f P_l e^{-i w_f t}` |
//!
//! where `H_NH = H_e - i/2 sum_k L_k^dag L_k` and `(E_l, P_l)` is the spectral
//! decomposition of the ground-state Hamiltonian.

use std::fmt;

use crate::error::{Error, Result, SingularChannel};
use crate::linalg::{hermitian_eigendecomposition_on, mat_inverse, ComplexMatrix, C64, HERMITICITY_TOL};
use crate::system::{FieldDrive, Jump, Partition, STRUCTURE_TOL};

/// Label of the implicit zero-frequency drive formed by the static `V_+`.
pub const STATIC_DRIVE_LABEL: &str = "static";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Basic,
    Dressed,
    Fields,
    General,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Basic, Variant::Dressed, Variant::Fields, Variant::General];

    pub fn is_time_dependent(self) -> bool {
        matches!(self, Variant::Fields | Variant::General)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Basic => "basic",
            Variant::Dressed => "dressed",
            Variant::Fields => "fields",
            Variant::General => "general",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Variant::Basic),
            "dressed" => Ok(Variant::Dressed),
            "fields" => Ok(Variant::Fields),
            "general" => Ok(Variant::General),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant `{other}` (expected basic, dressed, fields or general)"
            ))),
        }
    }
}

/// Effective Hamiltonian and jump operators acting on the ground subspace.
///
/// Matrices keep the full system dimension; they vanish outside the
/// ground-ground block.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveModel {
    pub variant: Variant,
    pub h_eff: ComplexMatrix,
    /// One effective operator per input jump operator, same labels and order.
    pub l_eff: Vec<Jump>,
    /// `H_NH`, kept for diagnostics.
    pub h_nh: ComplexMatrix,
    pub ground: Vec<usize>,
}

impl EffectiveModel {
    pub fn dim(&self) -> usize {
        self.h_eff.dim()
    }

    pub fn jump(&self, label: &str) -> Result<&Jump> {
        self.l_eff
            .iter()
            .find(|j| j.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// `H_NH = H_e - (i/2) sum_k L_k^dag L_k`.
pub fn nh_hamiltonian(h_e: &ComplexMatrix, jumps: &[Jump]) -> ComplexMatrix {
    let mut decay = ComplexMatrix::zeros(h_e.dim());
    for j in jumps {
        decay += &(&j.op.adjoint() * &j.op);
    }
    h_e - &decay.scale(C64::new(0.0, 0.5))
}

fn check_jump_dims(p: &Partition, jumps: &[Jump]) -> Result<()> {
    match jumps.iter().find(|j| j.op.dim() != p.dim()) {
        Some(j) => Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: j.op.dim(),
        }),
        None => Ok(()),
    }
}

/// `(H_NH - shift)^-1` on the excited block, where `shift = E_l + w_f`.
fn propagator(
    h_nh: &ComplexMatrix,
    excited: &[usize],
    ground_energy: Option<f64>,
    field: Option<(&str, f64)>,
) -> Result<ComplexMatrix> {
    let shift = ground_energy.unwrap_or(0.0) + field.map_or(0.0, |(_, w)| w);
    let shifted = if shift == 0.0 {
        h_nh.masked(excited, excited)
    } else {
        (h_nh - &ComplexMatrix::projector(h_nh.dim(), excited).scale_real(shift)).masked(excited, excited)
    };
    mat_inverse(&shifted, Some(excited)).map_err(|e| match e {
        Error::Singular {
            min_pivot,
            max_pivot,
        } => Error::SingularPropagator(SingularChannel {
            ground_energy,
            field: field.map(|(l, w)| (l.to_string(), w)),
            min_pivot,
            max_pivot,
        }),
        other => other,
    })
}

/// `-1/2 (X + X^dag) + H_g`, checked for Hermiticity.
fn effective_hamiltonian(coupling: &ComplexMatrix, h_g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = &(coupling + &coupling.adjoint()).scale_real(-0.5) + h_g;
    let scale = h.max_abs();
    let residual = if scale > 0.0 {
        h.hermiticity_residual() / scale
    } else {
        0.0
    };
    if residual > HERMITICITY_TOL {
        return Err(Error::NonHermitianResult { residual });
    }
    Ok(h.hermitian_part())
}

fn assemble(
    variant: Variant,
    p: &Partition,
    jumps: &[Jump],
    h_nh: ComplexMatrix,
    propagated: &ComplexMatrix,
) -> Result<EffectiveModel> {
    let h_eff = effective_hamiltonian(&(&p.v_minus * propagated), &p.h_g)?;
    let l_eff = jumps
        .iter()
        .map(|j| Jump::new(j.label.clone(), &j.op * propagated))
        .collect();
    Ok(EffectiveModel {
        variant,
        h_eff,
        l_eff,
        h_nh,
        ground: p.ground.clone(),
    })
}

/// Effective operators for perturbative ground-state coupling and a single
/// static drive:
/// `H_eff = -1/2 V_- (H_NH^-1 + H_NH^-1^dag) V_+ + H_g`, `L_eff^k = L_k H_NH^-1 V_+`.
pub fn effective_operators_basic(p: &Partition, jumps: &[Jump]) -> Result<EffectiveModel> {
    check_jump_dims(p, jumps)?;
    let h_nh = nh_hamiltonian(&p.h_e, jumps);
    let g = propagator(&h_nh, &p.excited, None, None)?;
    let s = &g * &p.v_plus;
    assemble(Variant::Basic, p, jumps, h_nh, &s)
}

/// Effective operators including a nonperturbative ground Hamiltonian.
///
/// `H_g` is diagonalized; each dressed ground state `l` is excited with its own
/// propagator `(H_NH - E_l)^-1`. Degenerate energies share one propagator.
pub fn effective_operators_dressed(p: &Partition, jumps: &[Jump]) -> Result<EffectiveModel> {
    check_jump_dims(p, jumps)?;
    let h_nh = nh_hamiltonian(&p.h_e, jumps);
    let spaces = hermitian_eigendecomposition_on(&p.h_g, &p.ground)?;
    let mut s = ComplexMatrix::zeros(p.dim());
    for space in &spaces {
        let g = propagator(&h_nh, &p.excited, Some(space.energy), None)?;
        s += &(&g * &(&p.v_plus * &space.projector));
    }
    assemble(Variant::Dressed, p, jumps, h_nh, &s)
}

/// One propagated excitation `A = (H_NH - E_l - w_f)^-1 v_+^f P_l`,
/// oscillating as `e^{-i w_f t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedTerm {
    pub field: String,
    pub omega: f64,
    /// Dressed ground energy `E_l` (general variant only).
    pub ground_energy: Option<f64>,
    pub block: ComplexMatrix,
}

/// Effective operators of the multi-field variants as a function of time.
///
/// Propagator products are computed once; [`TimeDependentModel::at`] only
/// sums precomputed matrices with phase factors.
#[derive(Debug, Clone)]
pub struct TimeDependentModel {
    pub variant: Variant,
    pub h_g: ComplexMatrix,
    pub h_nh: ComplexMatrix,
    pub ground: Vec<usize>,
    /// Drives as `(label, omega, v_+)`, including the implicit static one.
    pub drives: Vec<FieldDrive>,
    pub terms: Vec<PropagatedTerm>,
    pub labels: Vec<String>,
    /// `L_k A_term`, indexed `[k][term]`.
    jump_terms: Vec<Vec<ComplexMatrix>>,
    /// `(w_drive - w_term, v_-^drive A_term)` for every drive/term pair.
    coupling_terms: Vec<(f64, ComplexMatrix)>,
}

impl TimeDependentModel {
    fn new(
        variant: Variant,
        p: &Partition,
        jumps: &[Jump],
        h_nh: ComplexMatrix,
        drives: Vec<FieldDrive>,
        terms: Vec<PropagatedTerm>,
    ) -> Self {
        let jump_terms = jumps
            .iter()
            .map(|j| terms.iter().map(|t| &j.op * &t.block).collect())
            .collect();
        let coupling_terms = drives
            .iter()
            .flat_map(|d| {
                let v_minus = d.v_plus.adjoint();
                terms
                    .iter()
                    .map(move |t| (d.omega - t.omega, &v_minus * &t.block))
                    .collect::<Vec<_>>()
            })
            .collect();
        Self {
            variant,
            h_g: p.h_g.clone(),
            h_nh,
            ground: p.ground.clone(),
            drives,
            terms,
            labels: jumps.iter().map(|j| j.label.clone()).collect(),
            jump_terms,
            coupling_terms,
        }
    }

    pub fn dim(&self) -> usize {
        self.h_g.dim()
    }

    /// True when every drive has zero frequency, so [`Self::at`] is constant.
    pub fn is_static(&self) -> bool {
        self.drives.iter().all(|d| d.omega == 0.0)
    }

    /// Largest drive frequency magnitude.
    pub fn max_frequency(&self) -> f64 {
        self.drives.iter().fold(0.0, |m, d| m.max(d.omega.abs()))
    }

    /// Effective operators at time `t`.
    pub fn at(&self, t: f64) -> Result<EffectiveModel> {
        let dim = self.dim();
        let mut coupling = ComplexMatrix::zeros(dim);
        for (w, m) in &self.coupling_terms {
            coupling += &phased(m, *w, t);
        }
        let h_eff = effective_hamiltonian(&coupling, &self.h_g)?;
        let l_eff = self
            .labels
            .iter()
            .zip(&self.jump_terms)
            .map(|(label, blocks)| {
                let mut l = ComplexMatrix::zeros(dim);
                for (block, term) in blocks.iter().zip(&self.terms) {
                    l += &phased(block, -term.omega, t);
                }
                Jump::new(label.clone(), l)
            })
            .collect();
        Ok(EffectiveModel {
            variant: self.variant,
            h_eff,
            l_eff,
            h_nh: self.h_nh.clone(),
            ground: self.ground.clone(),
        })
    }

    /// Long-time average of `|<to|L_eff^k(t)|from>|^2`.
    ///
    /// Terms sharing a frequency add coherently; distinct frequencies average
    /// out their cross terms. Exact over any common period of the beat notes.
    pub fn time_averaged_rate(&self, label: &str, from: usize, to: usize) -> Result<f64> {
        check_ground_index(&self.ground, from)?;
        check_ground_index(&self.ground, to)?;
        let k = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let mut by_frequency: Vec<(f64, C64)> = Vec::new();
        for (block, term) in self.jump_terms[k].iter().zip(&self.terms) {
            let amp = block[(to, from)];
            match by_frequency.iter_mut().find(|(w, _)| *w == term.omega) {
                Some((_, acc)) => *acc += amp,
                None => by_frequency.push((term.omega, amp)),
            }
        }
        Ok(by_frequency.iter().map(|(_, a)| a.norm_sqr()).sum())
    }
}

/// `m e^{i w t}`, skipping the phase when it is exactly one.
fn phased(m: &ComplexMatrix, w: f64, t: f64) -> ComplexMatrix {
    if w == 0.0 || t == 0.0 {
        m.clone()
    } else {
        m.scale(C64::from_polar(1.0, w * t))
    }
}

fn collect_drives(p: &Partition, fields: &[FieldDrive]) -> Result<Vec<FieldDrive>> {
    let mut drives = Vec::with_capacity(fields.len() + 1);
    if !p.v_plus.is_zero() {
        drives.push(FieldDrive::new(STATIC_DRIVE_LABEL, p.v_plus.clone(), 0.0));
    }
    for f in fields {
        if f.v_plus.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: f.v_plus.dim(),
            });
        }
        let residual = f.v_plus.off_block_residual(&p.excited, &p.ground);
        if residual > STRUCTURE_TOL {
            return Err(Error::VariantPreconditionFailed(format!(
                "field `{}` is not an excitation block (residual {residual:e})",
                f.label
            )));
        }
        drives.push(f.clone());
    }
    Ok(drives)
}

/// Effective operators for several drives `v_+^f e^{-i w_f t}` with
/// perturbative ground coupling; one propagator `(H_NH - w_f)^-1` per drive.
///
/// A nonzero static `V_+` in the partition is included as an extra
/// zero-frequency drive labelled [`STATIC_DRIVE_LABEL`].
pub fn effective_operators_fields(
    p: &Partition,
    jumps: &[Jump],
    fields: &[FieldDrive],
) -> Result<TimeDependentModel> {
    check_jump_dims(p, jumps)?;
    let drives = collect_drives(p, fields)?;
    let h_nh = nh_hamiltonian(&p.h_e, jumps);
    let terms = drives
        .iter()
        .map(|d| {
            let g = propagator(&h_nh, &p.excited, None, Some((&d.label, d.omega)))?;
            Ok(PropagatedTerm {
                field: d.label.clone(),
                omega: d.omega,
                ground_energy: None,
                block: &g * &d.v_plus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeDependentModel::new(Variant::Fields, p, jumps, h_nh, drives, terms))
}

/// Most general effective operators: several drives and a nonperturbative
/// ground Hamiltonian, with propagators `(H_NH - E_l - w_f)^-1`.
pub fn effective_operators_general(
    p: &Partition,
    jumps: &[Jump],
    fields: &[FieldDrive],
) -> Result<TimeDependentModel> {
    check_jump_dims(p, jumps)?;
    let drives = collect_drives(p, fields)?;
    let h_nh = nh_hamiltonian(&p.h_e, jumps);
    let spaces = hermitian_eigendecomposition_on(&p.h_g, &p.ground)?;
    let mut terms = Vec::with_capacity(drives.len() * spaces.len());
    for d in &drives {
        for space in &spaces {
            let g = propagator(&h_nh, &p.excited, Some(space.energy), Some((&d.label, d.omega)))?;
            terms.push(PropagatedTerm {
                field: d.label.clone(),
                omega: d.omega,
                ground_energy: Some(space.energy),
                block: &g * &(&d.v_plus * &space.projector),
            });
        }
    }
    Ok(TimeDependentModel::new(Variant::General, p, jumps, h_nh, drives, terms))
}

/// No-jump Hamiltonian `H_eff - (i/2) sum_k L_eff^k^dag L_eff^k`.
pub fn effective_nh_hamiltonian(model: &EffectiveModel) -> ComplexMatrix {
    let mut decay = ComplexMatrix::zeros(model.dim());
    for l in &model.l_eff {
        decay += &(&l.op.adjoint() * &l.op);
    }
    &model.h_eff - &decay.scale(C64::new(0.0, 0.5))
}

fn relative_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).max_abs() / scale
    }
}

fn require_basic(model: &EffectiveModel) -> Result<()> {
    if model.variant != Variant::Basic {
        return Err(Error::VariantPreconditionFailed(format!(
            "identity holds for the basic variant only, got {}",
            model.variant
        )));
    }
    Ok(())
}

/// Relative residual of `H_eff,NH = -V_- H_NH^-1 V_+ + H_g` for a basic model.
///
/// The right-hand side is rebuilt from the partition and a fresh inverse of
/// `model.h_nh`.
pub fn no_jump_identity_residual(model: &EffectiveModel, p: &Partition) -> Result<f64> {
    require_basic(model)?;
    let g = mat_inverse(&model.h_nh.masked(&p.excited, &p.excited), Some(&p.excited))?;
    let rhs = &p.h_g - &(&p.v_minus * &(&g * &p.v_plus));
    Ok(relative_residual(&effective_nh_hamiltonian(model), &rhs))
}

/// Relative residual of
/// `sum_k L_eff^k^dag L_eff^k = -i V_- (H_NH^-1 - H_NH^-1^dag) V_+` for a basic model.
pub fn lindblad_sum_identity_residual(model: &EffectiveModel, p: &Partition) -> Result<f64> {
    require_basic(model)?;
    let mut lhs = ComplexMatrix::zeros(model.dim());
    for l in &model.l_eff {
        lhs += &(&l.op.adjoint() * &l.op);
    }
    let g = mat_inverse(&model.h_nh.masked(&p.excited, &p.excited), Some(&p.excited))?;
    let rhs = (&p.v_minus * &(&(&g - &g.adjoint()) * &p.v_plus)).scale(C64::new(0.0, -1.0));
    Ok(relative_residual(&lhs, &rhs))
}

fn check_ground_index(ground: &[usize], i: usize) -> Result<()> {
    if ground.binary_search(&i).is_ok() {
        Ok(())
    } else {
        Err(Error::NotGroundIndex(i))
    }
}

/// Effective transition rate `|<to|L_eff^k|from>|^2`.
pub fn effective_rate(model: &EffectiveModel, label: &str, from: usize, to: usize) -> Result<f64> {
    check_ground_index(&model.ground, from)?;
    check_ground_index(&model.ground, to)?;
    Ok(model.jump(label)?.op[(to, from)].norm_sqr())
}

/// One entry of the excited-state propagator table.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorElement {
    pub row: usize,
    pub col: usize,
    /// `<e_row|H_NH^-1|e_col>`.
    pub propagator: C64,
    /// `1 / <e_row|H_NH^-1|e_col>`: an effective complex detuning on the
    /// diagonal, an effective complex coupling off it. `None` stands for
    /// infinity (vanishing propagator element).
    pub effective: Option<C64>,
}

/// Inverts `H_NH` on the excited block and reports the reciprocal of every
/// element, the effective complex detunings and couplings that set the
/// strength of each effective process.
pub fn excited_propagator_elements(h_nh: &ComplexMatrix, excited: &[usize]) -> Result<Vec<PropagatorElement>> {
    let g = propagator(h_nh, excited, None, None)?;
    let scale = g.max_abs();
    let mut out = Vec::with_capacity(excited.len() * excited.len());
    for &i in excited {
        for &j in excited {
            let z = g[(i, j)];
            let effective = (z.norm() > 1e-14 * scale).then(|| z.inv());
            out.push(PropagatorElement {
                row: i,
                col: j,
                propagator: z,
                effective,
            });
        }
    }
    Ok(out)
}
