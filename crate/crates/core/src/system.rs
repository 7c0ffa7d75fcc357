//! Open-system definitions and the ground/excited partition of the Hamiltonian.
//!
//! A [`SystemSpec`] declares which basis states are ground states; everything
//! else is excited. The Hamiltonian then splits into four blocks
//! `H = H_g + H_e + V_+ + V_-`, and every jump operator must take the system
//! from the excited to the ground subspace.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, C64, HERMITICITY_TOL};

/// Absolute tolerance for block-structure checks on jump operators and drives.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Ratio `||V_+||_F / min decay rate` above which the weak-drive advisory fires.
pub const WEAK_DRIVE_RATIO: f64 = 0.5;

/// A labelled Lindblad jump operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub label: String,
    pub op: ComplexMatrix,
}

impl Jump {
    pub fn new(label: impl Into<String>, op: ComplexMatrix) -> Self {
        Self {
            label: label.into(),
            op,
        }
    }
}

/// A perturbative drive `v_+ e^{-i omega t} + h.c.` coupling ground to excited states.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDrive {
    pub label: String,
    /// Excitation block, supported on excited rows and ground columns.
    pub v_plus: ComplexMatrix,
    pub omega: f64,
}

impl FieldDrive {
    pub fn new(label: impl Into<String>, v_plus: ComplexMatrix, omega: f64) -> Self {
        Self {
            label: label.into(),
            v_plus,
            omega,
        }
    }
}

/// Full definition of an open system.
///
/// The static `hamiltonian` must already be expressed in a time-independent
/// frame; explicit time dependence belongs in `fields` only.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub dim: usize,
    /// Sorted basis indices of the ground subspace. The complement is excited.
    pub ground: Vec<usize>,
    pub hamiltonian: ComplexMatrix,
    pub jumps: Vec<Jump>,
    pub fields: Vec<FieldDrive>,
    pub basis_labels: Option<Vec<String>>,
}

impl SystemSpec {
    /// Creates a spec with no drive fields. Ground indices are sorted and
    /// deduplicated; nothing else is checked until [`validate`].
    pub fn new(hamiltonian: ComplexMatrix, ground: impl IntoIterator<Item = usize>, jumps: Vec<Jump>) -> Self {
        let mut ground: Vec<usize> = ground.into_iter().collect();
        ground.sort_unstable();
        ground.dedup();
        Self {
            dim: hamiltonian.dim(),
            ground,
            hamiltonian,
            jumps,
            fields: Vec::new(),
            basis_labels: None,
        }
    }

    pub fn with_fields(mut self, fields: Vec<FieldDrive>) -> Self {
        self.fields = fields;
        self
    }

    pub fn with_basis_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Self {
        self.basis_labels = Some(labels.into_iter().map(Into::into).collect());
        self
    }

    pub fn excited(&self) -> Vec<usize> {
        (0..self.dim).filter(|i| self.ground.binary_search(i).is_err()).collect()
    }

    pub fn jump(&self, label: &str) -> Option<&Jump> {
        self.jumps.iter().find(|j| j.label == label)
    }

    pub fn basis_label(&self, i: usize) -> String {
        self.basis_labels
            .as_ref()
            .and_then(|l| l.get(i).cloned())
            .unwrap_or_else(|| i.to_string())
    }

    /// Returns the spec unchanged if it validates, else the full report.
    pub fn validated(self) -> Result<Self> {
        let report = validate(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidSpec(report))
        }
    }
}

/// Which structural assumption a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// An operator's dimension differs from the system dimension.
    Dimension,
    /// Ground set empty, not a proper subset, or out of range.
    GroundSubspace,
    /// `H` is not Hermitian.
    Hermiticity,
    /// A jump operator is not of the form `P_g L P_e`.
    JumpDirection,
    /// A drive is not of the form `P_e v P_g`.
    FieldDirection,
    /// Two jump operators or two fields share a label.
    DuplicateLabel,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Invariant::Dimension => "dimension",
            Invariant::GroundSubspace => "ground-subspace",
            Invariant::Hermiticity => "hamiltonian-hermiticity",
            Invariant::JumpDirection => "jump-direction (L = P_g L P_e)",
            Invariant::FieldDirection => "field-direction (v_+ = P_e v_+ P_g)",
            Invariant::DuplicateLabel => "unique-labels",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: Invariant,
    /// Label of the offending operator (`hamiltonian`, a jump or field label, ...).
    pub subject: String,
    pub residual: f64,
    pub detail: String,
}

/// Non-fatal warning about the regime the spec sits in.
#[derive(Debug, Clone, PartialEq)]
pub struct Advisory {
    pub message: String,
    pub ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub advisories: Vec<Advisory>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "valid")?;
        }
        for v in &self.violations {
            writeln!(
                f,
                "violation [{}] {}: residual {:e}; {}",
                v.invariant, v.subject, v.residual, v.detail
            )?;
        }
        for a in &self.advisories {
            writeln!(f, "advisory: {} (ratio {:.3})", a.message, a.ratio)?;
        }
        Ok(())
    }
}

/// Checks every structural assumption of the effective operator formalism.
///
/// Violations are collected rather than returned early so all problems can be
/// reported at once. Invertibility of `H_NH` is not checked here; it surfaces
/// when effective operators are derived.
pub fn validate(spec: &SystemSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let dim = spec.dim;
    let mut push = |invariant, subject: &str, residual, detail: String| {
        report.violations.push(Violation {
            invariant,
            subject: subject.to_string(),
            residual,
            detail,
        })
    };

    let mut dims_ok = spec.hamiltonian.dim() == dim;
    if !dims_ok {
        push(
            Invariant::Dimension,
            "hamiltonian",
            0.0,
            format!("dimension {} but system has {dim}", spec.hamiltonian.dim()),
        );
    }
    for j in &spec.jumps {
        if j.op.dim() != dim {
            dims_ok = false;
            push(Invariant::Dimension, &j.label, 0.0, format!("dimension {} but system has {dim}", j.op.dim()));
        }
    }
    for f in &spec.fields {
        if f.v_plus.dim() != dim {
            dims_ok = false;
            push(Invariant::Dimension, &f.label, 0.0, format!("dimension {} but system has {dim}", f.v_plus.dim()));
        }
        if !f.omega.is_finite() {
            push(Invariant::FieldDirection, &f.label, f64::INFINITY, "frequency is not finite".into());
        }
    }
    if let Some(labels) = &spec.basis_labels {
        if labels.len() != dim {
            push(
                Invariant::Dimension,
                "basis_labels",
                0.0,
                format!("{} labels for dimension {dim}", labels.len()),
            );
        }
    }

    let mut ground_ok = true;
    if let Some(&bad) = spec.ground.iter().find(|&&i| i >= dim) {
        ground_ok = false;
        push(Invariant::GroundSubspace, "ground_indices", 0.0, format!("index {bad} out of range 0..{dim}"));
    }
    let mut sorted = spec.ground.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != spec.ground.len() || sorted != spec.ground {
        ground_ok = false;
        push(Invariant::GroundSubspace, "ground_indices", 0.0, "indices must be sorted and unique".into());
    }
    if spec.ground.is_empty() {
        ground_ok = false;
        push(Invariant::GroundSubspace, "ground_indices", 0.0, "ground subspace is empty".into());
    } else if ground_ok && spec.ground.len() >= dim {
        ground_ok = false;
        push(Invariant::GroundSubspace, "ground_indices", 0.0, "excited subspace is empty".into());
    }

    for (kind, labels) in [
        ("jump", spec.jumps.iter().map(|j| j.label.as_str()).collect::<Vec<_>>()),
        ("field", spec.fields.iter().map(|f| f.label.as_str()).collect::<Vec<_>>()),
    ] {
        for (a, la) in labels.iter().enumerate() {
            if labels[..a].contains(la) {
                push(Invariant::DuplicateLabel, la, 0.0, format!("{kind} label used more than once"));
            }
        }
    }

    if spec.hamiltonian.dim() == dim {
        let residual = spec.hamiltonian.hermiticity_residual();
        if residual > HERMITICITY_TOL * spec.hamiltonian.max_abs() {
            push(Invariant::Hermiticity, "hamiltonian", residual, "H differs from its adjoint".into());
        }
    }

    if !(dims_ok && ground_ok) {
        return report;
    }
    let ground = &spec.ground;
    let excited = spec.excited();

    for j in &spec.jumps {
        let residual = j.op.off_block_residual(ground, &excited);
        if residual > STRUCTURE_TOL {
            push(
                Invariant::JumpDirection,
                &j.label,
                residual,
                "jump operators must take excited states to ground states".into(),
            );
        }
    }
    for f in &spec.fields {
        let residual = f.v_plus.off_block_residual(&excited, ground);
        if residual > STRUCTURE_TOL {
            push(
                Invariant::FieldDirection,
                &f.label,
                residual,
                "drive must excite ground states into excited states".into(),
            );
        }
    }

    if report.violations.is_empty() {
        if let Some(a) = weak_drive_advisory(spec, &excited) {
            report.advisories.push(a);
        }
    }
    report
}

/// Compares the drive strength `||V_+||_F` (static block plus all fields)
/// against the slowest excited-state decay rate.
fn weak_drive_advisory(spec: &SystemSpec, excited: &[usize]) -> Option<Advisory> {
    let v_plus = spec.hamiltonian.masked(excited, &spec.ground);
    let drive = spec
        .fields
        .iter()
        .map(|f| f.v_plus.frobenius_norm().powi(2))
        .sum::<f64>()
        + v_plus.frobenius_norm().powi(2);
    let drive = drive.sqrt();
    if drive == 0.0 {
        return None;
    }
    let mut decay = ComplexMatrix::zeros(spec.dim);
    for j in &spec.jumps {
        decay += &(&j.op.adjoint() * &j.op);
    }
    let decay = decay.masked(excited, excited);
    // eigenvalues of the excited block only: pad the ground block with a huge
    // value so it never wins the minimum
    let big = 1e300;
    let padded = &decay + &ComplexMatrix::projector(spec.dim, &spec.ground).scale_real(big);
    let min_rate = hermitian_eigenvalues(&padded)[0].max(0.0);
    let ratio = if min_rate > 0.0 { drive / min_rate } else { f64::INFINITY };
    (ratio > WEAK_DRIVE_RATIO).then(|| Advisory {
        message: format!(
            "drive strength ||V_+|| = {drive:.3e} is not small against the slowest excited decay rate {min_rate:.3e}; \
             effective operators may be inaccurate"
        ),
        ratio,
    })
}

/// The four Hamiltonian blocks and the subspace projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub h_g: ComplexMatrix,
    pub h_e: ComplexMatrix,
    pub v_plus: ComplexMatrix,
    pub v_minus: ComplexMatrix,
    pub p_g: ComplexMatrix,
    pub p_e: ComplexMatrix,
    pub ground: Vec<usize>,
    pub excited: Vec<usize>,
}

impl Partition {
    pub fn dim(&self) -> usize {
        self.h_g.dim()
    }

    /// `H_g + H_e + V_+ + V_-`.
    pub fn reassemble(&self) -> ComplexMatrix {
        &(&self.h_g + &self.h_e) + &(&self.v_plus + &self.v_minus)
    }
}

/// Splits the Hamiltonian into `H_g = P_g H P_g`, `H_e = P_e H P_e`,
/// `V_+ = P_e H P_g` and `V_- = P_g H P_e` by entry masking, so the blocks
/// sum back to `H` bit for bit.
pub fn partition(spec: &SystemSpec) -> Result<Partition> {
    let report = validate(spec);
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report));
    }
    let ground = spec.ground.clone();
    let excited = spec.excited();
    let h = &spec.hamiltonian;
    Ok(Partition {
        h_g: h.masked(&ground, &ground),
        h_e: h.masked(&excited, &excited),
        v_plus: h.masked(&excited, &ground),
        v_minus: h.masked(&ground, &excited),
        p_g: ComplexMatrix::projector(spec.dim, &ground),
        p_e: ComplexMatrix::projector(spec.dim, &excited),
        ground,
        excited,
    })
}

/// `H + sum_f (v_+^f e^{-i omega_f t} + h.c.)`.
pub fn assemble_time_dependent_hamiltonian(spec: &SystemSpec, t: f64) -> Result<ComplexMatrix> {
    let report = validate(spec);
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report));
    }
    Ok(hamiltonian_at(spec, t))
}

pub(crate) fn hamiltonian_at(spec: &SystemSpec, t: f64) -> ComplexMatrix {
    let mut h = spec.hamiltonian.clone();
    for f in &spec.fields {
        let v = f.v_plus.scale(C64::from_polar(1.0, -f.omega * t));
        h += &v;
        h += &v.adjoint();
    }
    h
}
