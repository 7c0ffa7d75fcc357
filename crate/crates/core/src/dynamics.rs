//! Integration of Lindblad master equations and trajectory comparison.
//!
//! Full and effective dynamics go through the same fixed-step RK4 integrator
//! so that their trajectories share a time grid and can be compared pointwise.

use crate::effective::{EffectiveModel, TimeDependentModel};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, trace_distance, ComplexMatrix, C64, HERMITICITY_TOL};
use crate::system::{hamiltonian_at, Jump, SystemSpec};

/// Largest tolerated `|tr rho - 1|` along a trajectory.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Tolerance on `tr rho = 1` for a user-supplied density matrix.
pub const TRACE_TOL: f64 = 1e-8;
/// Most negative eigenvalue accepted for a user-supplied density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let residual = mat.hermiticity_residual();
        if residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&mat)[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// `|index><index|`.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        Ok(Self {
            mat: ComplexMatrix::ket_bra(dim, index, index, C64::new(1.0, 0.0))?,
        })
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    pub(crate) fn unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal_entries().iter().map(|z| z.re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.mat)[0]
    }
}

/// `-i[H, rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho})`.
pub fn lindblad_rhs(h: &ComplexMatrix, jumps: &[Jump], rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let dim = rho.dim();
    for m in std::iter::once(h).chain(jumps.iter().map(|j| &j.op)) {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
    }
    let r = &rho.mat;
    let mut out = (&(h * r) - &(r * h)).scale(C64::new(0.0, -1.0));
    for j in jumps {
        let l = &j.op;
        let ld = l.adjoint();
        let ldl = &ld * l;
        out += &(&(l * r) * &ld);
        out += &(&(&ldl * r) + &(r * &ldl)).scale_real(-0.5);
    }
    Ok(out)
}

/// Lindblad generator as a `dim^2 x dim^2` matrix acting on row-major `vec(rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    data: Vec<C64>,
}

impl Liouvillian {
    pub fn new(h: &ComplexMatrix, jumps: &[Jump]) -> Result<Self> {
        let d = h.dim();
        if let Some(j) = jumps.iter().find(|j| j.op.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: j.op.dim(),
            });
        }
        let n = d * d;
        let mut s = Self {
            dim: d,
            data: vec![C64::new(0.0, 0.0); n * n],
        };
        let minus_i = C64::new(0.0, -1.0);
        // effective non-Hermitian part: -i (K rho - rho K^dag), K = H - i/2 sum L^dag L
        let mut k = h.clone();
        for j in jumps {
            k = &k - &(&j.op.adjoint() * &j.op).scale(C64::new(0.0, 0.5));
        }
        let kd = k.adjoint();
        for i in 0..d {
            for jj in 0..d {
                for m in 0..d {
                    // K rho: S[(i,jj),(m,jj)] += K_im
                    s.add(i, jj, m, jj, minus_i * k[(i, m)]);
                    // rho K^dag: S[(i,jj),(i,m)] += (K^dag)_{m jj}
                    s.add(i, jj, i, m, -minus_i * kd[(m, jj)]);
                }
            }
        }
        for j in jumps {
            let l = &j.op;
            for i in 0..d {
                for jj in 0..d {
                    for a in 0..d {
                        let lia = l[(i, a)];
                        if lia == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for b in 0..d {
                            s.add(i, jj, a, b, lia * l[(jj, b)].conj());
                        }
                    }
                }
            }
        }
        Ok(s)
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, k: usize, l: usize, v: C64) {
        let n = self.dim * self.dim;
        self.data[(i * self.dim + j) * n + k * self.dim + l] += v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = S x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let n = self.dim * self.dim;
        for (row, o) in self.data.chunks_exact(n).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Applies the generator to a density matrix.
    pub fn apply_to(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        let x = rho.mat.to_rows().concat();
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        self.apply(&x, &mut out);
        ComplexMatrix::new(self.dim, out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorTag {
    Full,
    Effective,
}

/// Anything that defines a Lindblad master equation.
pub trait MasterEquation {
    fn dim(&self) -> usize;
    fn tag(&self) -> GeneratorTag;
    fn ground(&self) -> Vec<usize>;
    fn is_time_dependent(&self) -> bool;
    /// Hamiltonian and jump operators at time `t`.
    fn generator_at(&self, t: f64) -> Result<(ComplexMatrix, Vec<Jump>)>;
    /// Largest frequency scale (Hamiltonian entries, drive frequencies).
    fn energy_scale(&self) -> f64;
}

fn max_rate(jumps: &[Jump]) -> f64 {
    jumps.iter().fold(0.0, |m, j| m.max(j.op.max_abs().powi(2)))
}

impl MasterEquation for SystemSpec {
    fn dim(&self) -> usize {
        self.dim
    }
    fn tag(&self) -> GeneratorTag {
        GeneratorTag::Full
    }
    fn ground(&self) -> Vec<usize> {
        self.ground.clone()
    }
    fn is_time_dependent(&self) -> bool {
        self.fields.iter().any(|f| f.omega != 0.0)
    }
    fn generator_at(&self, t: f64) -> Result<(ComplexMatrix, Vec<Jump>)> {
        Ok((hamiltonian_at(self, t), self.jumps.clone()))
    }
    fn energy_scale(&self) -> f64 {
        let fields = self
            .fields
            .iter()
            .fold(0.0, |m: f64, f| m.max(f.omega.abs()).max(f.v_plus.max_abs()));
        self.hamiltonian.max_abs().max(fields)
    }
}

impl MasterEquation for EffectiveModel {
    fn dim(&self) -> usize {
        EffectiveModel::dim(self)
    }
    fn tag(&self) -> GeneratorTag {
        GeneratorTag::Effective
    }
    fn ground(&self) -> Vec<usize> {
        self.ground.clone()
    }
    fn is_time_dependent(&self) -> bool {
        false
    }
    fn generator_at(&self, _t: f64) -> Result<(ComplexMatrix, Vec<Jump>)> {
        Ok((self.h_eff.clone(), self.l_eff.clone()))
    }
    fn energy_scale(&self) -> f64 {
        self.h_eff.max_abs()
    }
}

impl MasterEquation for TimeDependentModel {
    fn dim(&self) -> usize {
        TimeDependentModel::dim(self)
    }
    fn tag(&self) -> GeneratorTag {
        GeneratorTag::Effective
    }
    fn ground(&self) -> Vec<usize> {
        self.ground.clone()
    }
    fn is_time_dependent(&self) -> bool {
        !self.is_static()
    }
    fn generator_at(&self, t: f64) -> Result<(ComplexMatrix, Vec<Jump>)> {
        let m = self.at(t)?;
        Ok((m.h_eff, m.l_eff))
    }
    fn energy_scale(&self) -> f64 {
        self.h_g.max_abs().max(self.max_frequency())
    }
}

/// `min(0.01 / gamma_max, 0.01 / ||H||_max)`, ignoring vanishing scales;
/// 0.01 when both vanish.
pub fn default_dt<G: MasterEquation + ?Sized>(generator: &G) -> Result<f64> {
    let (_, jumps) = generator.generator_at(0.0)?;
    let dt = [max_rate(&jumps), generator.energy_scale()]
        .into_iter()
        .filter(|s| *s > 0.0)
        .map(|s| 0.01 / s)
        .fold(f64::INFINITY, f64::min);
    Ok(if dt.is_finite() { dt } else { 0.01 })
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Diagonal of each state.
    pub populations: Vec<Vec<f64>>,
    pub generator: GeneratorTag,
    pub ground: Vec<usize>,
    /// Largest `|tr rho - 1|` over every step, sampled or not.
    pub trace_drift: f64,
    /// Smallest eigenvalue over the sampled states.
    pub min_eigenvalue: f64,
    /// Step size actually used (`t_end` divided into whole steps).
    pub dt: f64,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, DensityMatrix::dim)
    }

    /// Population of `index` over time.
    pub fn population(&self, index: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[index]).collect()
    }

    pub fn traces(&self) -> Vec<f64> {
        self.states.iter().map(DensityMatrix::trace).collect()
    }

    /// Populations averaged over a centered window of duration `window`,
    /// truncated at the ends of the trajectory.
    pub fn running_average(&self, window: f64) -> Vec<Vec<f64>> {
        let n = self.times.len();
        let dim = self.dim();
        let mut prefix = vec![vec![0.0; dim]; n + 1];
        for (k, p) in self.populations.iter().enumerate() {
            for i in 0..dim {
                prefix[k + 1][i] = prefix[k][i] + p[i];
            }
        }
        let half = window / 2.0;
        let (mut lo, mut hi) = (0, 0);
        let mut out = Vec::with_capacity(n);
        for &t in &self.times {
            while self.times[lo] < t - half {
                lo += 1;
            }
            while hi < n && self.times[hi] <= t + half {
                hi += 1;
            }
            let count = (hi - lo) as f64;
            out.push((0..dim).map(|i| (prefix[hi][i] - prefix[lo][i]) / count).collect());
        }
        out
    }
}

/// Integrates `generator` from `rho0` over `[0, t_end]` with classical RK4.
///
/// `t_end` is split into `ceil(t_end / dt)` equal steps. Every
/// `sample_every`-th step and the final step are recorded. After each step
/// `rho` is replaced by its Hermitian part; the trace is left alone. Trace
/// drift and negative populations are both checked against
/// [`TRACE_DRIFT_LIMIT`].
pub fn integrate<G: MasterEquation + ?Sized>(
    generator: &G,
    rho0: &DensityMatrix,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be non-negative, got {t_end}")));
    }
    if sample_every == 0 {
        return Err(Error::InvalidParameter("sample_every must be at least 1".into()));
    }
    let d = generator.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho0.dim(),
        });
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };

    let build = |t: f64| -> Result<Liouvillian> {
        let (ham, jumps) = generator.generator_at(t)?;
        Liouvillian::new(&ham, &jumps)
    };
    let time_dependent = generator.is_time_dependent();
    let fixed = if time_dependent { None } else { Some(build(0.0)?) };

    let n = d * d;
    let zero = C64::new(0.0, 0.0);
    let mut x = rho0.mat.to_rows().concat();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let initial_trace = rho0.trace();
    let mut drift: f64 = 0.0;

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        populations: Vec::new(),
        generator: generator.tag(),
        ground: generator.ground(),
        trace_drift: 0.0,
        min_eigenvalue: f64::INFINITY,
        dt: h,
    };
    let record = |traj: &mut Trajectory, t: f64, x: &[C64]| -> Result<()> {
        let state = DensityMatrix::unchecked(ComplexMatrix::new(d, x.to_vec())?);
        traj.min_eigenvalue = traj.min_eigenvalue.min(state.min_eigenvalue());
        traj.populations.push(state.populations());
        traj.states.push(state);
        traj.times.push(t);
        Ok(())
    };
    record(&mut traj, 0.0, &x)?;

    let stage = |l: &Liouvillian, base: &[C64], k: &[C64], scale: f64, tmp: &mut [C64], out: &mut [C64]| {
        for ((t, b), kk) in tmp.iter_mut().zip(base).zip(k) {
            *t = b + kk * scale;
        }
        l.apply(tmp, out);
    };

    for step in 0..steps {
        let t = step as f64 * h;
        let (l1, l2, l4);
        let (a, b, c) = match &fixed {
            Some(l) => (l, l, l),
            None => {
                l1 = build(t)?;
                l2 = build(t + h / 2.0)?;
                l4 = build(t + h)?;
                (&l1, &l2, &l4)
            }
        };
        a.apply(&x, &mut k1);
        stage(b, &x, &k1, h / 2.0, &mut tmp, &mut k2);
        stage(b, &x, &k2, h / 2.0, &mut tmp, &mut k3);
        stage(c, &x, &k3, h, &mut tmp, &mut k4);
        for i in 0..n {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        symmetrize(&mut x, d);

        let tr: f64 = (0..d).map(|i| x[i * d + i].re).sum();
        let dev = (tr - initial_trace).abs();
        // RK4 conserves the trace even when unstable; a negative population catches that case
        let undershoot = (0..d).map(|i| -x[i * d + i].re).fold(0.0, f64::max);
        if !(dev.max(undershoot) <= TRACE_DRIFT_LIMIT) {
            return Err(Error::StepTooLarge {
                drift: dev.max(undershoot),
                limit: TRACE_DRIFT_LIMIT,
                suggested_dt: h / 4.0,
            });
        }
        drift = drift.max(dev);
        let done = step + 1;
        if done % sample_every == 0 || done == steps {
            record(&mut traj, done as f64 * h, &x)?;
        }
    }
    traj.trace_drift = drift;
    Ok(traj)
}

fn symmetrize(x: &mut [C64], d: usize) {
    for i in 0..d {
        x[i * d + i].im = 0.0;
        for j in i + 1..d {
            let avg = (x[i * d + j] + x[j * d + i].conj()) * 0.5;
            x[i * d + j] = avg;
            x[j * d + i] = avg.conj();
        }
    }
}

/// Agreement between two trajectories on the same time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// Max over time and compared indices of `|pop_a - pop_b|`.
    pub max_population_deviation: f64,
    /// Trace distance of the final states.
    pub final_trace_distance: f64,
    /// Compared basis indices: the ground states if either run is effective,
    /// every state otherwise.
    pub compared: Vec<usize>,
    /// Max deviation over time for each compared index.
    pub per_state_deviation: Vec<f64>,
    /// Largest total excited population seen in a full run (leakage out of
    /// the ground manifold); zero when neither run is full.
    pub max_excited_population: f64,
}

pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<Metrics> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.times.len() != b.times.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples vs {} samples",
            a.times.len(),
            b.times.len()
        )));
    }
    if let Some((k, (ta, tb))) = a
        .times
        .iter()
        .zip(&b.times)
        .enumerate()
        .find(|(_, (ta, tb))| (*ta - *tb).abs() > 1e-9 * ta.abs().max(1.0))
    {
        return Err(Error::GridMismatch(format!("sample {k} at t = {ta} vs t = {tb}")));
    }
    let dim = a.dim();
    let effective = a.generator == GeneratorTag::Effective || b.generator == GeneratorTag::Effective;
    let compared: Vec<usize> = if effective {
        if a.generator == GeneratorTag::Effective { a.ground.clone() } else { b.ground.clone() }
    } else {
        (0..dim).collect()
    };
    let mut per_state = vec![0.0_f64; compared.len()];
    for (pa, pb) in a.populations.iter().zip(&b.populations) {
        for (dev, &i) in per_state.iter_mut().zip(&compared) {
            *dev = dev.max((pa[i] - pb[i]).abs());
        }
    }
    let mut leakage: f64 = 0.0;
    for t in [a, b].into_iter().filter(|t| t.generator == GeneratorTag::Full) {
        let excited: Vec<usize> = (0..dim).filter(|i| t.ground.binary_search(i).is_err()).collect();
        for p in &t.populations {
            leakage = leakage.max(excited.iter().map(|&i| p[i]).sum());
        }
    }
    let final_trace_distance = match (a.states.last(), b.states.last()) {
        (Some(x), Some(y)) => trace_distance(&x.mat, &y.mat)?,
        _ => 0.0,
    };
    Ok(Metrics {
        max_population_deviation: per_state.iter().copied().fold(0.0, f64::max),
        final_trace_distance,
        compared,
        per_state_deviation: per_state,
        max_excited_population: leakage,
    })
}
