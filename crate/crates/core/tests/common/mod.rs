#![allow(dead_code)]

use adiabatic_elim::{ComplexMatrix, FieldDrive, Jump, SystemSpec, C64};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_c<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| random_c(rng)).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_matrix(rng, dim).hermitian_part()
}

/// Random valid system of dimension `dim` with a random ground split.
///
/// There are as many jump operators as excited states, which makes the decay
/// part of `H_NH` full rank and keeps the propagators well conditioned.
pub fn random_spec<R: Rng>(rng: &mut R, dim: usize) -> SystemSpec {
    assert!(dim >= 2);
    let mut indices: Vec<usize> = (0..dim).collect();
    indices.shuffle(rng);
    let n_ground = rng.random_range(1..dim);
    let mut ground = indices[..n_ground].to_vec();
    ground.sort_unstable();
    let excited: Vec<usize> = (0..dim).filter(|i| !ground.contains(i)).collect();

    let h = random_hermitian(rng, dim);
    let jumps = (0..excited.len())
        .map(|k| Jump::new(format!("L{k}"), random_matrix(rng, dim).masked(&ground, &excited)))
        .collect();
    SystemSpec::new(h, ground, jumps)
}

/// Random drive fields on the excitation block of `spec`.
pub fn random_fields<R: Rng>(rng: &mut R, spec: &SystemSpec, count: usize) -> Vec<FieldDrive> {
    let excited = spec.excited();
    (0..count)
        .map(|k| {
            let v = random_matrix(rng, spec.dim).masked(&excited, &spec.ground).scale_real(0.3);
            FieldDrive::new(format!("f{k}"), v, rng.random_range(-2.0..2.0))
        })
        .collect()
}

/// `spec` with its ground-ground block removed.
pub fn without_ground_hamiltonian(spec: &SystemSpec) -> SystemSpec {
    let mut out = spec.clone();
    out.hamiltonian = &spec.hamiltonian - &spec.hamiltonian.masked(&spec.ground, &spec.ground);
    out
}

/// `spec` with its static excitation block moved onto one drive field of
/// frequency `omega`.
pub fn static_drive_as_field(spec: &SystemSpec, omega: f64) -> SystemSpec {
    let excited = spec.excited();
    let v_plus = spec.hamiltonian.masked(&excited, &spec.ground);
    let mut out = spec.clone();
    out.hamiltonian = &spec.hamiltonian.masked(&spec.ground, &spec.ground) + &spec.hamiltonian.masked(&excited, &excited);
    out.fields = vec![FieldDrive::new("drive", v_plus, omega)];
    out
}

/// `max |A - B| / max(|A|, |B|)`, zero for two zero matrices.
pub fn relative_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).max_abs() / scale
    }
}
