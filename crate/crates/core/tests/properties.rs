mod common;

use adiabatic_elim::dynamics::{default_dt, integrate, lindblad_rhs, DensityMatrix, MasterEquation};
use adiabatic_elim::effective::{
    effective_operators_basic, effective_operators_dressed, effective_operators_fields, effective_operators_general,
    effective_rate, lindblad_sum_identity_residual, no_jump_identity_residual, EffectiveModel,
};
use adiabatic_elim::scenarios;
use adiabatic_elim::system::assemble_time_dependent_hamiltonian;
use adiabatic_elim::{partition, ComplexMatrix, Jump, SystemSpec, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_fields, random_spec, relative_distance, static_drive_as_field, without_ground_hamiltonian};

fn spec_from(seed: u64, dim: usize) -> (ChaCha8Rng, SystemSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = random_spec(&mut rng, dim);
    (rng, spec)
}

fn model_distance(a: &EffectiveModel, b: &EffectiveModel) -> f64 {
    a.l_eff
        .iter()
        .zip(&b.l_eff)
        .fold(relative_distance(&a.h_eff, &b.h_eff), |d, (la, lb)| d.max(relative_distance(&la.op, &lb.op)))
}

fn check_model(m: &EffectiveModel) -> Result<(), TestCaseError> {
    let scale = m.h_eff.max_abs().max(f64::MIN_POSITIVE);
    prop_assert!(m.h_eff.hermiticity_residual() / scale <= 1e-10);
    prop_assert!(m.h_eff.off_block_residual(&m.ground, &m.ground) <= 1e-12 * scale.max(1.0));
    for l in &m.l_eff {
        prop_assert!(l.op.off_block_residual(&m.ground, &m.ground) <= 1e-12 * l.op.max_abs().max(1.0));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_reassembles_exactly(seed in any::<u64>(), dim in 2usize..=8) {
        let (_, spec) = spec_from(seed, dim);
        let p = partition(&spec).unwrap();
        prop_assert_eq!(p.reassemble(), spec.hamiltonian.clone());
        prop_assert_eq!(&p.p_g + &p.p_e, ComplexMatrix::identity(dim));
        prop_assert!((&p.p_g * &p.p_e).is_zero());
    }

    #[test]
    fn time_dependent_hamiltonian_is_hermitian(seed in any::<u64>(), dim in 2usize..=6, t in -50.0f64..50.0) {
        let (mut rng, spec) = spec_from(seed, dim);
        let fields = random_fields(&mut rng, &spec, 2);
        let spec = spec.with_fields(fields);
        let h = assemble_time_dependent_hamiltonian(&spec, t).unwrap();
        prop_assert!(h.hermiticity_residual() <= 1e-14);
    }

    #[test]
    fn lindblad_sum_identity(seed in any::<u64>(), dim in 2usize..=8) {
        let (_, spec) = spec_from(seed, dim);
        let p = partition(&spec).unwrap();
        let m = effective_operators_basic(&p, &spec.jumps).unwrap();
        prop_assert!(lindblad_sum_identity_residual(&m, &p).unwrap() <= 1e-10);
        prop_assert!(no_jump_identity_residual(&m, &p).unwrap() <= 1e-10);
    }

    #[test]
    fn every_variant_is_hermitian_and_ground_supported(seed in any::<u64>(), dim in 2usize..=7, t in 0.0f64..20.0) {
        let (mut rng, spec) = spec_from(seed, dim);
        let p = partition(&spec).unwrap();
        check_model(&effective_operators_basic(&p, &spec.jumps).unwrap())?;
        check_model(&effective_operators_dressed(&p, &spec.jumps).unwrap())?;
        let fields = random_fields(&mut rng, &spec, 2);
        check_model(&effective_operators_fields(&p, &spec.jumps, &fields).unwrap().at(t).unwrap())?;
        check_model(&effective_operators_general(&p, &spec.jumps, &fields).unwrap().at(t).unwrap())?;
    }

    #[test]
    fn variant_reductions(seed in any::<u64>(), dim in 2usize..=7, t in 0.0f64..20.0, omega in -2.0f64..2.0) {
        let (mut rng, spec) = spec_from(seed, dim);
        let p = partition(&spec).unwrap();

        // one zero-frequency field carrying the drive: general -> dressed, fields -> basic
        let moved = static_drive_as_field(&spec, 0.0);
        let pm = partition(&moved).unwrap();
        let general = effective_operators_general(&pm, &moved.jumps, &moved.fields).unwrap().at(t).unwrap();
        let dressed = effective_operators_dressed(&p, &spec.jumps).unwrap();
        prop_assert!(model_distance(&general, &dressed) <= 1e-12);
        let fields = effective_operators_fields(&pm, &moved.jumps, &moved.fields).unwrap().at(t).unwrap();
        let basic = effective_operators_basic(&p, &spec.jumps).unwrap();
        prop_assert!(model_distance(&fields, &basic) <= 1e-12);

        // H_g = 0: general -> fields, dressed -> basic
        let mut flat = without_ground_hamiltonian(&spec);
        flat.fields = random_fields(&mut rng, &flat, 2);
        flat.fields[0].omega = omega;
        let pf = partition(&flat).unwrap();
        let general = effective_operators_general(&pf, &flat.jumps, &flat.fields).unwrap().at(t).unwrap();
        let fields = effective_operators_fields(&pf, &flat.jumps, &flat.fields).unwrap().at(t).unwrap();
        prop_assert!(model_distance(&general, &fields) <= 1e-12);
        let dressed = effective_operators_dressed(&pf, &flat.jumps).unwrap();
        let basic = effective_operators_basic(&pf, &flat.jumps).unwrap();
        prop_assert!(model_distance(&dressed, &basic) <= 1e-12);
    }

    #[test]
    fn rates_and_shifts_scale_quadratically_with_drive(seed in any::<u64>(), dim in 2usize..=7, s in 0.1f64..3.0) {
        let (_, spec) = spec_from(seed, dim);
        let excited = spec.excited();
        let h = &spec.hamiltonian;
        let coupling = &h.masked(&excited, &spec.ground) + &h.masked(&spec.ground, &excited);
        let mut scaled = spec.clone();
        scaled.hamiltonian = &(h - &coupling) + &coupling.scale_real(s);

        for variant in [effective_operators_basic, effective_operators_dressed] {
            let p = partition(&spec).unwrap();
            let a = variant(&p, &spec.jumps).unwrap();
            let b = variant(&partition(&scaled).unwrap(), &scaled.jumps).unwrap();
            let induced_a = (&a.h_eff - &p.h_g).scale_real(s * s);
            let induced_b = &b.h_eff - &p.h_g;
            prop_assert!(relative_distance(&induced_a, &induced_b) <= 1e-10);
            for j in &spec.jumps {
                for &from in &spec.ground {
                    for &to in &spec.ground {
                        let ra = effective_rate(&a, &j.label, from, to).unwrap() * s * s;
                        let rb = effective_rate(&b, &j.label, from, to).unwrap();
                        prop_assert!((ra - rb).abs() <= 1e-10 * ra.max(rb).max(1e-300));
                    }
                }
            }
        }
    }

    #[test]
    fn excited_energy_offset_shifts_the_detuning(
        omega in 0.01f64..0.3, delta in -5.0f64..5.0, gamma in 0.1f64..2.0, offset in -3.0f64..3.0,
    ) {
        let spec = scenarios::two_level(omega, delta, gamma).unwrap();
        let mut shifted = spec.clone();
        shifted.hamiltonian = &spec.hamiltonian + &ComplexMatrix::ket_bra(2, 1, 1, C64::new(offset, 0.0)).unwrap();
        let m = effective_operators_basic(&partition(&shifted).unwrap(), &shifted.jumps).unwrap();
        let d = delta + offset;
        let denom = 4.0 * d * d + gamma * gamma;
        let shift = -omega * omega * d / denom;
        let rate = gamma * omega * omega / denom;
        prop_assert!((m.h_eff[(0, 0)].re - shift).abs() <= 1e-12 * shift.abs().max(1e-300));
        let got = effective_rate(&m, "gamma", 0, 0).unwrap();
        prop_assert!((got - rate).abs() <= 1e-12 * rate);
        let h_nh = &m.h_nh - &partition(&spec).unwrap().h_e;
        prop_assert!((h_nh[(1, 1)] - C64::new(offset, -gamma / 2.0)).norm() <= 1e-12);
    }

    #[test]
    fn lindblad_rhs_is_traceless_and_hermitian(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::random_hermitian(&mut rng, dim);
        let jumps: Vec<Jump> = (0..3).map(|k| Jump::new(format!("L{k}"), common::random_matrix(&mut rng, dim))).collect();
        let b = common::random_matrix(&mut rng, dim);
        let pos = &b * &b.adjoint();
        let rho = DensityMatrix::new(pos.scale_real(1.0 / pos.trace().re)).unwrap();
        let out = lindblad_rhs(&h, &jumps, &rho).unwrap();
        prop_assert!(out.trace().norm() <= 1e-12);
        prop_assert!(out.hermiticity_residual() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trajectories_preserve_trace_and_positivity(seed in any::<u64>(), dim in 2usize..=5) {
        let (_, spec) = spec_from(seed, dim);
        let rho0 = DensityMatrix::basis_state(dim, spec.ground[0]).unwrap();
        let dt = default_dt(&spec).unwrap();
        let traj = integrate(&spec, &rho0, 2.0, dt, 10).unwrap();
        prop_assert!(traj.trace_drift <= 1e-6);
        prop_assert!(traj.min_eigenvalue >= -1e-6);
        for (pops, state) in traj.populations.iter().zip(&traj.states) {
            prop_assert!((pops.iter().sum::<f64>() - state.trace()).abs() <= 1e-14);
        }

        let m = effective_operators_basic(&partition(&spec).unwrap(), &spec.jumps).unwrap();
        let eff = integrate(&m, &rho0, 2.0, dt, 10).unwrap();
        prop_assert!(eff.trace_drift <= 1e-6);
        prop_assert!(eff.min_eigenvalue >= -1e-6);
        prop_assert!(eff.times.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(m.tag(), adiabatic_elim::dynamics::GeneratorTag::Effective);
    }

    #[test]
    fn rk4_converges_at_fourth_order(gamma in 0.5f64..2.0) {
        let spec = scenarios::two_level(0.0, 0.0, gamma).unwrap();
        let rho0 = DensityMatrix::basis_state(2, 1).unwrap();
        let t_end = 2.0 / gamma;
        let err = |dt: f64| {
            let traj = integrate(&spec, &rho0, t_end, dt, 1_000_000).unwrap();
            (traj.populations.last().unwrap()[1] - (-gamma * t_end).exp()).abs()
        };
        let dt = 0.2 / gamma;
        let order = (err(dt) / err(dt / 2.0)).log2();
        prop_assert!(order >= 3.5, "measured order {order}");
    }
}
