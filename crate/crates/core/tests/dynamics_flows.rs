mod common;

use common::*;
use num_complex::Complex64;
use wongspin_core::algebra::{builtin_algebra, BuiltinAlgebra};
use wongspin_core::dynamics::{
    direct_state, graded_state, internal_state, rhs, rhs_bmt, rhs_direct, Charge, Spin,
    SpinForceSign, SpinTensor,
};
use wongspin_core::fields::{FieldKind, GaugeFieldConfig};
use wongspin_core::integrate::integrate;
use wongspin_core::{
    ChargeVector, Error, GradedNumber, IntegratorOptions, Mode, Model, ModelParams, ParticleState,
    Phase,
};

fn run(model: &Model, phase: Phase, mode: Mode, h: f64, s_end: f64) -> wongspin_core::Trajectory {
    integrate(
        &ParticleState::new(0.0, phase),
        model,
        &IntegratorOptions::fixed(h, s_end),
        mode,
    )
    .unwrap()
}

#[test]
fn internal_and_direct_agree_su3() {
    let m = model(su3_plane_wave(), 1.0);
    let a = run(&m, internal_phase(&m, spin0()), Mode::Internal, 1e-3, 2.0);
    let b = run(&m, direct_phase(&m, spin0()), Mode::Direct, 1e-3, 2.0);
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        let qa = m.charges(&sa.phase);
        let Charge::Direct(qb) = &sb.phase.charge else {
            unreachable!()
        };
        assert!(max_diff(&qa, qb) < 1e-10);
        assert!(max_diff(&sa.phase.x, &sb.phase.x) < 1e-10);
    }
}

#[test]
fn reversed_spin_force_sign_breaks_energy_conservation() {
    let conserving = model(su2_constant_potential(), 1.0);
    let reversed = conserving.clone().with_spin_force(SpinForceSign::Reversed);
    let phase = direct_phase(&conserving, spin0());
    let good = run(&conserving, phase.clone(), Mode::Direct, 1e-3, 5.0);
    let bad = run(&reversed, phase, Mode::Direct, 1e-3, 5.0);
    let good_drift = good.drift.c2.unwrap().max_rel().unwrap();
    let bad_drift = bad.drift.c2.unwrap().max_rel().unwrap();
    assert!(good_drift < 1e-9, "{good_drift}");
    assert!(bad_drift > 1e-4, "{bad_drift}");
}

#[test]
fn abelian_constant_potential_only_rotates_phase() {
    let a = [0.3, -0.5, 0.2, 0.7];
    let cfg = GaugeFieldConfig::new(
        FieldKind::ConstantPotential { potential: vec![a] },
        algebra(BuiltinAlgebra::U1),
    )
    .unwrap();
    let (_, rep) = builtin_algebra(BuiltinAlgebra::U1);
    let e = 1.7;
    let m = Model::new(cfg, Some(rep), ModelParams::new(1.0, e, e).unwrap()).unwrap();
    let q0 = Complex64::new(0.6, -0.8);
    let phase = internal_state(X0, V0, &[q0], spin0());
    let traj = run(&m, phase, Mode::Internal, 1e-3, 3.0);
    // A_mu carries a lower index, so A_mu v^mu needs no metric.
    let a_dot_v: f64 = a.iter().zip(&V0).map(|(x, y)| x * y).sum();
    for s in traj.samples.iter().step_by(100) {
        let want = q0 * Complex64::new(0.0, e * a_dot_v * s.s).exp();
        let Charge::Internal { re, im } = &s.phase.charge else {
            unreachable!()
        };
        assert!((re[0] - want.re).abs() < 1e-12 && (im[0] - want.im).abs() < 1e-12);
        assert_eq!(s.phase.v, V0);
    }
}

fn xi0(scale: f64) -> [GradedNumber; 4] {
    let mix = [
        [0.3, 0.1, -0.2, 0.05],
        [0.0, 0.4, 0.1, -0.3],
        [0.2, -0.1, 0.5, 0.0],
        [-0.1, 0.2, 0.0, 0.35],
    ];
    [0, 1, 2, 3].map(|mu| {
        let mut g = GradedNumber::zero(4);
        for k in 0..4 {
            g.set_coeff(1 << k, scale * mix[mu][k]);
        }
        g.set_coeff(0b0111, scale * 0.01 * (mu as f64 + 1.0));
        g
    })
}

fn graded_run(m: &Model, scale: f64, s_end: f64) -> wongspin_core::Trajectory<GradedNumber> {
    let body = direct_phase(m, SpinTensor::zero());
    let phase = graded_state(&body, xi0(scale)).unwrap();
    integrate(
        &ParticleState::new(0.0, phase),
        m,
        &IntegratorOptions::fixed(1e-2, s_end),
        Mode::Graded,
    )
    .unwrap()
}

#[test]
fn graded_body_follows_spinless_body_run() {
    let m = model(u1_constant_abelian(1.1), 1.0);
    let graded = graded_run(&m, 1.0, 3.0);
    let body = integrate(
        &ParticleState::new(0.0, direct_phase(&m, SpinTensor::zero())),
        &m,
        &IntegratorOptions::fixed(1e-2, 3.0),
        Mode::Direct,
    )
    .unwrap();
    for (g, b) in graded.samples.iter().zip(&body.samples) {
        for mu in 0..4 {
            assert!((g.phase.x[mu].body() - b.phase.x[mu]).abs() < 1e-12);
            assert!((g.phase.v[mu].body() - b.phase.v[mu]).abs() < 1e-12);
        }
    }
}

#[test]
fn doubling_the_soul_doubles_odd_coefficients() {
    let m = model(u1_constant_abelian(0.9), 1.0);
    let one = graded_run(&m, 1.0, 2.0);
    let two = graded_run(&m, 2.0, 2.0);
    let (Spin::Odd(a), Spin::Odd(b)) = (
        &one.last().unwrap().phase.spin,
        &two.last().unwrap().phase.spin,
    ) else {
        unreachable!()
    };
    for mu in 0..4 {
        for k in 0..4 {
            let mask = 1 << k;
            assert!((b[mu].coeff(mask) - 2.0 * a[mu].coeff(mask)).abs() < 1e-12);
        }
        assert!(b[mu].grade_project(2).max_abs() == 0.0);
    }
}

#[test]
fn bmt_reduces_to_standard_law_without_anomaly() {
    let m = model(su2_plane_wave(), 1.0);
    let st = ParticleState::new(0.0, direct_phase(&m, spin0()));
    let a = rhs_bmt(&st, &m).unwrap().to_flat();
    let b = rhs_direct(&st, &m).unwrap().to_flat();
    assert!(max_diff(&a, &b) < 1e-15);
}

#[test]
fn bmt_rejects_null_velocity() {
    let m = model(u1_constant_abelian(1.0), 1.3);
    let q = ChargeVector(vec![1.0]);
    let st = ParticleState::new(0.5, direct_state(X0, [1.0, 1.0, 0.0, 0.0], &q, spin0()));
    match rhs_bmt(&st, &m) {
        Err(Error::DegenerateVelocity { s }) => assert_eq!(s, 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn mode_must_match_state() {
    let m = model(su2_plane_wave(), 1.0);
    let st = ParticleState::new(0.0, internal_phase(&m, spin0()));
    assert!(rhs(&st, &m, Mode::Direct).is_err());
    assert!(rhs(&st, &m, Mode::Graded).is_err());
    assert!(rhs(&st, &m, Mode::Internal).is_ok());
}

#[test]
fn charge_length_is_checked() {
    let m = model(su2_plane_wave(), 1.0);
    let q = ChargeVector(vec![1.0, 0.0]);
    let st = ParticleState::new(0.0, direct_state(X0, V0, &q, spin0()));
    assert!(matches!(
        rhs_direct(&st, &m),
        Err(Error::DimensionMismatch {
            expected: 3,
            found: 2,
            ..
        })
    ));
}

#[test]
fn energy_is_conserved_for_every_builtin_field() {
    for (name, cfg) in builtin_configs() {
        let m = model(cfg, 1.0);
        let t = run(&m, direct_phase(&m, spin0()), Mode::Direct, 1e-3, 10.0);
        let d = t.drift.c2.unwrap().max_rel().unwrap();
        assert!(d < 1e-8, "{name}: {d}");
    }
}
