mod common;

use common::*;
use proptest::prelude::*;
use wongspin_core::fields::{
    bianchi_residual, covariant_derivative_f, field_strength, potential, taylor_eval, FieldKind,
    FieldStrength,
};
use wongspin_core::{GaugeFieldConfig, GradedNumber, Scalar};

const E: f64 = 1.0;

fn fd_covariant(cfg: &GaugeFieldConfig, x: [f64; 4], h: f64) -> Vec<[[[f64; 4]; 4]; 4]> {
    let n = cfg.algebra().dim();
    let f0 = field_strength(cfg, &x, E).f;
    let a0 = potential(cfg, &x);
    let mut out = vec![[[[0.0; 4]; 4]; 4]; n];
    for rho in 0..4 {
        let (mut xp, mut xm) = (x, x);
        xp[rho] += h;
        xm[rho] -= h;
        let fp = field_strength(cfg, &xp, E).f;
        let fm = field_strength(cfg, &xm, E).f;
        for a in 0..n {
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut d = (fp[a][mu][nu] - fm[a][mu][nu]) / (2.0 * h);
                    for b in 0..n {
                        for c in 0..n {
                            d += E * cfg.algebra().get(b, c, a) * a0[b][rho] * f0[c][mu][nu];
                        }
                    }
                    out[a][rho][mu][nu] = d;
                }
            }
        }
    }
    out
}

#[test]
fn covariant_derivative_matches_finite_differences() {
    let mut r = rng(7);
    for (name, cfg) in builtin_configs() {
        for _ in 0..20 {
            let x = point(&mut r, 10.0);
            let analytic = covariant_derivative_f(&cfg, &x, E).df;
            let fd = fd_covariant(&cfg, x, 1e-5);
            let err = analytic
                .iter()
                .flatten()
                .flatten()
                .flatten()
                .zip(fd.iter().flatten().flatten().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "{name}: {err}");
        }
    }
}

#[test]
fn bianchi_holds_for_builtins() {
    let mut r = rng(11);
    for (name, cfg) in builtin_configs() {
        for _ in 0..50 {
            let x = point(&mut r, 10.0);
            let res = bianchi_residual(&cfg, &x, E);
            assert!(res < 1e-12, "{name}: {res}");
        }
    }
}

#[test]
fn field_strength_is_antisymmetric() {
    let x = [0.3, -1.2, 2.0, 0.7];
    for (name, cfg) in builtin_configs() {
        for fa in field_strength(&cfg, &x, E).f {
            for mu in 0..4 {
                for nu in 0..4 {
                    assert_eq!(fa[mu][nu], -fa[nu][mu], "{name}");
                }
            }
        }
    }
}

#[test]
fn abelian_limit_drops_commutator() {
    // At e = 0 the non-abelian constant potential has vanishing field strength.
    let cfg = su2_constant_potential();
    let f = field_strength(&cfg, &[1.0, 2.0, 3.0, 4.0], 0.0);
    assert!(f.f.iter().flatten().flatten().all(|v| *v == 0.0));
    let f1 = field_strength(&cfg, &[1.0, 2.0, 3.0, 4.0], 1.0);
    assert!(f1.f.iter().flatten().flatten().any(|v| *v != 0.0));
}

#[test]
fn constant_potential_strength_by_hand() {
    // F_mu,nu^a = e f_bc^a A_mu^b A_nu^c; for su2 f = epsilon.
    let cfg = su2_constant_potential();
    let FieldKind::ConstantPotential { potential: a } = cfg.kind().clone() else {
        unreachable!()
    };
    let f = field_strength(&cfg, &[0.0; 4], 2.0).f;
    let want = 2.0 * (a[1][1] * a[2][2] - a[2][1] * a[1][2]);
    assert!((f[0][1][2] - want).abs() < 1e-15);
}

#[test]
fn plane_wave_strength_by_hand() {
    let cfg = u1_plane_wave();
    let FieldKind::PlaneWave {
        wave_vector: k,
        amplitude,
    } = cfg.kind().clone()
    else {
        unreachable!()
    };
    let x = [0.5, 1.5, -2.0, 0.25];
    let phase: f64 = k.iter().zip(&x).map(|(a, b)| a * b).sum();
    let f = field_strength(&cfg, &x, E).f;
    for mu in 0..4 {
        for nu in 0..4 {
            let want = -phase.sin() * (k[mu] * amplitude[0][nu] - k[nu] * amplitude[0][mu]);
            assert!((f[0][mu][nu] - want).abs() < 1e-15);
        }
    }
}

/// First-order dual numbers: an independent nilpotent arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dual(f64, f64);

impl Scalar for Dual {
    fn zero_like(&self) -> Self {
        Dual(0.0, 0.0)
    }
    fn constant_like(&self, r: f64) -> Self {
        Dual(r, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        Dual(self.0 + o.0, self.1 + o.1)
    }
    fn sub(&self, o: &Self) -> Self {
        Dual(self.0 - o.0, self.1 - o.1)
    }
    fn mul(&self, o: &Self) -> Self {
        Dual(self.0 * o.0, self.0 * o.1 + self.1 * o.0)
    }
    fn scale(&self, r: f64) -> Self {
        Dual(self.0 * r, self.1 * r)
    }
    fn add_scaled(&mut self, r: f64, o: &Self) {
        self.0 += r * o.0;
        self.1 += r * o.1;
    }
    fn body(&self) -> f64 {
        self.0
    }
    fn lift(&self, _order: usize, d: &dyn Fn(usize) -> f64) -> Self {
        Dual(d(0), d(1) * self.1)
    }
    fn taylor_order(&self) -> usize {
        1
    }
    fn width(&self) -> usize {
        2
    }
    fn write_flat(&self, out: &mut [f64]) {
        out[0] = self.0;
        out[1] = self.1;
    }
    fn read_flat(&self, src: &[f64]) -> Self {
        Dual(src[0], src[1])
    }
}

fn graded_vs_dual(cfg: &GaugeFieldConfig, x: [f64; 4], u: [f64; 4]) -> f64 {
    // x + u theta_0 theta_1 squares to zero, like x + u eps.
    let n_gen = 4;
    let xg = [0, 1, 2, 3].map(|mu| {
        let mut g = GradedNumber::scalar(n_gen, x[mu]);
        g.set_coeff(0b0011, u[mu]);
        g
    });
    let xd = [0, 1, 2, 3].map(|mu| Dual(x[mu], u[mu]));
    let (fg, dfg) = taylor_eval(cfg, &xg, 2, E).unwrap();
    let pd = cfg.evaluate(&xd, 1, E);
    let FieldStrength { f: fd } = pd.strength;
    let mut worst: f64 = 0.0;
    for a in 0..fd.len() {
        for mu in 0..4 {
            for nu in 0..4 {
                let g = &fg.f[a][mu][nu];
                let d = fd[a][mu][nu];
                worst = worst
                    .max((g.body() - d.0).abs())
                    .max((g.coeff(0b0011) - d.1).abs());
                for rho in 0..4 {
                    let g = &dfg.df[a][rho][mu][nu];
                    let d = pd.covariant.df[a][rho][mu][nu];
                    worst = worst
                        .max((g.body() - d.0).abs())
                        .max((g.coeff(0b0011) - d.1).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn graded_taylor_agrees_with_dual_numbers() {
    let mut r = rng(3);
    for (name, cfg) in builtin_configs() {
        for _ in 0..10 {
            let err = graded_vs_dual(&cfg, point(&mut r, 5.0), point(&mut r, 1.0));
            assert!(err < 1e-13, "{name}: {err}");
        }
    }
}

#[test]
fn graded_taylor_soul_matches_directional_difference() {
    let cfg = su2_plane_wave();
    let x = [0.4, -1.0, 2.2, 0.9];
    let u = [0.3, -0.2, 0.5, 0.1];
    let xg = [0, 1, 2, 3].map(|mu| {
        let mut g = GradedNumber::scalar(4, x[mu]);
        g.set_coeff(0b0101, u[mu]);
        g
    });
    let (fg, _) = taylor_eval(&cfg, &xg, 2, E).unwrap();
    let h = 1e-5;
    let shifted = |t: f64| field_strength(&cfg, &[0, 1, 2, 3].map(|m| x[m] + t * u[m]), E).f;
    let (fp, fm) = (shifted(h), shifted(-h));
    for a in 0..3 {
        for mu in 0..4 {
            for nu in 0..4 {
                let fd = (fp[a][mu][nu] - fm[a][mu][nu]) / (2.0 * h);
                assert!((fg.f[a][mu][nu].coeff(0b0101) - fd).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn taylor_eval_rejects_bad_input() {
    let cfg = su2_plane_wave();
    let even = [0; 4].map(|_| GradedNumber::scalar(4, 1.0));
    assert!(taylor_eval(&cfg, &even, 5, E).is_err());
    let mut odd = even.clone();
    odd[2] = GradedNumber::generator(4, 1);
    assert!(taylor_eval(&cfg, &odd, 2, E).is_err());
    let mut mixed = even.clone();
    mixed[0] = GradedNumber::scalar(2, 1.0);
    assert!(taylor_eval(&cfg, &mixed, 2, E).is_err());
}

proptest! {
    #[test]
    fn plane_wave_bianchi_anywhere(
        x in prop::array::uniform4(-10.0f64..10.0),
        k in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let cfg = GaugeFieldConfig::new(
            FieldKind::PlaneWave {
                wave_vector: k,
                amplitude: vec![[0.1, 0.4, -0.2, 0.3], [0.0, 0.2, 0.5, 0.0], [0.3, 0.0, 0.0, -0.6]],
            },
            algebra(wongspin_core::algebra::BuiltinAlgebra::Su2),
        )
        .unwrap();
        prop_assert!(bianchi_residual(&cfg, &x, E) < 1e-12);
    }
}
