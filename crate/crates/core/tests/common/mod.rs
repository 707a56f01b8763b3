#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wongspin_core::algebra::{builtin_algebra, BuiltinAlgebra};
use wongspin_core::dynamics::{
    charge_from_internal, direct_state, internal_state, ModelParams, SpinTensor,
};
use wongspin_core::fields::{FieldKind, GaugeFieldConfig, Monomial};
use wongspin_core::{Model, Phase, StructureConstants};

pub fn algebra(which: BuiltinAlgebra) -> StructureConstants {
    builtin_algebra(which).0
}

pub fn u1_constant_abelian(b: f64) -> GaugeFieldConfig {
    let mut s = [[0.0; 4]; 4];
    s[1][2] = b;
    s[2][1] = -b;
    GaugeFieldConfig::new(
        FieldKind::ConstantAbelian {
            generator: 0,
            strength: s,
        },
        algebra(BuiltinAlgebra::U1),
    )
    .unwrap()
}

/// Constant electric and magnetic components along the third su2 generator.
pub fn su2_constant_abelian() -> GaugeFieldConfig {
    let mut s = [[0.0; 4]; 4];
    for (mu, nu, val) in [(1, 2, 0.8), (0, 3, 0.3), (1, 3, -0.4)] {
        s[mu][nu] = val;
        s[nu][mu] = -val;
    }
    GaugeFieldConfig::new(
        FieldKind::ConstantAbelian {
            generator: 2,
            strength: s,
        },
        algebra(BuiltinAlgebra::Su2),
    )
    .unwrap()
}

pub fn su2_constant_potential() -> GaugeFieldConfig {
    GaugeFieldConfig::new(
        FieldKind::ConstantPotential {
            potential: vec![
                [0.1, 0.6, -0.2, 0.0],
                [0.0, 0.3, 0.7, -0.1],
                [0.2, 0.0, -0.4, 0.5],
            ],
        },
        algebra(BuiltinAlgebra::Su2),
    )
    .unwrap()
}

pub fn su3_constant_potential() -> GaugeFieldConfig {
    let potential = (0..8)
        .map(|a| {
            let t = a as f64;
            [
                0.1 * (t - 3.0),
                0.3 * (0.7 * t).sin(),
                -0.2 * (1.3 * t).cos(),
                0.05 * t,
            ]
        })
        .collect();
    GaugeFieldConfig::new(
        FieldKind::ConstantPotential { potential },
        algebra(BuiltinAlgebra::Su3),
    )
    .unwrap()
}

pub fn u1_plane_wave() -> GaugeFieldConfig {
    GaugeFieldConfig::new(
        FieldKind::PlaneWave {
            wave_vector: [0.4, 0.9, -0.3, 0.2],
            amplitude: vec![[0.2, 0.5, 0.7, -0.3]],
        },
        algebra(BuiltinAlgebra::U1),
    )
    .unwrap()
}

pub fn su2_plane_wave() -> GaugeFieldConfig {
    GaugeFieldConfig::new(
        FieldKind::PlaneWave {
            wave_vector: [0.5, -0.7, 0.2, 0.4],
            amplitude: vec![
                [0.1, 0.4, -0.2, 0.3],
                [0.0, 0.2, 0.5, 0.0],
                [0.3, 0.0, 0.0, -0.6],
            ],
        },
        algebra(BuiltinAlgebra::Su2),
    )
    .unwrap()
}

pub fn su3_plane_wave() -> GaugeFieldConfig {
    let amplitude = (0..8)
        .map(|a| {
            let t = a as f64 + 1.0;
            [0.05 * t, -0.3 * t.sin(), 0.2 * (0.5 * t).cos(), 0.1]
        })
        .collect();
    GaugeFieldConfig::new(
        FieldKind::PlaneWave {
            wave_vector: [0.3, 0.2, -0.6, 0.5],
            amplitude,
        },
        algebra(BuiltinAlgebra::Su3),
    )
    .unwrap()
}

/// Quadratic su2 potential of order one over [-10, 10]^4.
pub fn su2_polynomial() -> GaugeFieldConfig {
    let term = |generator, component, coeff, powers| Monomial {
        generator,
        component,
        coeff,
        powers,
    };
    GaugeFieldConfig::new(
        FieldKind::CustomPolynomial {
            terms: vec![
                term(0, 1, 0.05, [0, 0, 1, 0]),
                term(0, 2, -0.004, [0, 1, 0, 1]),
                term(1, 0, 0.003, [0, 2, 0, 0]),
                term(1, 3, 0.02, [1, 0, 0, 0]),
                term(2, 2, 0.005, [0, 1, 1, 0]),
                term(2, 0, 0.3, [0, 0, 0, 0]),
            ],
        },
        algebra(BuiltinAlgebra::Su2),
    )
    .unwrap()
}

pub fn builtin_configs() -> Vec<(&'static str, GaugeFieldConfig)> {
    vec![
        (
            "zero su2",
            GaugeFieldConfig::zero(algebra(BuiltinAlgebra::Su2)),
        ),
        ("constant_abelian u1", u1_constant_abelian(1.3)),
        ("constant_abelian su2", su2_constant_abelian()),
        ("constant_potential su2", su2_constant_potential()),
        ("constant_potential su3", su3_constant_potential()),
        ("plane_wave u1", u1_plane_wave()),
        ("plane_wave su2", su2_plane_wave()),
        ("plane_wave su3", su3_plane_wave()),
        ("custom_polynomial su2", su2_polynomial()),
    ]
}

pub fn model(field: GaugeFieldConfig, mu_prime: f64) -> Model {
    let which = match field.algebra().dim() {
        1 => BuiltinAlgebra::U1,
        3 => BuiltinAlgebra::Su2,
        _ => BuiltinAlgebra::Su3,
    };
    let (_, rep) = builtin_algebra(which);
    Model::new(
        field,
        Some(rep),
        ModelParams::new(1.0, 1.0, mu_prime).unwrap(),
    )
    .unwrap()
}

pub fn spin0() -> SpinTensor {
    SpinTensor::new([0.12, -0.3, 0.05, 0.4, -0.15, 0.22])
}

pub const X0: [f64; 4] = [0.0, 0.2, -0.1, 0.3];
pub const V0: [f64; 4] = [1.3, 0.3, -0.2, 0.25];

/// Internal coordinates of roughly unit norm in the fundamental representation.
pub fn q0(n_rep: usize) -> Vec<Complex64> {
    let c = Complex64::new;
    match n_rep {
        1 => vec![c(0.8, 0.6)],
        2 => vec![c(0.6, 0.2), c(-0.3, 0.714)],
        _ => vec![c(0.5, 0.1), c(-0.2, 0.6), c(0.3, -0.497)],
    }
}

pub fn internal_phase(m: &Model, spin: SpinTensor) -> Phase {
    let n_rep = m.rep.as_ref().unwrap().dim_rep();
    internal_state(X0, V0, &q0(n_rep), spin)
}

/// The direct-mode state carrying the charge of [`internal_phase`].
pub fn direct_phase(m: &Model, spin: SpinTensor) -> Phase {
    let rep = m.rep.as_ref().unwrap();
    let q = charge_from_internal(&q0(rep.dim_rep()), rep).unwrap();
    direct_state(X0, V0, &q, spin)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point(rng: &mut ChaCha8Rng, r: f64) -> [f64; 4] {
    [0; 4].map(|_| rng.gen_range(-r..r))
}
