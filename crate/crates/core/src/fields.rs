//! Gauge potentials `A_mu^a(x)` and the quantities derived from them.
//!
//! The field strength is
//! `F_mu,nu^a = d_mu A_nu^a - d_nu A_mu^a + e f_bc^a A_mu^b A_nu^c`
//! and its covariant derivative is
//! `(D_rho F_mu,nu)^a = d_rho F_mu,nu^a + e f_bc^a A_rho^b F_mu,nu^c`.
//! All derivatives are analytic. Every builtin kind is specified through its
//! potential (`ConstantAbelian` stores `F` but expands it in symmetric gauge),
//! so the Bianchi identity holds by construction.
//!
//! Evaluation is generic over [`Scalar`]: at a Grassmann-even point the
//! potential's derivatives are evaluated directly in graded arithmetic, which
//! reproduces the (terminating) Taylor expansion about the body.

use alloc::format;
use alloc::vec::Vec;

use crate::algebra::StructureConstants;
use crate::error::{Error, Result};
use crate::grassmann::GradedNumber;
use crate::scalar::Scalar;

/// Highest Taylor order available for graded evaluation (enough for 8 generators).
pub const MAX_TAYLOR_ORDER: usize = 4;

/// One term `coeff * x0^p0 x1^p1 x2^p2 x3^p3` of `A_mu^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub generator: usize,
    pub component: usize,
    pub coeff: f64,
    pub powers: [u32; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Zero,
    /// Constant covariant `F_mu,nu` on one generator, realized as
    /// `A_mu = -1/2 F_mu,nu x^nu`.
    ConstantAbelian {
        generator: usize,
        strength: [[f64; 4]; 4],
    },
    /// x-independent `A_mu^a`, indexed `[a][mu]`.
    ConstantPotential {
        potential: Vec<[f64; 4]>,
    },
    /// `A_mu^a = amplitude[a][mu] cos(k_mu x^mu)`.
    PlaneWave {
        wave_vector: [f64; 4],
        amplitude: Vec<[f64; 4]>,
    },
    CustomPolynomial {
        terms: Vec<Monomial>,
    },
}

impl FieldKind {
    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::Zero => "zero",
            FieldKind::ConstantAbelian { .. } => "constant_abelian",
            FieldKind::ConstantPotential { .. } => "constant_potential",
            FieldKind::PlaneWave { .. } => "plane_wave",
            FieldKind::CustomPolynomial { .. } => "custom_polynomial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFieldConfig {
    kind: FieldKind,
    algebra: StructureConstants,
    nonzero_f: Vec<(usize, usize, usize, f64)>,
}

impl GaugeFieldConfig {
    pub fn new(kind: FieldKind, algebra: StructureConstants) -> Result<Self> {
        let n = algebra.dim();
        let check_rows = |rows: &Vec<[f64; 4]>, what: &'static str| {
            if rows.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: rows.len(),
                });
            }
            if rows.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::config(format!("{what} must be finite")));
            }
            Ok(())
        };
        match &kind {
            FieldKind::Zero => {}
            FieldKind::ConstantAbelian {
                generator,
                strength,
            } => {
                if *generator >= n {
                    return Err(Error::config(format!(
                        "constant_abelian generator {generator} out of range for algebra of dimension {n}"
                    )));
                }
                for mu in 0..4 {
                    for nu in 0..4 {
                        if strength[mu][nu] != -strength[nu][mu] || !strength[mu][nu].is_finite() {
                            return Err(Error::config(
                                "constant_abelian field strength must be finite and antisymmetric",
                            ));
                        }
                    }
                }
            }
            FieldKind::ConstantPotential { potential } => check_rows(potential, "potential")?,
            FieldKind::PlaneWave {
                wave_vector,
                amplitude,
            } => {
                check_rows(amplitude, "plane-wave amplitude")?;
                if wave_vector.iter().any(|k| !k.is_finite()) {
                    return Err(Error::config("wave vector must be finite"));
                }
            }
            FieldKind::CustomPolynomial { terms } => {
                for t in terms {
                    if t.generator >= n || t.component >= 4 || !t.coeff.is_finite() {
                        return Err(Error::config(format!(
                            "polynomial term has generator {} / component {} out of range",
                            t.generator, t.component
                        )));
                    }
                }
            }
        }
        Ok(GaugeFieldConfig {
            nonzero_f: algebra.nonzero(),
            kind,
            algebra,
        })
    }

    pub fn zero(algebra: StructureConstants) -> Self {
        Self::new(FieldKind::Zero, algebra).expect("zero field is always valid")
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn algebra(&self) -> &StructureConstants {
        &self.algebra
    }

    /// Highest derivative order of the potential the kind can supply.
    pub fn max_taylor_order(&self) -> usize {
        MAX_TAYLOR_ORDER
    }

    /// Potential and its first two derivatives at `x`.
    ///
    /// `d1[a][nu][mu] = d_nu A_mu^a`, `d2[a][rho][nu][mu] = d_rho d_nu A_mu^a`.
    pub fn potential_jet<T: Scalar>(&self, x: &[T; 4], order: usize) -> PotentialJet<T> {
        let n = self.algebra.dim();
        let zero = x[0].zero_like();
        let mut jet = PotentialJet::zeros(n, &zero);
        match &self.kind {
            FieldKind::Zero => {}
            FieldKind::ConstantAbelian {
                generator,
                strength,
            } => {
                let g = *generator;
                for mu in 0..4 {
                    for nu in 0..4 {
                        let c = -0.5 * strength[mu][nu];
                        if c != 0.0 {
                            jet.a[g][mu].add_scaled(c, &x[nu]);
                            jet.d1[g][nu][mu] = zero.constant_like(c);
                        }
                    }
                }
            }
            FieldKind::ConstantPotential { potential } => {
                for (a, row) in potential.iter().enumerate() {
                    for mu in 0..4 {
                        jet.a[a][mu] = zero.constant_like(row[mu]);
                    }
                }
            }
            FieldKind::PlaneWave {
                wave_vector: k,
                amplitude,
            } => {
                let mut phase = zero.clone();
                for mu in 0..4 {
                    phase.add_scaled(k[mu], &x[mu]);
                }
                let phi = phase.body();
                // d^j/dphi^j cos = cos(phi + j pi/2)
                let cos_d = |j: usize| match j % 4 {
                    0 => libm::cos(phi),
                    1 => -libm::sin(phi),
                    2 => -libm::cos(phi),
                    _ => libm::sin(phi),
                };
                let sin_d = |j: usize| cos_d(j + 3);
                let cos = phase.lift(order, &cos_d);
                let sin = phase.lift(order, &sin_d);
                for (a, amp) in amplitude.iter().enumerate() {
                    for mu in 0..4 {
                        if amp[mu] == 0.0 {
                            continue;
                        }
                        jet.a[a][mu] = cos.scale(amp[mu]);
                        for nu in 0..4 {
                            jet.d1[a][nu][mu] = sin.scale(-amp[mu] * k[nu]);
                            for rho in 0..4 {
                                jet.d2[a][rho][nu][mu] = cos.scale(-amp[mu] * k[nu] * k[rho]);
                            }
                        }
                    }
                }
            }
            FieldKind::CustomPolynomial { terms } => {
                let max_pow = terms.iter().flat_map(|t| t.powers).max().unwrap_or(0) as usize;
                // powers[i][k] = x_i^k
                let powers: Vec<Vec<T>> = (0..4)
                    .map(|i| {
                        let mut p = Vec::with_capacity(max_pow + 1);
                        p.push(zero.constant_like(1.0));
                        for k in 1..=max_pow {
                            let next = p[k - 1].mul(&x[i]);
                            p.push(next);
                        }
                        p
                    })
                    .collect();
                let monomial = |coeff: f64, pw: [u32; 4]| -> T {
                    let mut v = zero.constant_like(coeff);
                    for i in 0..4 {
                        if pw[i] > 0 {
                            v = v.mul(&powers[i][pw[i] as usize]);
                        }
                    }
                    v
                };
                for t in terms {
                    let (a, mu) = (t.generator, t.component);
                    let v = monomial(t.coeff, t.powers);
                    jet.a[a][mu] = jet.a[a][mu].add(&v);
                    for nu in 0..4 {
                        let pn = t.powers[nu];
                        if pn == 0 {
                            continue;
                        }
                        let mut p1 = t.powers;
                        p1[nu] -= 1;
                        let d = monomial(t.coeff * pn as f64, p1);
                        jet.d1[a][nu][mu] = jet.d1[a][nu][mu].add(&d);
                        for rho in 0..4 {
                            let pr = p1[rho];
                            if pr == 0 {
                                continue;
                            }
                            let mut p2 = p1;
                            p2[rho] -= 1;
                            let dd = monomial(t.coeff * pn as f64 * pr as f64, p2);
                            jet.d2[a][rho][nu][mu] = jet.d2[a][rho][nu][mu].add(&dd);
                        }
                    }
                }
            }
        }
        jet
    }

    /// Potential, field strength and covariant derivative at `x`.
    pub fn evaluate<T: Scalar>(&self, x: &[T; 4], order: usize, e: f64) -> FieldPoint<T> {
        let jet = self.potential_jet(x, order);
        let n = self.algebra.dim();
        let zero = x[0].zero_like();
        let fs = &self.nonzero_f;

        let mut f: Vec<[[T; 4]; 4]> = (0..n).map(|_| square(&zero)).collect();
        let mut df: Vec<[[[T; 4]; 4]; 4]> = (0..n)
            .map(|_| core::array::from_fn(|_| square(&zero)))
            .collect();

        for a in 0..n {
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    f[a][mu][nu] = jet.d1[a][mu][nu].sub(&jet.d1[a][nu][mu]);
                    for rho in 0..4 {
                        df[a][rho][mu][nu] = jet.d2[a][rho][mu][nu].sub(&jet.d2[a][rho][nu][mu]);
                    }
                }
            }
        }
        if e != 0.0 {
            for &(b, c, a, fbca) in fs {
                let w = e * fbca;
                for mu in 0..4 {
                    for nu in mu + 1..4 {
                        f[a][mu][nu].add_scaled_product(w, &jet.a[b][mu], &jet.a[c][nu]);
                        for rho in 0..4 {
                            df[a][rho][mu][nu].add_scaled_product(
                                w,
                                &jet.d1[b][rho][mu],
                                &jet.a[c][nu],
                            );
                            df[a][rho][mu][nu].add_scaled_product(
                                w,
                                &jet.a[b][mu],
                                &jet.d1[c][rho][nu],
                            );
                        }
                    }
                }
            }
            // F is complete now; add the gauge-connection term of D_rho.
            for &(b, c, a, fbca) in fs {
                let w = e * fbca;
                for rho in 0..4 {
                    for mu in 0..4 {
                        for nu in mu + 1..4 {
                            let fc = f[c][mu][nu].clone();
                            df[a][rho][mu][nu].add_scaled_product(w, &jet.a[b][rho], &fc);
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    f[a][nu][mu] = f[a][mu][nu].scale(-1.0);
                    for rho in 0..4 {
                        df[a][rho][nu][mu] = df[a][rho][mu][nu].scale(-1.0);
                    }
                }
            }
        }
        FieldPoint {
            potential: jet.a,
            strength: FieldStrength { f },
            covariant: CovariantDerivative { df },
        }
    }
}

fn square<T: Scalar>(zero: &T) -> [[T; 4]; 4] {
    core::array::from_fn(|_| core::array::from_fn(|_| zero.clone()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialJet<T> {
    pub a: Vec<[T; 4]>,
    pub d1: Vec<[[T; 4]; 4]>,
    pub d2: Vec<[[[T; 4]; 4]; 4]>,
}

impl<T: Scalar> PotentialJet<T> {
    fn zeros(n: usize, zero: &T) -> Self {
        PotentialJet {
            a: (0..n)
                .map(|_| core::array::from_fn(|_| zero.clone()))
                .collect(),
            d1: (0..n).map(|_| square(zero)).collect(),
            d2: (0..n)
                .map(|_| core::array::from_fn(|_| square(zero)))
                .collect(),
        }
    }
}

/// `F_mu,nu^a`, indexed `[a][mu][nu]`, both indices covariant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStrength<T = f64> {
    pub f: Vec<[[T; 4]; 4]>,
}

/// `(D_rho F_mu,nu)^a`, indexed `[a][rho][mu][nu]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantDerivative<T = f64> {
    pub df: Vec<[[[T; 4]; 4]; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPoint<T = f64> {
    pub potential: Vec<[T; 4]>,
    pub strength: FieldStrength<T>,
    pub covariant: CovariantDerivative<T>,
}

/// `A_mu^a(x)`, indexed `[a][mu]`.
pub fn potential(config: &GaugeFieldConfig, x: &[f64; 4]) -> Vec<[f64; 4]> {
    config.potential_jet(x, 0).a
}

pub fn field_strength(config: &GaugeFieldConfig, x: &[f64; 4], e: f64) -> FieldStrength {
    config.evaluate(x, 0, e).strength
}

pub fn covariant_derivative_f(
    config: &GaugeFieldConfig,
    x: &[f64; 4],
    e: f64,
) -> CovariantDerivative {
    config.evaluate(x, 0, e).covariant
}

/// Max over `(a, mu, rho, sigma)` of the cyclic sum of `D F`.
pub fn bianchi_residual(config: &GaugeFieldConfig, x: &[f64; 4], e: f64) -> f64 {
    cyclic_residual(&covariant_derivative_f(config, x, e))
}

pub fn cyclic_residual(dfield: &CovariantDerivative) -> f64 {
    let mut worst: f64 = 0.0;
    for d in &dfield.df {
        for mu in 0..4 {
            for rho in 0..4 {
                for sigma in 0..4 {
                    let s = d[mu][rho][sigma] + d[rho][sigma][mu] + d[sigma][mu][rho];
                    worst = worst.max(libm::fabs(s));
                }
            }
        }
    }
    worst
}

/// Field strength and covariant derivative at a Grassmann-even point, expanded
/// about its body to the given order.
pub fn taylor_eval(
    config: &GaugeFieldConfig,
    x: &[GradedNumber; 4],
    order: usize,
    e: f64,
) -> Result<(
    FieldStrength<GradedNumber>,
    CovariantDerivative<GradedNumber>,
)> {
    if order > config.max_taylor_order() {
        return Err(Error::config(format!(
            "Taylor order {order} exceeds the {} derivatives available for {} fields",
            config.max_taylor_order(),
            config.kind().name()
        )));
    }
    let n_gen = x[0].n_gen();
    if x.iter().any(|c| c.n_gen() != n_gen) {
        return Err(Error::config(
            "graded position components disagree on generator count",
        ));
    }
    if x.iter().any(|c| !c.is_even()) {
        return Err(Error::config("graded position must be Grassmann-even"));
    }
    let p = config.evaluate(x, order, e);
    Ok((p.strength, p.covariant))
}
