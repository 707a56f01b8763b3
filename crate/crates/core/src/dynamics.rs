//! Particle state, equations of motion and conserved quantities.
//!
//! One generic right-hand side serves every backend:
//!
//! * charge: `dQ_a/ds = f_ab^c K_b Q_c` with
//!   `K_b = -e A_mu^b v^mu + (mu'/2m) F_mu,nu^b S^mu,nu`, or equivalently
//!   `dq/ds = -i K_a J_a q` for the internal coordinates,
//! * spin: `m dS^mu,nu/ds = mu' Q_a (F^{a rho nu} S_rho^mu - F^{a rho mu} S_rho^nu)`,
//!   or `m dxi^mu/ds = mu' Q_a F^{a mu}_nu xi^nu` for odd spin variables,
//! * force: `m dv^mu/ds = e F^{a mu nu} v_nu Q_a - (mu'/2m) (D^mu F^{rho sigma})^a S_rho,sigma Q_a`.
//!
//! The sign of the spin-gradient force is the one for which
//! `C2 = m/2 v.v + (mu'/2m) F.S.Q` is a first integral; see [`SpinForceSign`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{ChargeVector, Representation};
use crate::error::{Error, Result};
use crate::fields::{GaugeFieldConfig, MAX_TAYLOR_ORDER};
use crate::grassmann::GradedNumber;
use crate::metric::{ETA, PAIRS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub m: f64,
    pub e: f64,
    pub mu_prime: f64,
}

impl ModelParams {
    pub fn new(m: f64, e: f64, mu_prime: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::config(format!(
                "mass must be positive and finite, got {m}"
            )));
        }
        if !e.is_finite() || !mu_prime.is_finite() {
            return Err(Error::config("coupling and magnetic moment must be finite"));
        }
        Ok(ModelParams { m, e, mu_prime })
    }

    /// `mu' / 2m`, the spin coupling.
    pub fn spin_coupling(&self) -> f64 {
        self.mu_prime / (2.0 * self.m)
    }

    pub fn is_anomalous(&self) -> bool {
        self.mu_prime != self.e
    }
}

/// Sign in front of the `(D^mu F^{rho sigma}) S Q` force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinForceSign {
    /// `-(mu'/2m) D F S Q`: keeps `C2` conserved.
    #[default]
    Conserving,
    /// `+(mu'/2m) D F S Q`, the opposite sign; `C2` drifts under it.
    Reversed,
}

/// Antisymmetric `S^mu,nu`, stored as the six `mu < nu` components in
/// [`PAIRS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTensor<T = f64> {
    pub components: [T; 6],
}

impl<T: Scalar> SpinTensor<T> {
    pub fn new(components: [T; 6]) -> Self {
        SpinTensor { components }
    }

    pub fn full(&self) -> [[T; 4]; 4] {
        let zero = self.components[0].zero_like();
        let mut s: [[T; 4]; 4] = core::array::from_fn(|_| core::array::from_fn(|_| zero.clone()));
        for (k, &(mu, nu)) in PAIRS.iter().enumerate() {
            s[mu][nu] = self.components[k].clone();
            s[nu][mu] = self.components[k].scale(-1.0);
        }
        s
    }
}

impl SpinTensor<f64> {
    pub fn zero() -> Self {
        SpinTensor {
            components: [0.0; 6],
        }
    }

    /// `S_mu,nu S^mu,nu`.
    pub fn square(&self) -> f64 {
        // lowering both indices multiplies by eta_mu eta_nu
        2.0 * PAIRS
            .iter()
            .zip(&self.components)
            .map(|(&(mu, nu), s)| ETA[mu] * ETA[nu] * s * s)
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Charge<T = f64> {
    /// Internal coordinates `q`, split into real and imaginary parts.
    Internal { re: Vec<T>, im: Vec<T> },
    /// Charge vector `Q_a` evolved directly.
    Direct(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spin<T = f64> {
    /// Classicalized real spin tensor.
    Tensor(SpinTensor<T>),
    /// Odd spin variables `xi^mu`.
    Odd([T; 4]),
}

/// Dynamical variables at one worldline point (also used for their rates).
#[derive(Debug, Clone, PartialEq)]
pub struct Phase<T = f64> {
    pub x: [T; 4],
    pub v: [T; 4],
    pub charge: Charge<T>,
    pub spin: Spin<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState<T = f64> {
    pub s: f64,
    pub phase: Phase<T>,
}

impl<T: Scalar> ParticleState<T> {
    pub fn new(s: f64, phase: Phase<T>) -> Self {
        ParticleState { s, phase }
    }
}

/// Body-backend state with internal coordinates `q`.
pub fn internal_state(x: [f64; 4], v: [f64; 4], q: &[Complex64], spin: SpinTensor) -> Phase {
    Phase {
        x,
        v,
        charge: Charge::Internal {
            re: q.iter().map(|z| z.re).collect(),
            im: q.iter().map(|z| z.im).collect(),
        },
        spin: Spin::Tensor(spin),
    }
}

/// Body-backend state with an explicit charge vector.
pub fn direct_state(x: [f64; 4], v: [f64; 4], charge: &ChargeVector, spin: SpinTensor) -> Phase {
    Phase {
        x,
        v,
        charge: Charge::Direct(charge.0.clone()),
        spin: Spin::Tensor(spin),
    }
}

/// Promotes a body-backend state with zero spin tensor into `Lambda_N`, attaching
/// the odd spin variables `xi`.
pub fn graded_state(body: &Phase, xi: [GradedNumber; 4]) -> Result<Phase<GradedNumber>> {
    let n_gen = xi[0].n_gen();
    if xi.iter().any(|g| g.n_gen() != n_gen) {
        return Err(Error::config(
            "odd spin variables disagree on generator count",
        ));
    }
    if xi.iter().any(|g| !g.is_odd()) {
        return Err(Error::config("odd spin variables must have odd parity"));
    }
    let lift = |r: &f64| GradedNumber::scalar(n_gen, *r);
    let charge = match &body.charge {
        Charge::Internal { re, im } => Charge::Internal {
            re: re.iter().map(lift).collect(),
            im: im.iter().map(lift).collect(),
        },
        Charge::Direct(q) => Charge::Direct(q.iter().map(lift).collect()),
    };
    Ok(Phase {
        x: body.x.each_ref().map(lift),
        v: body.v.each_ref().map(lift),
        charge,
        spin: Spin::Odd(xi),
    })
}

/// `Q_a = q^dagger J_a q`.
pub fn charge_from_internal(q: &[Complex64], rep: &Representation) -> Result<ChargeVector> {
    if q.len() != rep.dim_rep() {
        return Err(Error::DimensionMismatch {
            what: "internal coordinates",
            expected: rep.dim_rep(),
            found: q.len(),
        });
    }
    Ok(ChargeVector(
        rep.matrices()
            .iter()
            .map(|j| {
                let jq = j.mul_vec(q);
                q.iter().zip(&jq).map(|(a, b)| (a.conj() * b).re).sum()
            })
            .collect(),
    ))
}

/// Which equations drive the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Internal coordinates `q`, real spin tensor.
    Internal,
    /// Charge vector `Q`, real spin tensor.
    Direct,
    /// Odd spin variables; every variable valued in `Lambda_N`.
    Graded,
    /// Anomalous-moment spin law with real spin tensor.
    Bmt,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Internal => "internal",
            Mode::Direct => "direct",
            Mode::Graded => "graded",
            Mode::Bmt => "bmt",
        }
    }

    pub fn check<T>(self, phase: &Phase<T>) -> Result<()> {
        let ok = match self {
            Mode::Internal => {
                matches!(phase.charge, Charge::Internal { .. })
                    && matches!(phase.spin, Spin::Tensor(_))
            }
            Mode::Direct => {
                matches!(phase.charge, Charge::Direct(_)) && matches!(phase.spin, Spin::Tensor(_))
            }
            Mode::Graded => matches!(phase.spin, Spin::Odd(_)),
            Mode::Bmt => matches!(phase.spin, Spin::Tensor(_)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "state does not match the {} equations of motion",
                self.name()
            )))
        }
    }
}

/// Field, representation and parameters shared by all right-hand sides.
#[derive(Debug, Clone)]
pub struct Model {
    pub field: GaugeFieldConfig,
    pub rep: Option<Representation>,
    pub params: ModelParams,
    pub spin_force: SpinForceSign,
}

impl Model {
    pub fn new(
        field: GaugeFieldConfig,
        rep: Option<Representation>,
        params: ModelParams,
    ) -> Result<Self> {
        if let Some(r) = &rep {
            if r.algebra().dim() != field.algebra().dim() {
                return Err(Error::DimensionMismatch {
                    what: "representation vs field algebra",
                    expected: field.algebra().dim(),
                    found: r.algebra().dim(),
                });
            }
        }
        Ok(Model {
            field,
            rep,
            params,
            spin_force: SpinForceSign::Conserving,
        })
    }

    pub fn with_spin_force(mut self, sign: SpinForceSign) -> Self {
        self.spin_force = sign;
        self
    }

    fn n(&self) -> usize {
        self.field.algebra().dim()
    }

    fn check_shapes<T>(&self, phase: &Phase<T>) -> Result<()> {
        match &phase.charge {
            Charge::Direct(q) if q.len() != self.n() => Err(Error::DimensionMismatch {
                what: "charge vector",
                expected: self.n(),
                found: q.len(),
            }),
            Charge::Internal { re, im } => {
                let rep = self
                    .rep
                    .as_ref()
                    .ok_or_else(|| Error::config("internal charge mode needs a representation"))?;
                if re.len() != rep.dim_rep() || im.len() != rep.dim_rep() {
                    return Err(Error::DimensionMismatch {
                        what: "internal coordinates",
                        expected: rep.dim_rep(),
                        found: re.len(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `Q_a` of a state, formed from `q` when the charge is internal.
    pub fn charges<T: Scalar>(&self, phase: &Phase<T>) -> Vec<T> {
        match &phase.charge {
            Charge::Direct(q) => q.clone(),
            Charge::Internal { re, im } => {
                let rep = self.rep.as_ref().expect("checked by check_shapes");
                let zero = phase.x[0].zero_like();
                rep.matrices()
                    .iter()
                    .map(|j| {
                        // Re[(r_i - i m_i)(A_ij + i B_ij)(r_j + i m_j)]
                        let d = j.dim();
                        let mut acc = zero.clone();
                        for i in 0..d {
                            for k in 0..d {
                                let z = j[(i, k)];
                                if z.re != 0.0 {
                                    acc.add_scaled_product(z.re, &re[i], &re[k]);
                                    acc.add_scaled_product(z.re, &im[i], &im[k]);
                                }
                                if z.im != 0.0 {
                                    acc.add_scaled_product(-z.im, &re[i], &im[k]);
                                    acc.add_scaled_product(z.im, &im[i], &re[k]);
                                }
                            }
                        }
                        acc
                    })
                    .collect()
            }
        }
    }
}

fn spin_tensor_of<T: Scalar>(spin: &Spin<T>) -> [[T; 4]; 4] {
    match spin {
        Spin::Tensor(s) => s.full(),
        Spin::Odd(xi) => {
            let zero = xi[0].zero_like();
            let mut s: [[T; 4]; 4] =
                core::array::from_fn(|_| core::array::from_fn(|_| zero.clone()));
            for mu in 0..4 {
                for nu in 0..4 {
                    if mu != nu {
                        s[mu][nu].add_scaled_product(0.5, &xi[mu], &xi[nu]);
                    }
                }
            }
            s
        }
    }
}

/// `S^mu,nu` of a state (`1/2 xi^mu xi^nu` for odd spin variables).
pub fn spin_tensor<T: Scalar>(phase: &Phase<T>) -> [[T; 4]; 4] {
    spin_tensor_of(&phase.spin)
}

fn minkowski_square<T: Scalar>(v: &[T; 4]) -> T {
    let mut vv = v[0].zero_like();
    for mu in 0..4 {
        vv.add_scaled_product(ETA[mu], &v[mu], &v[mu]);
    }
    vv
}

/// `sum_a Q_a F^a_mu,nu` and the same contraction of `S^mu,nu`.
fn contract_charge<T: Scalar>(q: &[T], f: &[[[T; 4]; 4]]) -> [[T; 4]; 4] {
    let zero = q[0].zero_like();
    core::array::from_fn(|mu| {
        core::array::from_fn(|nu| {
            let mut acc = zero.clone();
            if mu != nu {
                for (qa, fa) in q.iter().zip(f) {
                    acc.add_scaled_product(1.0, qa, &fa[mu][nu]);
                }
            }
            acc
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpinLaw {
    Standard,
    Anomalous,
}

fn phase_rate<T: Scalar>(
    model: &Model,
    phase: &Phase<T>,
    law: SpinLaw,
    s: f64,
) -> Result<Phase<T>> {
    model.check_shapes(phase)?;
    let p = model.params;
    let (m, e, mu_p) = (p.m, p.e, p.mu_prime);
    let k = p.spin_coupling();
    let zero = phase.x[0].zero_like();
    let n = model.n();

    let order = phase.x[0].taylor_order();
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::config(format!(
            "graded evaluation needs Taylor order {order}, at most {MAX_TAYLOR_ORDER} available"
        )));
    }
    let fp = model.field.evaluate(&phase.x, order, e);
    let q = model.charges(phase);
    let spin = spin_tensor_of(&phase.spin);
    let v = &phase.v;

    // K_b = -e A_mu^b v^mu + k F^b_mu,nu S^mu,nu
    let kvec: Vec<T> = (0..n)
        .map(|b| {
            let mut acc = zero.clone();
            for mu in 0..4 {
                acc.add_scaled_product(-e, &fp.potential[b][mu], &v[mu]);
            }
            for &(mu, nu) in &PAIRS {
                acc.add_scaled_product(2.0 * k, &fp.strength.f[b][mu][nu], &spin[mu][nu]);
            }
            acc
        })
        .collect();

    let g = contract_charge(&q, &fp.strength.f);

    // force
    let grad_sign = match model.spin_force {
        SpinForceSign::Conserving => -1.0,
        SpinForceSign::Reversed => 1.0,
    };
    let v_rate: [T; 4] = core::array::from_fn(|mu| {
        let mut acc = zero.clone();
        for nu in 0..4 {
            acc.add_scaled_product(e * ETA[mu] / m, &g[mu][nu], &v[nu]);
        }
        if k != 0.0 {
            for a in 0..n {
                let mut ds = zero.clone();
                for &(rho, sigma) in &PAIRS {
                    ds.add_scaled_product(
                        2.0,
                        &fp.covariant.df[a][mu][rho][sigma],
                        &spin[rho][sigma],
                    );
                }
                acc.add_scaled_product(grad_sign * k * ETA[mu] / m, &ds, &q[a]);
            }
        }
        acc
    });

    // charge
    let charge = match &phase.charge {
        Charge::Direct(_) => {
            let mut dq = vec![zero.clone(); n];
            for (a, b, c, fabc) in model.field.algebra().nonzero() {
                dq[a].add_scaled_product(fabc, &kvec[b], &q[c]);
            }
            Charge::Direct(dq)
        }
        Charge::Internal { re, im } => {
            let rep = model.rep.as_ref().expect("checked by check_shapes");
            let d = rep.dim_rep();
            // dq = -i M q with M = sum_a K_a J_a = M_re + i M_im
            let mut dre = vec![zero.clone(); d];
            let mut dim = vec![zero.clone(); d];
            for (ka, j) in kvec.iter().zip(rep.matrices()) {
                for i in 0..d {
                    for l in 0..d {
                        let z = j[(i, l)];
                        // X = M_re r - M_im m, Y = M_re m + M_im r; dre = Y, dim = -X
                        if z.re != 0.0 {
                            dre[i].add_scaled_product(z.re, ka, &im[l]);
                            dim[i].add_scaled_product(-z.re, ka, &re[l]);
                        }
                        if z.im != 0.0 {
                            dre[i].add_scaled_product(z.im, ka, &re[l]);
                            dim[i].add_scaled_product(z.im, ka, &im[l]);
                        }
                    }
                }
            }
            Charge::Internal { re: dre, im: dim }
        }
    };

    // spin: M^mu_rho = eta^mu G_mu,rho
    let rate = mu_p / m;
    let spin_rate = match &phase.spin {
        Spin::Tensor(_) => {
            let mut comps: [T; 6] = core::array::from_fn(|_| zero.clone());
            for (idx, &(mu, nu)) in PAIRS.iter().enumerate() {
                for r in 0..4 {
                    comps[idx].add_scaled_product(rate * ETA[mu], &g[mu][r], &spin[r][nu]);
                    comps[idx].add_scaled_product(rate * ETA[nu], &spin[mu][r], &g[nu][r]);
                }
            }
            if law == SpinLaw::Anomalous && mu_p != e {
                let vv = minkowski_square(v);
                let scale: f64 = phase.v.iter().map(|c| c.body() * c.body()).sum();
                let b = vv.body();
                if libm::fabs(b) <= 1e-14 * scale || b == 0.0 {
                    return Err(Error::DegenerateVelocity { s });
                }
                let inv = vv.lift(order, &|j| {
                    // d^j/dx^j x^-1 = (-1)^j j! x^-(j+1)
                    let mut f = 1.0;
                    for i in 1..=j {
                        f *= -(i as f64);
                    }
                    f / libm::pow(b, (j + 1) as f64)
                });
                // u^mu = v^rho G_rho,sigma S^sigma,mu
                let u: [T; 4] = core::array::from_fn(|mu| {
                    let mut acc = zero.clone();
                    for rho in 0..4 {
                        for sigma in 0..4 {
                            if spin[sigma][mu] != zero && g[rho][sigma] != zero {
                                acc = acc.add(&v[rho].mul(&g[rho][sigma]).mul(&spin[sigma][mu]));
                            }
                        }
                    }
                    acc
                });
                let c = (mu_p - e) / m;
                for (idx, &(mu, nu)) in PAIRS.iter().enumerate() {
                    let mut anti = u[mu].mul(&v[nu]);
                    anti.add_scaled_product(-1.0, &u[nu], &v[mu]);
                    comps[idx].add_scaled_product(c, &inv, &anti);
                }
            }
            Spin::Tensor(SpinTensor::new(comps))
        }
        Spin::Odd(xi) => {
            if law == SpinLaw::Anomalous {
                return Err(Error::config(
                    "the anomalous spin law is defined for the spin tensor only",
                ));
            }
            Spin::Odd(core::array::from_fn(|mu| {
                let mut acc = zero.clone();
                for nu in 0..4 {
                    acc.add_scaled_product(rate * ETA[mu], &g[mu][nu], &xi[nu]);
                }
                acc
            }))
        }
    };

    Ok(Phase {
        x: phase.v.clone(),
        v: v_rate,
        charge,
        spin: spin_rate,
    })
}

/// Rates for internal coordinates with a real spin tensor.
pub fn rhs_internal(state: &ParticleState, model: &Model) -> Result<Phase> {
    Mode::Internal.check(&state.phase)?;
    phase_rate(model, &state.phase, SpinLaw::Standard, state.s)
}

/// Rates for a directly evolved charge vector with a real spin tensor.
pub fn rhs_direct(state: &ParticleState, model: &Model) -> Result<Phase> {
    Mode::Direct.check(&state.phase)?;
    phase_rate(model, &state.phase, SpinLaw::Standard, state.s)
}

/// Rates of the fully graded system.
pub fn rhs_graded(
    state: &ParticleState<GradedNumber>,
    model: &Model,
) -> Result<Phase<GradedNumber>> {
    Mode::Graded.check(&state.phase)?;
    phase_rate(model, &state.phase, SpinLaw::Standard, state.s)
}

/// Rates with the anomalous-moment spin law.
///
/// Position follows the same force law as [`rhs_direct`]; the additional
/// force terms that accompany `mu' != e` are not included.
pub fn rhs_bmt(state: &ParticleState, model: &Model) -> Result<Phase> {
    Mode::Bmt.check(&state.phase)?;
    phase_rate(model, &state.phase, SpinLaw::Anomalous, state.s)
}

/// Rates for any mode and backend.
pub fn rhs<T: Scalar>(state: &ParticleState<T>, model: &Model, mode: Mode) -> Result<Phase<T>> {
    mode.check(&state.phase)?;
    let law = if mode == Mode::Bmt {
        SpinLaw::Anomalous
    } else {
        SpinLaw::Standard
    };
    phase_rate(model, &state.phase, law, state.s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedSet<T = f64> {
    /// `xi_mu v^mu`; only defined for odd spin variables.
    pub c1: Option<T>,
    /// `m/2 v.v + (mu'/2m) F_mu,nu^a S^mu,nu Q_a`.
    pub c2: T,
    /// `q^dagger q`; only defined for internal coordinates.
    pub c3: Option<T>,
    /// `sum_a Q_a^2`.
    pub casimir: T,
}

pub fn conserved_quantities<T: Scalar>(phase: &Phase<T>, model: &Model) -> Result<ConservedSet<T>> {
    model.check_shapes(phase)?;
    let p = model.params;
    let zero = phase.x[0].zero_like();
    let order = phase.x[0].taylor_order();
    let fp = model.field.evaluate(&phase.x, order, p.e);
    let q = model.charges(phase);
    let spin = spin_tensor(phase);
    let g = contract_charge(&q, &fp.strength.f);

    let mut c2 = minkowski_square(&phase.v).scale(0.5 * p.m);
    for &(mu, nu) in &PAIRS {
        c2.add_scaled_product(2.0 * p.spin_coupling(), &g[mu][nu], &spin[mu][nu]);
    }
    let c1 = match &phase.spin {
        Spin::Odd(xi) => {
            let mut acc = zero.clone();
            for mu in 0..4 {
                acc.add_scaled_product(ETA[mu], &xi[mu], &phase.v[mu]);
            }
            Some(acc)
        }
        Spin::Tensor(_) => None,
    };
    let c3 = match &phase.charge {
        Charge::Internal { re, im } => {
            let mut acc = zero.clone();
            for (r, i) in re.iter().zip(im) {
                acc.add_scaled_product(1.0, r, r);
                acc.add_scaled_product(1.0, i, i);
            }
            Some(acc)
        }
        Charge::Direct(_) => None,
    };
    let mut casimir = zero;
    for qa in &q {
        casimir.add_scaled_product(1.0, qa, qa);
    }
    Ok(ConservedSet {
        c1,
        c2,
        c3,
        casimir,
    })
}

impl<T: Scalar> Phase<T> {
    fn for_each<'a>(&'a self, mut f: impl FnMut(&'a T)) {
        self.x.iter().for_each(&mut f);
        self.v.iter().for_each(&mut f);
        match &self.charge {
            Charge::Internal { re, im } => {
                re.iter().for_each(&mut f);
                im.iter().for_each(&mut f);
            }
            Charge::Direct(q) => q.iter().for_each(&mut f),
        }
        match &self.spin {
            Spin::Tensor(s) => s.components.iter().for_each(&mut f),
            Spin::Odd(xi) => xi.iter().for_each(&mut f),
        }
    }

    fn map(&self, mut f: impl FnMut(&T) -> T) -> Self {
        Phase {
            x: self.x.each_ref().map(&mut f),
            v: self.v.each_ref().map(&mut f),
            charge: match &self.charge {
                Charge::Internal { re, im } => Charge::Internal {
                    re: re.iter().map(&mut f).collect(),
                    im: im.iter().map(&mut f).collect(),
                },
                Charge::Direct(q) => Charge::Direct(q.iter().map(&mut f).collect()),
            },
            spin: match &self.spin {
                Spin::Tensor(s) => {
                    Spin::Tensor(SpinTensor::new(s.components.each_ref().map(&mut f)))
                }
                Spin::Odd(xi) => Spin::Odd(xi.each_ref().map(&mut f)),
            },
        }
    }

    /// Number of reals in [`Phase::to_flat`].
    pub fn flat_len(&self) -> usize {
        let mut len = 0;
        self.for_each(|c| len += c.width());
        len
    }

    /// All coefficients in a fixed order: x, v, charge, spin.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.flat_len()];
        self.write_flat(&mut out);
        out
    }

    pub fn write_flat(&self, out: &mut [f64]) {
        let mut at = 0;
        self.for_each(|c| {
            let w = c.width();
            c.write_flat(&mut out[at..at + w]);
            at += w;
        });
    }

    /// Reads coefficients laid out like `self`.
    pub fn read_flat(&self, src: &[f64]) -> Self {
        let mut at = 0;
        self.map(|c| {
            let w = c.width();
            let v = c.read_flat(&src[at..at + w]);
            at += w;
            v
        })
    }
}
