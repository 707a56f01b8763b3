//! JSON run configs and their translation into core types.
//!
//! Every block is parsed strictly: unknown keys are rejected with the key name
//! in the message, and all validation happens before any computation starts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use wongspin_core::algebra::{builtin_algebra, BuiltinAlgebra, Representation};
use wongspin_core::dynamics::{
    direct_state, graded_state, internal_state, SpinForceSign, SpinTensor,
};
use wongspin_core::fields::{FieldKind, GaugeFieldConfig, Monomial};
use wongspin_core::grassmann::{parse_blade_label, MAX_GENERATORS};
use wongspin_core::integrate::Method;
use wongspin_core::linalg::CMatrix;
use wongspin_core::{
    ChargeVector, GradedNumber, IntegratorOptions, Mode, Model, ModelParams, Phase,
    StructureConstants,
};

use crate::error::{CliError, Result};

/// Overrides `output.dir` when set.
pub const OUTPUT_DIR_ENV: &str = "WONGSPIN_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "wongspin-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Simulate,
    CheckField,
    CheckAlgebra,
    QuantizeCheck,
    Sweep,
}

impl RunMode {
    pub fn name(self) -> &'static str {
        match self {
            RunMode::Simulate => "simulate",
            RunMode::CheckField => "check_field",
            RunMode::CheckAlgebra => "check_algebra",
            RunMode::QuantizeCheck => "quantize_check",
            RunMode::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<RunMode>,
    pub algebra: Option<Value>,
    pub field: Option<FieldBlock>,
    pub initial: Option<InitialBlock>,
    pub params: Option<ParamsBlock>,
    /// `internal`, `direct`, `graded` or `bmt`; inferred from `initial` when absent.
    pub equations: Option<String>,
    pub integrator: Option<IntegratorBlock>,
    pub output: Option<OutputBlock>,
    pub grid: Option<BTreeMap<String, Vec<Value>>>,
    pub quantize: Option<QuantizeBlock>,
    pub check: Option<CheckBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub kind: String,
    pub algebra: Option<Value>,
    #[serde(default)]
    pub params: Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    pub x0: [f64; 4],
    pub v0: [f64; 4],
    pub spin: Option<Value>,
    pub charge: ChargeBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeBlock {
    /// Internal coordinates as `[re, im]` pairs.
    pub q: Option<Vec<[f64; 2]>>,
    #[serde(rename = "Q")]
    pub charge: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub m: f64,
    pub e: f64,
    pub mu_prime: f64,
    /// `conserving` (default) or `reversed`.
    pub spin_force: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorBlock {
    /// `rk4` (fixed step, default) or `rk4_adaptive`.
    pub method: Option<String>,
    pub h: Option<f64>,
    pub s_end: Option<f64>,
    pub tol: Option<f64>,
    pub sample_every: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
    pub formats: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizeBlock {
    pub n_max: usize,
    pub p: [f64; 4],
    #[serde(rename = "A")]
    pub potential: Option<Vec<[f64; 4]>>,
    pub e: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBlock {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    pub e: Option<f64>,
}

fn default_points() -> usize {
    100
}

fn default_radius() -> f64 {
    10.0
}

fn default_fd_step() -> f64 {
    1e-5
}

impl Default for CheckBlock {
    fn default() -> Self {
        CheckBlock {
            points: default_points(),
            seed: 0,
            radius: default_radius(),
            fd_step: default_fd_step(),
            e: None,
        }
    }
}

fn from_value<T: DeserializeOwned>(what: &str, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| CliError::config(format!("{what}: {e}")))
}

/// Parses a config document, keeping the raw value for the manifest echo.
pub fn parse(raw: &Value) -> Result<RunConfig> {
    from_value("config", raw.clone())
}

impl RunConfig {
    /// Rejects a config whose `mode` disagrees with the command being run.
    pub fn expect_mode(&self, mode: RunMode) -> Result<()> {
        match self.mode {
            Some(m) if m != mode => Err(CliError::config(format!(
                "mode: config is for {} but the {} command was run",
                m.name(),
                mode.name()
            ))),
            _ => Ok(()),
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            return PathBuf::from(dir);
        }
        PathBuf::from(
            self.output
                .as_ref()
                .and_then(|o| o.dir.clone())
                .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_string()),
        )
    }

    pub fn formats(&self) -> Result<Formats> {
        let list = self
            .output
            .as_ref()
            .and_then(|o| o.formats.clone())
            .unwrap_or_else(|| vec!["csv".to_string()]);
        let mut f = Formats {
            csv: false,
            json: false,
        };
        for name in &list {
            match name.as_str() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                other => {
                    return Err(CliError::config(format!(
                        "output.formats: unknown format `{other}` (expected csv or json)"
                    )))
                }
            }
        }
        Ok(f)
    }

    fn algebra_value(&self) -> Result<&Value> {
        self.field
            .as_ref()
            .and_then(|f| f.algebra.as_ref())
            .or(self.algebra.as_ref())
            .ok_or_else(|| CliError::config("algebra: missing (set `algebra` or `field.algebra`)"))
    }

    pub fn algebra(&self) -> Result<AlgebraChoice> {
        algebra_from_value(self.algebra_value()?)
    }

    pub fn field_config(&self) -> Result<GaugeFieldConfig> {
        let block = self
            .field
            .as_ref()
            .ok_or_else(|| CliError::config("field: missing"))?;
        let alg = self.algebra()?;
        field_from_block(block, alg.constants)
    }

    pub fn model_params(&self) -> Result<(ModelParams, SpinForceSign)> {
        let p = self
            .params
            .as_ref()
            .ok_or_else(|| CliError::config("params: missing"))?;
        let sign = match p.spin_force.as_deref() {
            None | Some("conserving") => SpinForceSign::Conserving,
            Some("reversed") => SpinForceSign::Reversed,
            Some(other) => {
                return Err(CliError::config(format!(
                    "params.spin_force: unknown value `{other}` (expected conserving or reversed)"
                )))
            }
        };
        Ok((ModelParams::new(p.m, p.e, p.mu_prime)?, sign))
    }

    pub fn integrator_options(&self) -> Result<IntegratorOptions> {
        let b = self.integrator.clone().unwrap_or_default();
        let d = IntegratorOptions::default();
        let method = match b.method.as_deref() {
            None | Some("rk4") => Method::Rk4Fixed,
            Some("rk4_adaptive") => Method::Rk4Adaptive,
            Some(other) => {
                return Err(CliError::config(format!(
                    "integrator.method: unknown method `{other}` (expected rk4 or rk4_adaptive)"
                )))
            }
        };
        let opts = IntegratorOptions {
            method,
            h: b.h.unwrap_or(d.h),
            s_end: b.s_end.unwrap_or(d.s_end),
            tol: b.tol.unwrap_or(d.tol),
            sample_every: b.sample_every.unwrap_or(d.sample_every),
        };
        opts.validate(0.0)?;
        Ok(opts)
    }

    pub fn check_block(&self) -> CheckBlock {
        self.check.clone().unwrap_or_default()
    }

    /// Everything `simulate` needs, fully validated.
    pub fn simulation(&self) -> Result<Simulation> {
        let field = self.field_config()?;
        let alg = self.algebra()?;
        if let Some(rep) = &alg.rep {
            rep.validate()
                .map_err(|e| CliError::config(format!("algebra: {e}")))?;
        }
        let (params, sign) = self.model_params()?;
        let model = Model::new(field, alg.rep, params)?.with_spin_force(sign);
        let initial = self
            .initial
            .as_ref()
            .ok_or_else(|| CliError::config("initial: missing"))?;
        let state = initial_state(initial, &model)?;
        let mode = match self.equations.as_deref() {
            None => match (&state, &initial.charge.q) {
                (InitialState::Graded(_), _) => Mode::Graded,
                (InitialState::Body(_), Some(_)) => Mode::Internal,
                (InitialState::Body(_), None) => Mode::Direct,
            },
            Some("internal") => Mode::Internal,
            Some("direct") => Mode::Direct,
            Some("graded") => Mode::Graded,
            Some("bmt") => Mode::Bmt,
            Some(other) => {
                return Err(CliError::config(format!(
                    "equations: unknown value `{other}` (expected internal, direct, graded or bmt)"
                )))
            }
        };
        match &state {
            InitialState::Body(p) => mode.check(p),
            InitialState::Graded(p) => mode.check(p),
        }
        .map_err(|e| CliError::config(format!("equations: {e}")))?;
        Ok(Simulation {
            model,
            mode,
            options: self.integrator_options()?,
            state,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
}

#[derive(Debug, Clone)]
pub struct AlgebraChoice {
    pub name: String,
    pub constants: StructureConstants,
    /// First listed representation; inline algebras may omit it.
    pub rep: Option<Representation>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineAlgebra {
    dim: usize,
    f: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    representations: Vec<InlineRep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineRep {
    dim_rep: usize,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

/// A builtin name (`"su2"`) or an inline `{dim, f, representations}` object.
pub fn algebra_from_value(v: &Value) -> Result<AlgebraChoice> {
    if let Some(name) = v.as_str() {
        let which: BuiltinAlgebra = name
            .parse()
            .map_err(|e: wongspin_core::Error| CliError::config(format!("algebra: {e}")))?;
        let (constants, rep) = builtin_algebra(which);
        return Ok(AlgebraChoice {
            name: which.name().to_string(),
            constants,
            rep: Some(rep),
        });
    }
    let inline: InlineAlgebra = from_value("algebra", v.clone())?;
    let n = inline.dim;
    let shape_ok = inline.f.len() == n
        && inline
            .f
            .iter()
            .all(|row| row.len() == n && row.iter().all(|col| col.len() == n));
    if !shape_ok {
        return Err(CliError::config(format!(
            "algebra.f: expected a {n} x {n} x {n} nested array"
        )));
    }
    let flat = inline.f.into_iter().flatten().flatten().collect();
    let constants = StructureConstants::new(n, flat)?;
    let rep = match inline.representations.into_iter().next() {
        None => None,
        Some(r) => {
            let matrices = r
                .matrices
                .iter()
                .enumerate()
                .map(|(a, m)| {
                    if m.len() != r.dim_rep || m.iter().any(|row| row.len() != r.dim_rep) {
                        return Err(CliError::config(format!(
                            "algebra.representations[0].matrices[{a}]: expected {d} x {d}",
                            d = r.dim_rep
                        )));
                    }
                    let rows: Vec<Vec<Complex64>> = m
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|[re, im]| Complex64::new(*re, *im))
                                .collect()
                        })
                        .collect();
                    Ok(CMatrix::from_rows(&rows)?)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Representation::new(constants.clone(), matrices)?)
        }
    };
    Ok(AlgebraChoice {
        name: "inline".to_string(),
        constants,
        rep,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantAbelianParams {
    #[serde(default)]
    generator: usize,
    /// Independent components keyed `"01"`, `"02"`, ..., `"23"`.
    #[serde(rename = "F")]
    strength: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantPotentialParams {
    #[serde(rename = "A")]
    potential: Vec<[f64; 4]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneWaveParams {
    k: [f64; 4],
    amplitude: Vec<[f64; 4]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    terms: Vec<TermParams>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermParams {
    a: usize,
    mu: usize,
    coeff: f64,
    powers: [u32; 4],
}

pub const FIELD_KINDS: [&str; 5] = [
    "zero",
    "constant_abelian",
    "constant_potential",
    "plane_wave",
    "custom_polynomial",
];

fn index_pair(key: &str, what: &str) -> Result<(usize, usize)> {
    let bad = || {
        CliError::config(format!(
            "{what}: bad index pair `{key}` (expected one of 01, 02, 03, 12, 13, 23)"
        ))
    };
    let b = key.as_bytes();
    if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
        return Err(bad());
    }
    let (mu, nu) = ((b[0] - b'0') as usize, (b[1] - b'0') as usize);
    if mu >= nu || nu > 3 {
        return Err(bad());
    }
    Ok((mu, nu))
}

pub fn field_from_block(
    block: &FieldBlock,
    algebra: StructureConstants,
) -> Result<GaugeFieldConfig> {
    let params = if block.params.is_null() {
        Value::Object(Default::default())
    } else {
        block.params.clone()
    };
    let what = "field.params";
    let kind = match block.kind.as_str() {
        "zero" => {
            from_value::<NoParams>(what, params)?;
            FieldKind::Zero
        }
        "constant_abelian" => {
            let p: ConstantAbelianParams = from_value(what, params)?;
            let mut strength = [[0.0; 4]; 4];
            for (key, val) in &p.strength {
                let (mu, nu) = index_pair(key, "field.params.F")?;
                strength[mu][nu] = *val;
                strength[nu][mu] = -*val;
            }
            FieldKind::ConstantAbelian {
                generator: p.generator,
                strength,
            }
        }
        "constant_potential" => {
            let p: ConstantPotentialParams = from_value(what, params)?;
            FieldKind::ConstantPotential {
                potential: p.potential,
            }
        }
        "plane_wave" => {
            let p: PlaneWaveParams = from_value(what, params)?;
            FieldKind::PlaneWave {
                wave_vector: p.k,
                amplitude: p.amplitude,
            }
        }
        "custom_polynomial" => {
            let p: PolynomialParams = from_value(what, params)?;
            FieldKind::CustomPolynomial {
                terms: p
                    .terms
                    .into_iter()
                    .map(|t| Monomial {
                        generator: t.a,
                        component: t.mu,
                        coeff: t.coeff,
                        powers: t.powers,
                    })
                    .collect(),
            }
        }
        other => {
            return Err(CliError::config(format!(
                "field.kind: unknown field kind `{other}` (expected one of {})",
                FIELD_KINDS.join(", ")
            )))
        }
    };
    GaugeFieldConfig::new(kind, algebra).map_err(|e| CliError::config(format!("field: {e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Body(Phase),
    Graded(Box<Phase<GradedNumber>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GradedSpin {
    n_gen: Option<usize>,
    /// One blade-label map per component.
    xi: [BTreeMap<String, f64>; 4],
}

const SPIN_KEYS: [&str; 6] = ["S01", "S02", "S03", "S12", "S13", "S23"];

#[derive(Debug, Clone)]
pub struct Simulation {
    pub model: Model,
    pub mode: Mode,
    pub options: IntegratorOptions,
    pub state: InitialState,
}

fn initial_state(b: &InitialBlock, model: &Model) -> Result<InitialState> {
    let spin_value = b.spin.clone().unwrap_or(Value::Object(Default::default()));
    let graded = spin_value.get("xi").is_some();
    let tensor = if graded {
        SpinTensor::zero()
    } else {
        let map: BTreeMap<String, f64> = from_value("initial.spin", spin_value.clone())?;
        let mut c = [0.0; 6];
        for (key, val) in map {
            let i = SPIN_KEYS.iter().position(|k| *k == key).ok_or_else(|| {
                CliError::config(format!(
                    "initial.spin: unknown key `{key}` (expected S01..S23 or xi)"
                ))
            })?;
            c[i] = val;
        }
        SpinTensor::new(c)
    };

    let body = match (&b.charge.q, &b.charge.charge) {
        (Some(q), None) => {
            let q: Vec<Complex64> = q.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let rep = model.rep.as_ref().ok_or_else(|| {
                CliError::config("initial.charge.q: the algebra has no representation")
            })?;
            if q.len() != rep.dim_rep() {
                return Err(CliError::config(format!(
                    "initial.charge.q: expected {} components, found {}",
                    rep.dim_rep(),
                    q.len()
                )));
            }
            internal_state(b.x0, b.v0, &q, tensor)
        }
        (None, Some(q)) => {
            let n = model.field.algebra().dim();
            if q.len() != n {
                return Err(CliError::config(format!(
                    "initial.charge.Q: expected {n} components, found {}",
                    q.len()
                )));
            }
            direct_state(b.x0, b.v0, &ChargeVector(q.clone()), tensor)
        }
        _ => return Err(CliError::config(
            "initial.charge: give exactly one of `q` (internal coordinates) or `Q` (charge vector)",
        )),
    };

    if !graded {
        return Ok(InitialState::Body(body));
    }
    let g: GradedSpin = from_value("initial.spin", spin_value)?;
    let n_gen = g
        .n_gen
        .unwrap_or(wongspin_core::grassmann::DEFAULT_GENERATORS);
    if n_gen == 0 || n_gen > MAX_GENERATORS {
        return Err(CliError::config(format!(
            "initial.spin.n_gen: must be between 1 and {MAX_GENERATORS}"
        )));
    }
    let mut xi: [GradedNumber; 4] = core::array::from_fn(|_| GradedNumber::zero(n_gen));
    for (mu, map) in g.xi.iter().enumerate() {
        for (label, val) in map {
            let mask = parse_blade_label(label, n_gen)
                .map_err(|e| CliError::config(format!("initial.spin.xi[{mu}]: {e}")))?;
            xi[mu].set_coeff(mask, *val);
        }
    }
    let phase =
        graded_state(&body, xi).map_err(|e| CliError::config(format!("initial.spin.xi: {e}")))?;
    Ok(InitialState::Graded(Box::new(phase)))
}
