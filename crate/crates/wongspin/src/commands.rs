//! The CLI subcommands. Each returns a [`CommandOutcome`] whose exit code
//! follows the 0/2/3/4 contract; files are only written once a config has
//! passed validation.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use wongspin_core::algebra::{commutator_residual, jacobi_residual, ALGEBRA_TOLERANCE};
use wongspin_core::fields::{covariant_derivative_f, cyclic_residual, field_strength, potential};
use wongspin_core::integrate::{integrate, self_convergence_order, Order};
use wongspin_core::linalg::CMatrix;
use wongspin_core::quantize::{
    charge_commutator_residual, clifford_residual, dirac_operator_with, gamma_matrices,
    occupation_spectrum, oscillator_charges, FockTruncation,
};
use wongspin_core::{GaugeFieldConfig, Model, ParticleState, Phase};

use crate::config::{self, algebra_from_value, InitialState, RunConfig, RunMode, Simulation};
use crate::error::{CliError, Result};
use crate::output::{self, Emit};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default `--drift-tol`.
pub const DEFAULT_DRIFT_TOL: f64 = 1e-8;
/// Thresholds used by `check-field`.
pub const BIANCHI_TOL: f64 = 1e-12;
pub const DERIVATIVE_TOL: f64 = 1e-7;
/// Threshold used by `quantize-check`.
pub const QUANTIZE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct AssertOptions {
    pub assert_invariants: bool,
    pub drift_tol: f64,
}

impl Default for AssertOptions {
    fn default() -> Self {
        AssertOptions {
            assert_invariants: false,
            drift_tol: DEFAULT_DRIFT_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// Diagnostic for standard error when the command did not succeed.
    pub message: Option<String>,
    /// Machine-readable summary printed to standard output.
    pub report: Value,
}

impl CommandOutcome {
    fn from_error(e: &CliError) -> Self {
        CommandOutcome {
            exit_code: e.exit_code(),
            message: Some(e.to_string()),
            report: Value::Null,
        }
    }
}

/// Runs `f`, turning an error into its exit code.
pub fn guard(f: impl FnOnce() -> Result<CommandOutcome>) -> CommandOutcome {
    f().unwrap_or_else(|e| CommandOutcome::from_error(&e))
}

pub fn read_config(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: malformed JSON: {e}", path.display())))
}

/// Dispatches on the config's `mode` (default `simulate`).
pub fn run(raw: &Value, opts: &AssertOptions) -> Result<CommandOutcome> {
    let cfg = config::parse(raw)?;
    match cfg.mode.unwrap_or(RunMode::Simulate) {
        RunMode::Simulate => simulate(raw, opts),
        RunMode::CheckField => check_field(raw),
        RunMode::CheckAlgebra => {
            let alg = cfg
                .algebra
                .as_ref()
                .ok_or_else(|| CliError::config("algebra: missing"))?;
            check_algebra_value(alg)
        }
        RunMode::QuantizeCheck => quantize_check(raw),
        RunMode::Sweep => sweep(raw, opts),
    }
}

pub fn simulate(raw: &Value, opts: &AssertOptions) -> Result<CommandOutcome> {
    let cfg = config::parse(raw)?;
    cfg.expect_mode(RunMode::Simulate)?;
    let dir = cfg.output_dir();
    let (outcome, _) = simulate_into(raw, &cfg, &dir, opts)?;
    Ok(outcome)
}

/// Validates, integrates and writes every artifact into `dir`. Also returns the
/// final flat state when the run reached `s_end`.
fn simulate_into(
    raw: &Value,
    cfg: &RunConfig,
    dir: &Path,
    opts: &AssertOptions,
) -> Result<(CommandOutcome, Option<Vec<f64>>)> {
    let sim = cfg.simulation()?;
    let formats = cfg.formats()?;
    let start = Instant::now();
    let run = match &sim.state {
        InitialState::Body(p) => integrate_and_write(&sim, p, dir, formats.csv, formats.json)?,
        InitialState::Graded(p) => integrate_and_write(&sim, p, dir, formats.csv, true)?,
    };
    let wall = start.elapsed().as_secs_f64();

    let mut error = run.error;
    if error.is_none() && opts.assert_invariants {
        error = assert_drift(&run.drift, &sim.model, opts.drift_tol).err();
    }
    let exit_code = error.as_ref().map_or(0, CliError::exit_code);
    let status = match &error {
        None => "ok",
        Some(CliError::Numerical(_)) => "numerical_failure",
        Some(CliError::Invariant(_)) => "invariant_violation",
        Some(_) => "error",
    };
    let message = error.map(|e| e.to_string());
    let manifest = json!({
        "version": VERSION,
        "command": "simulate",
        "equations": sim.mode.name(),
        "status": status,
        "exit_code": exit_code,
        "message": message,
        "wall_time_s": wall,
        "samples": run.samples,
        "accepted_steps": run.accepted,
        "rejected_steps": run.rejected,
        "assert_invariants": opts.assert_invariants,
        "drift_tol": opts.drift_tol,
        "config": raw,
    });
    output::write_json(&dir.join("manifest.json"), &manifest)?;
    let report = json!({
        "status": status,
        "output_dir": dir.display().to_string(),
        "drift": run.drift,
    });
    Ok((
        CommandOutcome {
            exit_code,
            message,
            report,
        },
        if exit_code == 0 {
            run.final_state
        } else {
            None
        },
    ))
}

struct RunFiles {
    drift: Value,
    samples: usize,
    accepted: usize,
    rejected: usize,
    final_state: Option<Vec<f64>>,
    error: Option<CliError>,
}

fn integrate_and_write<T: Emit>(
    sim: &Simulation,
    phase: &Phase<T>,
    dir: &Path,
    csv: bool,
    json: bool,
) -> Result<RunFiles> {
    let state = ParticleState::new(0.0, phase.clone());
    let (traj, error) = match integrate(&state, &sim.model, &sim.options, sim.mode) {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(CliError::from(f.error))),
    };
    if csv {
        let bytes = output::trajectory_csv(&traj.samples, &sim.model)?;
        output::write_atomic(&dir.join("trajectory.csv"), &bytes)?;
    }
    if json {
        let v = output::trajectory_json(&traj.samples, &sim.model);
        output::write_json(&dir.join("trajectory.json"), &v)?;
    }
    let drift = output::drift_json(&traj.drift);
    output::write_json(&dir.join("drift.json"), &drift)?;
    Ok(RunFiles {
        drift,
        samples: traj.samples.len(),
        accepted: traj.accepted_steps,
        rejected: traj.rejected_steps,
        final_state: traj.last().map(|s| s.phase.to_flat()),
        error,
    })
}

/// Drift of `C1`, `C3` and the casimir is always asserted; `C2` only when the
/// moment is not anomalous, since it is not conserved otherwise.
fn assert_drift(drift: &Value, model: &Model, tol: f64) -> Result<()> {
    let mut bad = Vec::new();
    if let Value::Object(map) = drift {
        for (name, d) in map {
            if name == "C2" && model.params.is_anomalous() {
                continue;
            }
            let initial = d["initial"].as_f64().unwrap_or(0.0).abs();
            let max_abs = d["max_abs"].as_f64().unwrap_or(0.0);
            let scaled = max_abs / initial.max(1.0);
            if scaled > tol || scaled.is_nan() {
                bad.push(format!("{name} drift {scaled:e} > {tol:e}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(bad.join(", ")))
    }
}

fn fd_derivative_residual(cfg: &GaugeFieldConfig, x: &[f64; 4], e: f64, h: f64) -> f64 {
    let f = cfg.algebra();
    let n = f.dim();
    let df = covariant_derivative_f(cfg, x, e).df;
    let f0 = field_strength(cfg, x, e).f;
    let a0 = potential(cfg, x);
    let mut worst: f64 = 0.0;
    for rho in 0..4 {
        let (mut xp, mut xm) = (*x, *x);
        xp[rho] += h;
        xm[rho] -= h;
        let fp = field_strength(cfg, &xp, e).f;
        let fm = field_strength(cfg, &xm, e).f;
        for a in 0..n {
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut d = (fp[a][mu][nu] - fm[a][mu][nu]) / (2.0 * h);
                    for (b, ab) in a0.iter().enumerate() {
                        for (c, fc) in f0.iter().enumerate() {
                            let fbca = f.get(b, c, a);
                            if fbca != 0.0 {
                                d += e * fbca * ab[rho] * fc[mu][nu];
                            }
                        }
                    }
                    worst = worst.max((d - df[a][rho][mu][nu]).abs());
                }
            }
        }
    }
    worst
}

/// Bianchi residual and the analytic-vs-finite-difference covariant derivative
/// gap at random points.
pub fn check_field(raw: &Value) -> Result<CommandOutcome> {
    let cfg = config::parse(raw)?;
    cfg.expect_mode(RunMode::CheckField)?;
    let field = cfg.field_config()?;
    let check = cfg.check_block();
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if check.points == 0 || !positive(check.radius) || !positive(check.fd_step) {
        return Err(CliError::config(
            "check: points, radius and fd_step must be positive",
        ));
    }
    let e = match (check.e, &cfg.params) {
        (Some(e), _) => e,
        (None, Some(p)) => p.e,
        (None, None) => 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    let (mut bianchi, mut deriv): (f64, f64) = (0.0, 0.0);
    for _ in 0..check.points {
        let x: [f64; 4] = core::array::from_fn(|_| rng.gen_range(-check.radius..check.radius));
        bianchi = bianchi.max(cyclic_residual(&covariant_derivative_f(&field, &x, e)));
        deriv = deriv.max(fd_derivative_residual(&field, &x, e, check.fd_step));
    }
    let pass = bianchi < BIANCHI_TOL && deriv < DERIVATIVE_TOL;
    let report = json!({
        "kind": field.kind().name(),
        "algebra_dim": field.algebra().dim(),
        "points": check.points,
        "seed": check.seed,
        "radius": check.radius,
        "bianchi_residual": bianchi,
        "derivative_residual": deriv,
        "fd_step": check.fd_step,
        "pass": pass,
    });
    output::write_json(&cfg.output_dir().join("check_field.json"), &report)?;
    Ok(CommandOutcome {
        exit_code: if pass { 0 } else { 4 },
        message: (!pass).then(|| {
            format!("field check failed: Bianchi {bianchi:e} (tol {BIANCHI_TOL:e}), derivative {deriv:e} (tol {DERIVATIVE_TOL:e})")
        }),
        report,
    })
}

/// `arg` is a builtin name, or a JSON file holding an inline algebra or a run
/// config with an `algebra` entry.
pub fn check_algebra(arg: &str) -> Result<CommandOutcome> {
    if arg
        .parse::<wongspin_core::algebra::BuiltinAlgebra>()
        .is_ok()
    {
        return check_algebra_value(&Value::String(arg.to_string()));
    }
    let path = PathBuf::from(arg);
    if !path.exists() {
        return Err(CliError::config(format!(
            "`{arg}` is neither a builtin algebra (u1, su2, su3) nor a file"
        )));
    }
    let raw = read_config(&path)?;
    match raw.get("algebra") {
        Some(alg) => check_algebra_value(alg),
        None => check_algebra_value(&raw),
    }
}

fn check_algebra_value(v: &Value) -> Result<CommandOutcome> {
    let alg = algebra_from_value(v)?;
    let antisym = alg.constants.antisymmetry_residual();
    let jacobi = jacobi_residual(&alg.constants);
    let (herm, comm) = match &alg.rep {
        Some(rep) => (
            Some(rep.hermiticity_residual()),
            Some(commutator_residual(rep)?),
        ),
        None => (None, None),
    };
    let worst = [Some(antisym), Some(jacobi), herm, comm]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    let pass = worst < ALGEBRA_TOLERANCE;
    let report = json!({
        "algebra": alg.name,
        "dim": alg.constants.dim(),
        "dim_rep": alg.rep.as_ref().map(|r| r.dim_rep()),
        "antisymmetry_residual": antisym,
        "jacobi_residual": jacobi,
        "hermiticity_residual": herm,
        "commutator_residual": comm,
        "pass": pass,
    });
    Ok(CommandOutcome {
        exit_code: if pass { 0 } else { 4 },
        message: (!pass).then(|| {
            format!("algebra check failed: residual {worst:e} exceeds {ALGEBRA_TOLERANCE:e}")
        }),
        report,
    })
}

/// Clifford relations, charge commutators, Casimir spectrum per occupation
/// sector and the Dirac operator at one point.
pub fn quantize_check(raw: &Value) -> Result<CommandOutcome> {
    let cfg = config::parse(raw)?;
    cfg.expect_mode(RunMode::QuantizeCheck)?;
    let alg = cfg.algebra()?;
    let rep = alg
        .rep
        .ok_or_else(|| CliError::config("algebra: quantize-check needs a representation"))?;
    let q = cfg
        .quantize
        .as_ref()
        .ok_or_else(|| CliError::config("quantize: missing"))?;
    let n = alg.constants.dim();
    let potential = q.potential.clone().unwrap_or_else(|| vec![[0.0; 4]; n]);
    if potential.len() != n {
        return Err(CliError::config(format!(
            "quantize.A: expected {n} rows, found {}",
            potential.len()
        )));
    }
    let e = q.e.or(cfg.params.as_ref().map(|p| p.e)).unwrap_or(1.0);
    let trunc = FockTruncation::new(rep.dim_rep(), q.n_max)?;

    let clifford = clifford_residual(&gamma_matrices());
    let ops = oscillator_charges(&rep, &trunc)?;
    let commutator = charge_commutator_residual(&ops.charges, &alg.constants)?;
    let sectors = (0..=q.n_max)
        .map(|k| {
            Ok(json!({ "n": k, "casimir_eigenvalues": occupation_spectrum(&ops, &trunc, k)? }))
        })
        .collect::<Result<Vec<Value>>>()?;
    let dirac = dirac_operator_with(&q.p, &potential, &ops, e)?;
    let free = potential.iter().flatten().all(|a| *a == 0.0);
    let square = free.then(|| {
        let p = q.p;
        let pp = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
        let sq = &dirac.matrix * &dirac.matrix;
        let id = CMatrix::identity(sq.dim()).scale(num_complex::Complex64::new(pp, 0.0));
        (&sq - &id).max_norm()
    });
    let worst = [
        clifford,
        commutator,
        dirac.pseudo_hermiticity_residual,
        square.unwrap_or(0.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let pass = worst < QUANTIZE_TOL;
    let report = json!({
        "algebra": alg.name,
        "n_max": q.n_max,
        "fock_dim": trunc.dim(),
        "clifford_residual": clifford,
        "commutator_residual": commutator,
        "sectors": sectors,
        "pseudo_hermiticity_residual": dirac.pseudo_hermiticity_residual,
        "dirac_square_residual": square,
        "pass": pass,
    });
    output::write_json(&cfg.output_dir().join("quantize.json"), &report)?;
    Ok(CommandOutcome {
        exit_code: if pass { 0 } else { 4 },
        message: (!pass)
            .then(|| format!("quantize check failed: residual {worst:e} exceeds {QUANTIZE_TOL:e}")),
        report,
    })
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let bad = |why: &str| CliError::config(format!("grid: cannot set `{path}`: {why}"));
    let mut cur = doc;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(bad("empty path segment"));
    }
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                map.entry(seg.to_string())
                    .or_insert_with(|| Value::Object(Map::new()))
            }
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| bad("array index expected"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| bad(&format!("index {idx} out of range (length {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(bad("parent is not an object or array")),
        };
    }
    unreachable!("loop returns on the last segment")
}

struct SweepPoint {
    values: Map<String, Value>,
    raw: Value,
    cfg: RunConfig,
    dir: PathBuf,
}

/// Cartesian product over `grid`, one `simulate` run per point, executed in
/// parallel, plus `index.json` in the sweep directory.
pub fn sweep(raw: &Value, opts: &AssertOptions) -> Result<CommandOutcome> {
    let cfg = config::parse(raw)?;
    cfg.expect_mode(RunMode::Sweep)?;
    let grid = cfg
        .grid
        .clone()
        .ok_or_else(|| CliError::config("grid: missing"))?;
    if grid.is_empty() {
        return Err(CliError::config("grid: no parameters to sweep"));
    }
    if let Some((path, _)) = grid.iter().find(|(_, v)| v.is_empty()) {
        return Err(CliError::config(format!("grid.{path}: empty value list")));
    }
    let base_dir = cfg.output_dir();
    let paths: Vec<&String> = grid.keys().collect();

    let mut combos: Vec<Vec<&Value>> = vec![vec![]];
    for path in &paths {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                grid[*path].iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }

    // Validate every point before running any of them.
    let mut points = Vec::with_capacity(combos.len());
    for (i, combo) in combos.iter().enumerate() {
        let mut doc = raw.clone();
        let obj = doc.as_object_mut().expect("parsed config is an object");
        obj.remove("grid");
        obj.insert("mode".into(), json!("simulate"));
        let dir = base_dir.join(format!("point_{i:03}"));
        let mut values = Map::new();
        for (path, v) in paths.iter().zip(combo) {
            set_path(&mut doc, path, (*v).clone())?;
            values.insert(path.to_string(), (*v).clone());
        }
        set_path(&mut doc, "output.dir", json!(dir.display().to_string()))?;
        let point_cfg =
            config::parse(&doc).map_err(|e| CliError::config(format!("grid point {i}: {e}")))?;
        point_cfg
            .simulation()
            .map_err(|e| CliError::config(format!("grid point {i}: {e}")))?;
        points.push(SweepPoint {
            values,
            raw: doc,
            cfg: point_cfg,
            dir,
        });
    }

    let results: Vec<(CommandOutcome, Option<Vec<f64>>)> = points
        .par_iter()
        .map(|p| {
            simulate_into(&p.raw, &p.cfg, &p.dir, opts)
                .unwrap_or_else(|e| (CommandOutcome::from_error(&e), None))
        })
        .collect();

    let entries: Vec<Value> = points
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(i, (p, (out, _)))| {
            json!({
                "index": i,
                "dir": p.dir.display().to_string(),
                "values": p.values,
                "exit_code": out.exit_code,
                "message": out.message,
                "drift": out.report.get("drift").cloned().unwrap_or(Value::Null),
            })
        })
        .collect();
    let convergence = step_convergence(&grid, &results);
    let exit_code = results.iter().map(|(o, _)| o.exit_code).max().unwrap_or(0);
    let index = json!({
        "version": VERSION,
        "parameters": paths,
        "points": entries,
        "convergence": convergence,
        "config": raw,
    });
    output::write_json(&base_dir.join("index.json"), &index)?;
    let failed = results.iter().filter(|(o, _)| o.exit_code != 0).count();
    Ok(CommandOutcome {
        exit_code,
        message: (failed > 0).then(|| format!("{failed} of {} sweep points failed", results.len())),
        report: json!({
            "output_dir": base_dir.display().to_string(),
            "points": results.len(),
            "failed": failed,
            "convergence": convergence,
        }),
    })
}

/// Observed order from successive halvings when the grid varies only the step.
fn step_convergence(
    grid: &std::collections::BTreeMap<String, Vec<Value>>,
    results: &[(CommandOutcome, Option<Vec<f64>>)],
) -> Value {
    if grid.len() != 1 || !grid.contains_key("integrator.h") {
        return Value::Null;
    }
    let mut runs: Vec<(f64, &Vec<f64>)> = grid["integrator.h"]
        .iter()
        .zip(results)
        .filter_map(|(h, (_, fin))| Some((h.as_f64()?, fin.as_ref()?)))
        .collect();
    runs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let halving = |a: f64, b: f64| ((a / b) - 2.0).abs() < 1e-9;
    let orders: Vec<Value> = runs
        .windows(3)
        .filter(|w| halving(w[0].0, w[1].0) && halving(w[1].0, w[2].0))
        .map(|w| {
            let order = match self_convergence_order([w[0].1, w[1].1, w[2].1]) {
                Order::Exact => json!("exact"),
                Order::Measured(p) => json!(p),
            };
            json!({ "h": [w[0].0, w[1].0, w[2].0], "order": order })
        })
        .collect();
    Value::Array(orders)
}
