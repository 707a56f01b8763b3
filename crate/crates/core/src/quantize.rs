//! Matrix-level checks of the quantized theory.
//!
//! Odd spin variables become Dirac-basis gamma matrices, the internal
//! coordinates become bosonic modes `a_i`, and the charges become the
//! number-conserving bilinears `Q_a = a^dagger_i (J_a)_ij a_j`. The Fock space
//! is truncated by total occupation; since every operator built here conserves
//! the occupation, the truncation is block-exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{Representation, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix, I};
use crate::metric::ETA;

/// Dirac-basis `gamma^0..gamma^3` with `{gamma^mu, gamma^nu} = 2 eta^mu,nu`.
pub fn gamma_matrices() -> [CMatrix; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = I;
    let rows =
        |r: [[Complex64; 4]; 4]| CMatrix::from_rows(&r.map(|row| row.to_vec())).expect("4x4");
    [
        rows([[o, z, z, z], [z, o, z, z], [z, z, -o, z], [z, z, z, -o]]),
        // [[0, sigma_k], [-sigma_k, 0]]
        rows([[z, z, z, o], [z, z, o, z], [z, -o, z, z], [-o, z, z, z]]),
        rows([[z, z, z, -i], [z, z, i, z], [z, i, z, z], [-i, z, z, z]]),
        rows([[z, z, o, z], [z, z, z, -o], [-o, z, z, z], [z, o, z, z]]),
    ]
}

/// Max entrywise deviation from `{gamma^mu, gamma^nu} = 2 eta^mu,nu I`.
pub fn clifford_residual(gammas: &[CMatrix; 4]) -> f64 {
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = &(&gammas[mu] * &gammas[nu]) + &(&gammas[nu] * &gammas[mu]);
            let want = if mu == nu {
                CMatrix::identity(4).scale(Complex64::new(2.0 * ETA[mu], 0.0))
            } else {
                CMatrix::zeros(4)
            };
            worst = worst.max((&anti - &want).max_norm());
        }
    }
    worst
}

/// Occupation-number basis with total occupation at most `n_max`, ordered by
/// total occupation and then lexicographically (descending in the first mode).
#[derive(Debug, Clone, PartialEq)]
pub struct FockTruncation {
    d_modes: usize,
    n_max: usize,
    basis: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

fn compositions(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() + 1 == d {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=total).rev() {
        prefix.push(k);
        compositions(d, total - k, prefix, out);
        prefix.pop();
    }
}

impl FockTruncation {
    pub fn new(d_modes: usize, n_max: usize) -> Result<Self> {
        if d_modes == 0 {
            return Err(Error::config("Fock space needs at least one mode"));
        }
        let mut basis = Vec::new();
        for total in 0..=n_max {
            compositions(d_modes, total, &mut Vec::new(), &mut basis);
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Ok(FockTruncation {
            d_modes,
            n_max,
            basis,
            index,
        })
    }

    pub fn d_modes(&self) -> usize {
        self.d_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    /// Basis indices with total occupation `n`.
    pub fn sector(&self, n: usize) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, occ)| occ.iter().sum::<usize>() == n)
            .map(|(i, _)| i)
            .collect()
    }

    /// Matrix of `a^dagger_i a_j`.
    pub fn hop(&self, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim());
        for (col, occ) in self.basis.iter().enumerate() {
            if occ[j] == 0 {
                continue;
            }
            let mut target = occ.clone();
            let mut amp = libm::sqrt(occ[j] as f64);
            target[j] -= 1;
            amp *= libm::sqrt((target[i] + 1) as f64);
            target[i] += 1;
            let row = self.index[&target];
            m[(row, col)] += Complex64::new(amp, 0.0);
        }
        m
    }
}

/// Charge operators and the occupation-number operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeOperators {
    pub charges: Vec<CMatrix>,
    pub number: CMatrix,
}

pub fn oscillator_charges(rep: &Representation, trunc: &FockTruncation) -> Result<ChargeOperators> {
    if trunc.d_modes() != rep.dim_rep() {
        return Err(Error::DimensionMismatch {
            what: "Fock modes vs representation dimension",
            expected: rep.dim_rep(),
            found: trunc.d_modes(),
        });
    }
    let d = rep.dim_rep();
    let hops: Vec<Vec<CMatrix>> = (0..d)
        .map(|i| (0..d).map(|j| trunc.hop(i, j)).collect())
        .collect();
    let charges = rep
        .matrices()
        .iter()
        .map(|j| {
            let mut q = CMatrix::zeros(trunc.dim());
            for (a, row) in hops.iter().enumerate() {
                for (b, hop) in row.iter().enumerate() {
                    let c = j[(a, b)];
                    if c != Complex64::new(0.0, 0.0) {
                        q = &q + &hop.scale(c);
                    }
                }
            }
            q
        })
        .collect();
    let mut number = CMatrix::zeros(trunc.dim());
    for (i, row) in hops.iter().enumerate() {
        number = &number + &row[i];
    }
    Ok(ChargeOperators { charges, number })
}

/// Max-norm of `[Q_a, Q_b] - i f_ab^c Q_c` over all pairs.
pub fn charge_commutator_residual(charges: &[CMatrix], f: &StructureConstants) -> Result<f64> {
    let n = f.dim();
    if charges.len() != n {
        return Err(Error::DimensionMismatch {
            what: "number of charge operators",
            expected: n,
            found: charges.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut r = charges[a].commutator(&charges[b]);
            for (c, qc) in charges.iter().enumerate() {
                let fabc = f.get(a, b, c);
                if fabc != 0.0 {
                    r = &r - &qc.scale(I * fabc);
                }
            }
            worst = worst.max(r.max_norm());
        }
    }
    Ok(worst)
}

/// `sum_a Q_a Q_a`.
pub fn casimir_operator(ops: &ChargeOperators) -> CMatrix {
    let dim = ops.number.dim();
    ops.charges
        .iter()
        .fold(CMatrix::zeros(dim), |acc, q| &acc + &(q * q))
}

/// Eigenvalues of the quadratic Casimir on the occupation-`n` sector, ascending.
pub fn occupation_spectrum(
    ops: &ChargeOperators,
    trunc: &FockTruncation,
    n: usize,
) -> Result<Vec<f64>> {
    if n > trunc.n_max() {
        return Err(Error::config(format!(
            "occupation {n} exceeds the truncation n_max = {}",
            trunc.n_max()
        )));
    }
    let sector = trunc.sector(n);
    Ok(hermitian_eigenvalues(
        &casimir_operator(ops).restrict(&sector),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracOperator {
    /// `gamma^mu (x) (p_mu + e A_mu^a Q_a)` on spinor (x) Fock space.
    pub matrix: CMatrix,
    /// Max-norm of `gamma^0 C gamma^0 - C^dagger`.
    pub pseudo_hermiticity_residual: f64,
}

/// Assembles the Dirac operator at a point with covariant momentum `p_mu` and
/// potential `a_point[a][mu]`.
pub fn dirac_operator(
    p: &[f64; 4],
    a_point: &[[f64; 4]],
    rep: &Representation,
    trunc: &FockTruncation,
    e: f64,
) -> Result<DiracOperator> {
    let ops = oscillator_charges(rep, trunc)?;
    dirac_operator_with(p, a_point, &ops, e)
}

/// As [`dirac_operator`], reusing already built charge operators.
pub fn dirac_operator_with(
    p: &[f64; 4],
    a_point: &[[f64; 4]],
    ops: &ChargeOperators,
    e: f64,
) -> Result<DiracOperator> {
    if a_point.len() != ops.charges.len() {
        return Err(Error::DimensionMismatch {
            what: "potential generators",
            expected: ops.charges.len(),
            found: a_point.len(),
        });
    }
    let gammas = gamma_matrices();
    let fock = ops.number.dim();
    let mut c1 = CMatrix::zeros(4 * fock);
    for mu in 0..4 {
        let mut kinetic = CMatrix::identity(fock).scale(Complex64::new(p[mu], 0.0));
        for (a, q) in ops.charges.iter().enumerate() {
            let w = e * a_point[a][mu];
            if w != 0.0 {
                kinetic = &kinetic + &q.scale(Complex64::new(w, 0.0));
            }
        }
        c1 = &c1 + &gammas[mu].kron(&kinetic);
    }
    let g0 = gammas[0].kron(&CMatrix::identity(fock));
    let residual = (&(&(&g0 * &c1) * &g0) - &c1.adjoint()).max_norm();
    Ok(DiracOperator {
        matrix: c1,
        pseudo_hermiticity_residual: residual,
    })
}

/// `Q` restricted to the single-particle sector, for comparison with `J`.
pub fn single_particle_block(q: &CMatrix, trunc: &FockTruncation) -> CMatrix {
    q.restrict(&trunc.sector(1))
}
