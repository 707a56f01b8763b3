//! Lie-algebra data: structure constants, hermitian representation matrices
//! and the residual checks that validate them.
//!
//! Conventions: generators are hermitian with `[J_a, J_b] = i f_ab^c J_c`, and
//! Lie indices use the Kronecker metric so `f_ab^c` and `f_abc` coincide.
//! Generator indices are 0-based throughout.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, I};

/// Residual bound used when validating algebras and representations.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    f: Vec<f64>,
}

impl StructureConstants {
    /// Wraps a flat `dim^3` array indexed `f[(a * dim + b) * dim + c]`.
    pub fn new(dim: usize, f: Vec<f64>) -> Result<Self> {
        if f.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                what: "structure constants",
                expected: dim * dim * dim,
                found: f.len(),
            });
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("structure constants must be finite"));
        }
        Ok(StructureConstants { dim, f })
    }

    pub fn zeros(dim: usize) -> Self {
        StructureConstants {
            dim,
            f: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds a totally antisymmetric set from its independent `a < b < c` entries.
    pub fn from_antisymmetric(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Self {
        let mut sc = Self::zeros(dim);
        for &(a, b, c, v) in entries {
            for (i, j, k, s) in [
                (a, b, c, 1.0),
                (b, c, a, 1.0),
                (c, a, b, 1.0),
                (b, a, c, -1.0),
                (a, c, b, -1.0),
                (c, b, a, -1.0),
            ] {
                sc.set(i, j, k, s * v);
            }
        }
        sc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[(a * self.dim + b) * self.dim + c]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.f[(a * self.dim + b) * self.dim + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.f
    }

    /// Nonzero entries `(a, b, c, f_abc)`, for sparse contractions.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.get(a, b, c);
                    if v != 0.0 {
                        out.push((a, b, c, v));
                    }
                }
            }
        }
        out
    }

    /// Max deviation from `f_abc = -f_bac`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut r: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    r = r.max(libm::fabs(self.get(a, b, c) + self.get(b, a, c)));
                }
            }
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        let anti = self.antisymmetry_residual();
        if anti > ALGEBRA_TOLERANCE {
            return Err(Error::config(format!(
                "structure constants are not antisymmetric (residual {anti:e})"
            )));
        }
        let jac = jacobi_residual(self);
        if jac > ALGEBRA_TOLERANCE {
            return Err(Error::config(format!(
                "structure constants violate the Jacobi identity (residual {jac:e})"
            )));
        }
        Ok(())
    }
}

/// Max-norm of the cyclic Jacobi sum over all index quadruples.
pub fn jacobi_residual(f: &StructureConstants) -> f64 {
    let n = f.dim();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let s: f64 = (0..n)
                        .map(|e| {
                            f.get(a, b, e) * f.get(e, c, d)
                                + f.get(b, c, e) * f.get(e, a, d)
                                + f.get(c, a, e) * f.get(e, b, d)
                        })
                        .sum();
                    worst = worst.max(libm::fabs(s));
                }
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    dim_rep: usize,
    matrices: Vec<CMatrix>,
    algebra: StructureConstants,
}

impl Representation {
    /// Pairs matrices with their algebra. Shapes are checked here; use
    /// [`Representation::validate`] for hermiticity and closure.
    pub fn new(algebra: StructureConstants, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                what: "number of representation matrices",
                expected: algebra.dim(),
                found: matrices.len(),
            });
        }
        let dim_rep = matrices.first().map_or(0, CMatrix::dim);
        for m in &matrices {
            if m.dim() != dim_rep {
                return Err(Error::DimensionMismatch {
                    what: "representation matrix",
                    expected: dim_rep,
                    found: m.dim(),
                });
            }
        }
        Ok(Representation {
            dim_rep,
            matrices,
            algebra,
        })
    }

    pub fn dim_rep(&self) -> usize {
        self.dim_rep
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn algebra(&self) -> &StructureConstants {
        &self.algebra
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| (m - &m.adjoint()).max_norm())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        self.algebra.validate()?;
        let h = self.hermiticity_residual();
        if h > ALGEBRA_TOLERANCE {
            return Err(Error::config(format!(
                "representation matrices are not hermitian (residual {h:e})"
            )));
        }
        let c = commutator_residual(self)?;
        if c > ALGEBRA_TOLERANCE {
            return Err(Error::config(format!(
                "representation does not close on the structure constants (residual {c:e})"
            )));
        }
        Ok(())
    }
}

/// Max over `(a, b)` of the entrywise max-norm of `[J_a, J_b] - i f_ab^c J_c`.
pub fn commutator_residual(rep: &Representation) -> Result<f64> {
    let n = rep.algebra.dim();
    if rep.matrices.len() != n {
        return Err(Error::DimensionMismatch {
            what: "number of representation matrices",
            expected: n,
            found: rep.matrices.len(),
        });
    }
    let d = rep.dim_rep;
    if let Some(bad) = rep.matrices.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch {
            what: "representation matrix",
            expected: d,
            found: bad.dim(),
        });
    }
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut r = rep.matrices[a].commutator(&rep.matrices[b]);
            for c in 0..n {
                let fabc = rep.algebra.get(a, b, c);
                if fabc != 0.0 {
                    r = &r - &rep.matrices[c].scale(I * fabc);
                }
            }
            worst = worst.max(r.max_norm());
        }
    }
    Ok(worst)
}

/// Charge orientation `Q_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeVector(pub Vec<f64>);

impl ChargeVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Quadratic Casimir `sum_a Q_a^2`.
pub fn casimir_quadratic(q: &ChargeVector) -> f64 {
    q.0.iter().map(|x| x * x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinAlgebra {
    U1,
    Su2,
    Su3,
}

impl BuiltinAlgebra {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinAlgebra::U1 => "u1",
            BuiltinAlgebra::Su2 => "su2",
            BuiltinAlgebra::Su3 => "su3",
        }
    }
}

impl FromStr for BuiltinAlgebra {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u1" => Ok(BuiltinAlgebra::U1),
            "su2" => Ok(BuiltinAlgebra::Su2),
            "su3" => Ok(BuiltinAlgebra::Su3),
            other => Err(Error::Config(String::from("unknown algebra ") + other)),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn half_matrix(rows: [[Complex64; 3]; 3]) -> CMatrix {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|z| z * 0.5).collect())
        .collect();
    CMatrix::from_rows(&rows).expect("square")
}

/// Structure constants and defining representation of a builtin algebra.
pub fn builtin_algebra(which: BuiltinAlgebra) -> (StructureConstants, Representation) {
    let (f, matrices) = match which {
        BuiltinAlgebra::U1 => (StructureConstants::zeros(1), vec![CMatrix::identity(1)]),
        BuiltinAlgebra::Su2 => {
            let f = StructureConstants::from_antisymmetric(3, &[(0, 1, 2, 1.0)]);
            let z = c(0.0, 0.0);
            let h = 0.5;
            let j1 = CMatrix::from_rows(&[vec![z, c(h, 0.0)], vec![c(h, 0.0), z]]).unwrap();
            let j2 = CMatrix::from_rows(&[vec![z, c(0.0, -h)], vec![c(0.0, h), z]]).unwrap();
            let j3 = CMatrix::from_rows(&[vec![c(h, 0.0), z], vec![z, c(-h, 0.0)]]).unwrap();
            (f, vec![j1, j2, j3])
        }
        BuiltinAlgebra::Su3 => {
            let r3 = libm::sqrt(3.0) / 2.0;
            let f = StructureConstants::from_antisymmetric(
                8,
                &[
                    (0, 1, 2, 1.0),
                    (0, 3, 6, 0.5),
                    (0, 4, 5, -0.5),
                    (1, 3, 5, 0.5),
                    (1, 4, 6, 0.5),
                    (2, 3, 4, 0.5),
                    (2, 5, 6, -0.5),
                    (3, 4, 7, r3),
                    (5, 6, 7, r3),
                ],
            );
            let z = c(0.0, 0.0);
            let o = c(1.0, 0.0);
            let p = c(0.0, 1.0);
            let m = c(0.0, -1.0);
            let s8 = 1.0 / libm::sqrt(3.0);
            let gell_mann = [
                [[z, o, z], [o, z, z], [z, z, z]],
                [[z, m, z], [p, z, z], [z, z, z]],
                [[o, z, z], [z, -o, z], [z, z, z]],
                [[z, z, o], [z, z, z], [o, z, z]],
                [[z, z, m], [z, z, z], [p, z, z]],
                [[z, z, z], [z, z, o], [z, o, z]],
                [[z, z, z], [z, z, m], [z, p, z]],
                [
                    [c(s8, 0.0), z, z],
                    [z, c(s8, 0.0), z],
                    [z, z, c(-2.0 * s8, 0.0)],
                ],
            ];
            (f, gell_mann.into_iter().map(half_matrix).collect())
        }
    };
    let rep = Representation::new(f.clone(), matrices).expect("builtin shapes");
    (f, rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u1_is_abelian() {
        let (f, rep) = builtin_algebra(BuiltinAlgebra::U1);
        assert_eq!(f.dim(), 1);
        assert_eq!(f.get(0, 0, 0), 0.0);
        assert_eq!(rep.matrices()[0], CMatrix::identity(1));
        assert_eq!(jacobi_residual(&f), 0.0);
    }

    #[test]
    fn su2_levi_civita() {
        let (f, _) = builtin_algebra(BuiltinAlgebra::Su2);
        assert_eq!(f.get(0, 1, 2), 1.0);
        assert_eq!(f.get(1, 0, 2), -1.0);
        assert!(jacobi_residual(&f) < 1e-15);
    }

    #[test]
    fn su3_selected_constants() {
        let (f, _) = builtin_algebra(BuiltinAlgebra::Su3);
        assert_eq!(f.get(0, 1, 2), 1.0);
        assert!((f.get(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zeroed_structure_constants_leave_commutator() {
        let (_, rep) = builtin_algebra(BuiltinAlgebra::Su2);
        let broken =
            Representation::new(StructureConstants::zeros(3), rep.matrices().to_vec()).unwrap();
        let r = commutator_residual(&broken).unwrap();
        assert!((r - 0.5).abs() < 1e-15, "{r}");
        assert!(broken.validate().is_err());
    }

    #[test]
    fn inconsistent_jacobi_is_detected() {
        // [e0, e1] = e1, [e1, e2] = e0, [e0, e2] = 0:
        // [[e0, e1], e2] + [[e1, e2], e0] + [[e2, e0], e1] = e0
        let mut f = StructureConstants::zeros(3);
        f.set(0, 1, 1, 1.0);
        f.set(1, 0, 1, -1.0);
        f.set(1, 2, 0, 1.0);
        f.set(2, 1, 0, -1.0);
        assert_eq!(f.antisymmetry_residual(), 0.0);
        assert_eq!(jacobi_residual(&f), 1.0);
        assert!(f.validate().is_err());
    }

    #[test]
    fn mismatched_matrix_sizes() {
        let f = StructureConstants::zeros(2);
        let res = Representation::new(f, vec![CMatrix::identity(2), CMatrix::identity(3)]);
        assert!(matches!(res, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unknown_algebra_name() {
        assert!("so10".parse::<BuiltinAlgebra>().is_err());
        assert_eq!(
            "su3".parse::<BuiltinAlgebra>().unwrap(),
            BuiltinAlgebra::Su3
        );
    }

    #[test]
    fn casimir_examples() {
        assert_eq!(casimir_quadratic(&ChargeVector(vec![0.0; 3])), 0.0);
        assert_eq!(casimir_quadratic(&ChargeVector(vec![0.0, 0.0, 0.5])), 0.25);
    }
}
