use num_complex::Complex64;
use wongspin_core::algebra::{builtin_algebra, BuiltinAlgebra};
use wongspin_core::linalg::CMatrix;
use wongspin_core::quantize::{
    casimir_operator, charge_commutator_residual, clifford_residual, dirac_operator,
    gamma_matrices, occupation_spectrum, oscillator_charges, single_particle_block, FockTruncation,
};

fn dim_sym(d: usize, n: usize) -> usize {
    // binomial(n + d - 1, n)
    (1..=n).fold(1, |acc, k| acc * (d - 1 + k) / k)
}

#[test]
fn clifford_relation_is_exact() {
    assert_eq!(clifford_residual(&gamma_matrices()), 0.0);
}

#[test]
fn fock_dimension_counts_occupations() {
    for (d, n_max) in [(2, 3), (3, 2), (1, 5)] {
        let t = FockTruncation::new(d, n_max).unwrap();
        let total: usize = (0..=n_max).map(|n| dim_sym(d, n)).sum();
        assert_eq!(t.dim(), total);
        for n in 0..=n_max {
            assert_eq!(t.sector(n).len(), dim_sym(d, n));
        }
    }
}

#[test]
fn charges_close_the_algebra() {
    for (which, n_max) in [
        (BuiltinAlgebra::Su2, 3),
        (BuiltinAlgebra::Su3, 2),
        (BuiltinAlgebra::U1, 4),
    ] {
        let (f, rep) = builtin_algebra(which);
        let t = FockTruncation::new(rep.dim_rep(), n_max).unwrap();
        let ops = oscillator_charges(&rep, &t).unwrap();
        assert!(charge_commutator_residual(&ops.charges, &f).unwrap() < 1e-12);
    }
}

#[test]
fn single_particle_sector_reproduces_generators() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su3);
    let t = FockTruncation::new(3, 2).unwrap();
    let ops = oscillator_charges(&rep, &t).unwrap();
    for (q, j) in ops.charges.iter().zip(rep.matrices()) {
        let block = single_particle_block(q, &t);
        assert!((&block - j).max_norm() < 1e-15);
    }
}

#[test]
fn su2_casimir_spectrum_by_occupation() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su2);
    let t = FockTruncation::new(2, 4).unwrap();
    let ops = oscillator_charges(&rep, &t).unwrap();
    for n in 0..=4 {
        let j = n as f64 / 2.0;
        let spectrum = occupation_spectrum(&ops, &t, n).unwrap();
        assert_eq!(spectrum.len(), n + 1);
        for ev in spectrum {
            assert!((ev - j * (j + 1.0)).abs() < 1e-10);
        }
    }
    assert!(occupation_spectrum(&ops, &t, 5).is_err());
}

#[test]
fn su3_casimir_on_symmetric_sectors() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su3);
    let t = FockTruncation::new(3, 2).unwrap();
    let ops = oscillator_charges(&rep, &t).unwrap();
    for n in 0..=2 {
        let nf = n as f64;
        let want = (nf * nf + 3.0 * nf) / 3.0;
        for ev in occupation_spectrum(&ops, &t, n).unwrap() {
            assert!((ev - want).abs() < 1e-10, "{n}: {ev}");
        }
    }
}

#[test]
fn casimir_commutes_with_charges_and_number() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su2);
    let t = FockTruncation::new(2, 3).unwrap();
    let ops = oscillator_charges(&rep, &t).unwrap();
    let c = casimir_operator(&ops);
    for q in ops.charges.iter().chain([&ops.number]) {
        assert!(c.commutator(q).max_norm() < 1e-12);
    }
}

#[test]
fn free_dirac_operator_squares_to_mass_shell() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su2);
    let t = FockTruncation::new(2, 2).unwrap();
    let p = [1.7, 0.3, -0.8, 0.25];
    let pp = p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3];
    let d = dirac_operator(&p, &[[0.0; 4]; 3], &rep, &t, 1.0).unwrap();
    let sq = &d.matrix * &d.matrix;
    let want = CMatrix::identity(sq.dim()).scale(Complex64::new(pp, 0.0));
    assert!((&sq - &want).max_norm() < 1e-12);
    assert!(d.pseudo_hermiticity_residual < 1e-14);
}

#[test]
fn abelian_potential_shifts_momentum_by_occupation() {
    // For u1 the charge operator is the number operator, so on the sector with
    // n quanta the square is (p + e A n)^2.
    let (_, rep) = builtin_algebra(BuiltinAlgebra::U1);
    let t = FockTruncation::new(1, 3).unwrap();
    let p = [2.0, 0.5, 0.1, -0.3];
    let a = [0.4, -0.2, 0.3, 0.1];
    let e = 0.7;
    let d = dirac_operator(&p, &[a], &rep, &t, e).unwrap();
    let sq = &d.matrix * &d.matrix;
    for n in 0..=3 {
        let k: Vec<f64> = (0..4).map(|mu| p[mu] + e * a[mu] * n as f64).collect();
        let kk = k[0] * k[0] - k[1] * k[1] - k[2] * k[2] - k[3] * k[3];
        for spinor in 0..4 {
            let i = spinor * t.dim() + n;
            assert!((sq[(i, i)].re - kk).abs() < 1e-12);
        }
    }
}

#[test]
fn mismatched_truncation_is_rejected() {
    let (_, rep) = builtin_algebra(BuiltinAlgebra::Su2);
    let t = FockTruncation::new(3, 2).unwrap();
    assert!(oscillator_charges(&rep, &t).is_err());
}
