//! Seeded randomized checks of the Toeplitz/Kronecker algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::spectral::{gen_eigs, numerical_rank, spectral_norm, sym_eigs};
use crate::toeplitz::{kron, toeplitz, two_level_toeplitz, CoefficientTable, SymbolCoeffs};
use crate::Matrix;

/// Worst observed error of each property over all cases.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KroneckerReport {
    pub cases: usize,
    /// `‖ZZᵀ - ZᵀZ‖_F / ‖Z‖²` for `Z = X ⊗ Y` with `X, Y` normal.
    pub normal: f64,
    /// Relative distance between `σ(X ⊗ Y)` and `{λ_i(X) λ_j(Y)}`.
    pub spectrum: f64,
    /// Cases where `rank(X ⊗ Y) ≠ rank X · rank Y`.
    pub rank_mismatches: usize,
    /// `|‖X ⊗ Y‖ - ‖X‖‖Y‖| / (‖X‖‖Y‖)`.
    pub norm: f64,
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Random symmetric or skew-symmetric matrix (both are normal).
fn random_normal(rng: &mut ChaCha8Rng, size: usize, skew: bool) -> Matrix {
    let g = random_matrix(rng, size, size);
    if skew {
        &g - g.transpose()
    } else {
        &g + g.transpose()
    }
}

fn random_low_rank(rng: &mut ChaCha8Rng, size: usize, rank: usize) -> Matrix {
    let u = random_matrix(rng, size, rank);
    let v = random_matrix(rng, size, rank);
    u * v.transpose()
}

/// Greedy matching of two complex multisets; returns the largest distance
/// between paired values.
fn multiset_distance(a: &[nalgebra::Complex<f64>], b: &[nalgebra::Complex<f64>]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .expect("multisets of equal size");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Normality, spectrum, rank and spectral norm of `X ⊗ Y` on `cases` random
/// pairs of sizes 2 to 6.
pub fn kronecker_properties(seed: u64, cases: usize) -> Result<KroneckerReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = KroneckerReport {
        cases,
        ..Default::default()
    };
    for case in 0..cases {
        let (sx, sy) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let skew = case % 2 == 1;
        let x = random_normal(&mut rng, sx, skew);
        let y = random_normal(&mut rng, sy, skew && case % 4 == 1);
        let z = kron(&x, &y);

        let zn = z.norm();
        let comm = &z * z.transpose() - z.transpose() * &z;
        report.normal = report.normal.max(comm.norm() / (zn * zn));

        let ex = gen_eigs(&x)?.values;
        let ey = gen_eigs(&y)?.values;
        let products: Vec<_> = ex
            .iter()
            .flat_map(|a| ey.iter().map(move |b| a * b))
            .collect();
        let ez = if skew && case % 4 == 1 {
            // skew ⊗ skew is symmetric
            sym_eigs(&z)?
                .values
                .iter()
                .map(|&v| nalgebra::Complex::new(v, 0.0))
                .collect()
        } else {
            gen_eigs(&z)?.values
        };
        let scale = spectral_norm(&z).max(f64::MIN_POSITIVE);
        report.spectrum = report
            .spectrum
            .max(multiset_distance(&products, &ez) / scale);

        let (nx, ny) = (spectral_norm(&x), spectral_norm(&y));
        report.norm = report
            .norm
            .max((spectral_norm(&z) - nx * ny).abs() / (nx * ny));

        let (rx, ry) = (rng.random_range(1..=sx), rng.random_range(1..=sy));
        let lx = random_low_rank(&mut rng, sx, rx);
        let ly = random_low_rank(&mut rng, sy, ry);
        let rank_x = numerical_rank(&lx, 1e-10);
        let rank_y = numerical_rank(&ly, 1e-10);
        if numerical_rank(&kron(&lx, &ly), 1e-10) != rank_x * rank_y {
            report.rank_mismatches += 1;
        }
    }
    Ok(report)
}

/// Largest entrywise difference between `T_{m1}(f) ⊗ T_{m2}(h)` and
/// `T_{m1,m2}(f ⊗ h)` over `m1, m2 ∈ 1..=max_m`, for the hat symbols and
/// `cases` random banded symbols with small integer coefficients.
pub fn commutation_error(seed: u64, cases: usize, max_m: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC0FFEE);
    let mut pairs = vec![(
        SymbolCoeffs::generic(vec![2.0, -1.0]),
        SymbolCoeffs::generic(vec![4.0 / 6.0, 1.0 / 6.0]),
    )];
    for _ in 0..cases {
        let (df, dh) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let mut coeffs = |len: usize| -> SymbolCoeffs {
            SymbolCoeffs::generic(
                (0..len)
                    .map(|_| rng.random_range(-4i32..=4) as f64)
                    .collect(),
            )
        };
        let f = coeffs(df);
        pairs.push((f, coeffs(dh)));
    }
    let mut worst: f64 = 0.0;
    for (f, h) in &pairs {
        let table = CoefficientTable::tensor(f, h);
        for m1 in 1..=max_m {
            for m2 in 1..=max_m {
                let lhs = kron(&toeplitz(m1, f), &toeplitz(m2, h));
                let rhs = two_level_toeplitz(m1, m2, &table);
                worst = worst.max((lhs - rhs).amax());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn properties_hold_on_a_few_cases() {
        let r = kronecker_properties(1, 12).unwrap();
        assert!(r.normal < 1e-12, "{r:?}");
        assert!(r.spectrum < 1e-9, "{r:?}");
        assert!(r.norm < 1e-12, "{r:?}");
        assert_eq!(r.rank_mismatches, 0);
    }

    #[test]
    fn commutation_is_exact() {
        assert_eq!(commutation_error(3, 5, 4), 0.0);
    }

    #[test]
    fn seeds_are_reproducible() {
        assert_eq!(
            kronecker_properties(7, 5).unwrap(),
            kronecker_properties(7, 5).unwrap()
        );
    }
}
