use gbspectra::spectral::{
    condition_2, gen_eigs, pencil_min_eig, singular_values, skew_part, sym_eigs, symmetric_part,
};
use gbspectra::{assemble_1d, assemble_a_1d, GBSplineBasis, Matrix, SectionSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_square(rng: &mut ChaCha8Rng) -> Matrix {
    let m = rng.random_range(2..=8);
    Matrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0))
}

#[test]
fn real_parts_lie_between_extreme_eigenvalues_of_symmetric_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x = random_square(&mut rng);
        let re = sym_eigs(&symmetric_part(&x)).unwrap();
        let skew = skew_part(&x);
        let s_skew = singular_values(&skew)[0];
        for z in gen_eigs(&x).unwrap().values {
            assert!(
                z.re >= re.min() - 1e-10 && z.re <= re.max() + 1e-10,
                "{z} vs [{}, {}]",
                re.min(),
                re.max()
            );
            assert!(z.im.abs() <= s_skew + 1e-10, "{z} vs {s_skew}");
        }
    }
}

#[test]
fn symmetric_and_general_solvers_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let s = symmetric_part(&random_square(&mut rng));
        let a = sym_eigs(&s).unwrap().values;
        let mut b: Vec<f64> = gen_eigs(&s).unwrap().values.iter().map(|z| z.re).collect();
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
        let trace: f64 = s.diagonal().iter().sum();
        assert!((trace - a.iter().sum::<f64>()).abs() < 1e-10);
    }
}

#[test]
fn eigenpair_residuals_are_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let s = symmetric_part(&random_square(&mut rng));
        let eig = s.clone().symmetric_eigen();
        let scale = s.norm();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(k);
            assert!((&s * v - v * l).norm() <= 1e-9 * scale);
        }
        assert!(sym_eigs(&s)
            .unwrap()
            .values
            .windows(2)
            .all(|w| w[0] <= w[1]));
    }
}

#[test]
fn condition_number_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let x = random_square(&mut rng);
        let Ok(c) = condition_2(&x) else { continue };
        let c2 = condition_2(&(&x * 37.5)).unwrap();
        assert!((c - c2).abs() <= 1e-8 * c, "{c} {c2}");
        assert!(c >= 1.0);
    }
    assert!(condition_2(&Matrix::zeros(3, 3)).is_err());
}

#[test]
fn galerkin_spectrum_fits_its_rectangle() {
    let set =
        assemble_1d(GBSplineBasis::uniform(16, 2, SectionSpace::polynomial()).unwrap()).unwrap();
    let a = assemble_a_1d(&set, 1.0, 0.0).unwrap();
    let re = sym_eigs(&symmetric_part(&a)).unwrap();
    let im_bound = singular_values(&skew_part(&a))[0];
    let spec = gen_eigs(&a).unwrap();
    assert_eq!(spec.values.len(), a.nrows());
    for z in &spec.values {
        assert!(z.re > 0.0);
        assert!(z.re >= re.min() - 1e-10 && z.re <= re.max() + 1e-10);
        assert!(z.im.abs() <= im_bound + 1e-10);
    }
    // stiffness in local coordinates: pencil bound π²/n²
    let pencil = pencil_min_eig(&set.stiffness, &set.mass).unwrap();
    assert!(pencil >= std::f64::consts::PI.powi(2) / 256.0);
}
