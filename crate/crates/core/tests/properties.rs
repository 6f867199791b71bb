//! Randomized properties over seeds and dimensions.

use coninv::certify::{generate, random_c_reversible, random_vector, verify_certificate, InstanceKind, InstanceSpec};
use coninv::factorization::{adjoint_witness, con_sqrt, four_factor, two_factor, two_factor_unipotent};
use coninv::linalg::{affine_compose, consimilarity_transform, homogeneous_embed, is_coninvolution, Affine, Matrix};
use coninv::reversibility::is_c_reversible_affine;
use coninv::{Tolerance, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn map(kind: InstanceKind, n: usize, seed: u64) -> Affine<f64> {
    generate(&InstanceSpec::new(kind, n, seed)).unwrap()
}

fn scale(fs: &[&Affine<f64>]) -> f64 {
    fs.iter().map(|f| f.norm()).product::<f64>().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws(n in 1usize..=8, seed in any::<u64>()) {
        let f = map(InstanceKind::General, n, seed);
        let g = map(InstanceKind::General, n, seed.wrapping_add(1));
        let h = map(InstanceKind::General, n, seed.wrapping_add(2));
        let left = affine_compose(&affine_compose(&f, &g).unwrap(), &h).unwrap();
        let right = affine_compose(&f, &affine_compose(&g, &h).unwrap()).unwrap();
        prop_assert!(left.dist(&right) <= 1e-12 * scale(&[&f, &g, &h]));
        let e = affine_compose(&f, &f.inverse(&tol()).unwrap()).unwrap();
        prop_assert!(e.dist(&Affine::identity(n)) <= 1e-9);
        let fg = affine_compose(&f, &g).unwrap();
        let embedded = &homogeneous_embed(&f) * &homogeneous_embed(&g);
        prop_assert!(homogeneous_embed(&fg).dist(&embedded) <= 1e-12 * scale(&[&f, &g]));
    }

    #[test]
    fn consimilarity_preserves_coninvolutions(n in 1usize..=6, seed in any::<u64>()) {
        let c = map(InstanceKind::Coninvolution, n, seed);
        let k = map(InstanceKind::General, n, seed ^ 1);
        let moved = consimilarity_transform(&k, &c, &tol()).unwrap();
        prop_assert!(is_coninvolution(&moved, &tol()).holds);
    }

    #[test]
    fn two_factor_certificates_verify(n in 1usize..=6, seed in any::<u64>()) {
        let a = random_c_reversible::<f64>(&InstanceSpec::new(InstanceKind::CReversible, n, seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Affine::new(a, random_vector(n, &mut rng)).unwrap();
        prop_assert!(is_c_reversible_affine(&g, &tol()).unwrap());
        let cert = two_factor(&g, &mut rng, &tol()).unwrap();
        prop_assert!(verify_certificate(&cert, &tol()).passed());
    }

    #[test]
    fn unipotent_certificates_verify(n in 1usize..=8, seed in any::<u64>()) {
        let g = map(InstanceKind::UnipotentAffine, n, seed);
        let cert = two_factor_unipotent(&g.linear, &g.translation, &tol()).unwrap();
        prop_assert!(verify_certificate(&cert, &tol()).passed());
    }

    #[test]
    fn four_factor_certificates_verify(n in 1usize..=5, seed in any::<u64>()) {
        let g = map(InstanceKind::UnimodularDet, n, seed);
        let cert = four_factor(&g, &mut ChaCha8Rng::seed_from_u64(seed), &tol()).unwrap();
        prop_assert!(verify_certificate(&cert, &tol()).passed());
        prop_assert!(cert.factors.len() <= 4);
    }

    #[test]
    fn con_sqrt_round_trip(n in 1usize..=6, seed in any::<u64>()) {
        let g = map(InstanceKind::Coninvolution, n, seed);
        let h = con_sqrt(&g, &mut ChaCha8Rng::seed_from_u64(seed), &tol()).unwrap();
        let back = affine_compose(&h, &h.conj().inverse(&tol()).unwrap()).unwrap();
        prop_assert!(back.dist(&g) <= 1e-9 * g.norm().max(1.0));
    }

    #[test]
    fn adjoint_witness_is_coninvolutory(
        parts in prop::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 1..=8)
            .prop_filter("last entry away from zero", |p| {
                let (re, im) = p[p.len() - 1];
                re.hypot(im) > 1e-3
            })
    ) {
        let x: Vec<C64> = parts.iter().map(|&(re, im)| C64::new(re, im)).collect();
        let w = adjoint_witness(&x);
        let n = x.len();
        prop_assert!((&w.b * &w.b.conj()).dist(&Matrix::identity(n)) <= 1e-12);
        let h = Affine::new(w.b.clone(), w.w.clone()).unwrap();
        prop_assert!(is_coninvolution(&h, &tol()).holds);
    }
}

#[test]
fn single_precision_pipeline() {
    use coninv::{AffineMap32, Tolerance32};
    use num_complex::Complex;
    let t = Tolerance32::default();
    let g: AffineMap32 = Affine::new(
        Matrix::jordan_block(Complex::new(1.0f32, 0.0), 2),
        vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
    )
    .unwrap();
    let cert = two_factor(&g, &mut ChaCha8Rng::seed_from_u64(0), &t).unwrap();
    assert!(verify_certificate(&cert, &t).passed());
    for seed in 0..20 {
        let g = generate::<f32>(&InstanceSpec::new(InstanceKind::UnimodularDet, 3, seed)).unwrap();
        let cert = four_factor(&g, &mut ChaCha8Rng::seed_from_u64(seed), &t).unwrap();
        assert!(verify_certificate(&cert, &t).passed(), "seed {seed}");
    }
}
