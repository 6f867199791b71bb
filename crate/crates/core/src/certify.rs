//! Independent certificate verification, seeded instance generators and
//! brute-force oracles for small dimensions.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factorization::{Certificate, Kind};
use crate::linalg::{
    affine_compose, affine_conj, affine_inverse, inverse_with_rcond, is_coninvolution, product_residual, Affine,
    Matrix, Svd, Tolerance,
};
use crate::scalar::Real;

/// One recomputed identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check<T> {
    pub identity: String,
    pub residual: T,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report<T> {
    pub checks: Vec<Check<T>>,
}

impl<T: Real> Report<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check<T>> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn worst(&self) -> T {
        self.checks.iter().fold(T::zero(), |acc, c| acc.max(c.residual))
    }

    fn push(&mut self, identity: String, residual: T, gate: T) {
        self.checks.push(Check {
            identity,
            residual,
            passed: residual <= gate,
        });
    }
}

impl<T: Real> fmt::Display for Report<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{tag}  {:<40} {:.3e}", c.identity, c.residual.as_f64())?;
        }
        Ok(())
    }
}

/// Recomputes every identity of `c` from its stored input and factors,
/// ignoring the residuals recorded in the certificate.
pub fn verify_certificate<T: Real>(c: &Certificate<T>, tol: &Tolerance<T>) -> Report<T> {
    let gate = tol.residual_rel;
    let mut report = Report { checks: Vec::new() };
    let count_ok = Kind::from_count(c.factors.len()) == Some(c.kind);
    report.push(
        format!("kind {} has {} factors", c.kind.as_str(), c.kind.factor_count()),
        if count_ok { T::zero() } else { T::infinity() },
        gate,
    );
    let n = c.input.dim();
    let dims_ok = c.factors.iter().all(|f| f.dim() == n);
    report.push(
        "factor dimensions match the input".into(),
        if dims_ok { T::zero() } else { T::infinity() },
        gate,
    );
    if !dims_ok {
        return report;
    }
    for (i, f) in c.factors.iter().enumerate() {
        let ci = is_coninvolution(f, tol);
        report.push(format!("factor {}: A Ā = I", i + 1), ci.linear, gate);
        report.push(format!("factor {}: A v̄ + v = 0", i + 1), ci.translation, gate);
    }
    let product = product_residual(&c.input, &c.factors).unwrap_or_else(|_| T::infinity());
    report.push("product of factors equals the input".into(), product, gate);
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Coninvolution,
    CReversible,
    UnipotentAffine,
    UnimodularDet,
    General,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Coninvolution,
        InstanceKind::CReversible,
        InstanceKind::UnipotentAffine,
        InstanceKind::UnimodularDet,
        InstanceKind::General,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Coninvolution => "random_coninvolution",
            InstanceKind::CReversible => "random_c_reversible",
            InstanceKind::UnipotentAffine => "random_unipotent_affine",
            InstanceKind::UnimodularDet => "random_unimodular_det",
            InstanceKind::General => "random_general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub dim: usize,
    pub seed: u64,
    /// Upper bound on the 1-norm condition number of random similarities.
    pub cond_cap: f64,
}

impl InstanceSpec {
    pub const DEFAULT_COND_CAP: f64 = 1e3;

    pub fn new(kind: InstanceKind, dim: usize, seed: u64) -> Self {
        Self {
            kind,
            dim,
            seed,
            cond_cap: Self::DEFAULT_COND_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::DimensionMismatch("instance dimension must be at least 1".into()));
        }
        if !(self.cond_cap >= 1.0) {
            return Err(Error::InvalidTolerance("conditioning cap must be at least 1"));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

const MAX_REDRAWS: usize = 1000;

fn random_complex<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub fn random_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(n, n, |_, _| random_complex(rng))
}

/// Random matrix with 1-norm condition number at most `cap`, with its inverse.
pub fn random_well_conditioned<T: Real, R: Rng + ?Sized>(
    n: usize,
    cap: f64,
    rng: &mut R,
) -> Result<(Matrix<T>, Matrix<T>)> {
    for _ in 0..MAX_REDRAWS {
        let p: Matrix<T> = random_matrix(n, rng);
        if let Ok((inv, rcond)) = inverse_with_rcond(&p) {
            if rcond.as_f64() * cap >= 1.0 {
                return Ok((p, inv));
            }
        }
    }
    Err(Error::RetriesExhausted {
        stage: "random_well_conditioned",
        attempts: MAX_REDRAWS,
        last_residual: f64::INFINITY,
    })
}

fn polar<T: Real>(r: f64, theta: f64) -> Complex<T> {
    Complex::new(T::lit(r * theta.cos()), T::lit(r * theta.sin()))
}

/// `h h̄⁻¹` for a random `h` with well-conditioned linear part.
pub fn random_coninvolution<T: Real>(spec: &InstanceSpec) -> Result<Affine<T>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let (p, _) = random_well_conditioned::<T, _>(spec.dim, spec.cond_cap, &mut rng)?;
    let h = Affine::new(p, random_vector(spec.dim, &mut rng))?;
    let tol = Tolerance::default();
    affine_compose(&h, &affine_inverse(&affine_conj(&h), &tol)?)
}

/// Jordan data closed under `λ ↦ 1/λ̄`: paired blocks off the unit circle,
/// self-paired unimodular blocks and unipotent blocks, conjugated by a
/// random well-conditioned similarity.
pub fn random_c_reversible<T: Real>(spec: &InstanceSpec) -> Result<Matrix<T>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let n = spec.dim;
    let mut blocks: Vec<(Complex<T>, usize)> = Vec::new();
    let mut used: Vec<Complex<T>> = Vec::new();
    let far = |z: Complex<T>, used: &[Complex<T>]| used.iter().all(|&u| (u - z).norm() >= T::lit(0.2));
    let mut remaining = n;
    while remaining > 0 {
        match rng.gen_range(0..3) {
            0 if remaining >= 2 => {
                let lam: Complex<T> = polar(rng.gen_range(0.3f64..1.2).exp(), rng.gen_range(0.0..2.0 * PI));
                let mate = Complex::new(T::one(), T::zero()) / lam.conj();
                if !far(lam, &used) || !far(mate, &used) {
                    continue;
                }
                let m = if remaining >= 4 && rng.gen_bool(0.3) { 2 } else { 1 };
                used.extend([lam, mate]);
                blocks.extend([(lam, m), (mate, m)]);
                remaining -= 2 * m;
            }
            1 => {
                let lam: Complex<T> = polar(1.0, rng.gen_range(0.3..2.0 * PI - 0.3));
                if !far(lam, &used) {
                    continue;
                }
                let m = if remaining >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
                used.push(lam);
                blocks.push((lam, m));
                remaining -= m;
            }
            _ => {
                let m = rng.gen_range(1..=remaining.min(3));
                blocks.push((Complex::new(T::one(), T::zero()), m));
                remaining -= m;
            }
        }
    }
    let j = blocks.iter().fold(Matrix::zeros(0, 0), |acc, &(lam, m)| {
        acc.direct_sum(&Matrix::jordan_block(lam, m))
    });
    let (p, p_inv) = random_well_conditioned::<T, _>(n, spec.cond_cap, &mut rng)?;
    Ok(&(&p * &j) * &p_inv)
}

/// `(P (⊕ J(1, mᵢ)) P⁻¹, v)` with block sizes at most 5.
pub fn random_unipotent_affine<T: Real>(spec: &InstanceSpec) -> Result<Affine<T>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let n = spec.dim;
    let mut j = Matrix::zeros(0, 0);
    let mut remaining = n;
    while remaining > 0 {
        let m = rng.gen_range(1..=remaining.min(5));
        j = j.direct_sum(&Matrix::jordan_block(Complex::new(T::one(), T::zero()), m));
        remaining -= m;
    }
    let (p, p_inv) = random_well_conditioned::<T, _>(n, spec.cond_cap, &mut rng)?;
    Affine::new(&(&p * &j) * &p_inv, random_vector(n, &mut rng))
}

/// Random well-conditioned matrix rescaled to `|det| = 1`.
pub fn random_unimodular_det<T: Real>(spec: &InstanceSpec) -> Result<Matrix<T>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let (p, _) = random_well_conditioned::<T, _>(spec.dim, spec.cond_cap, &mut rng)?;
    let d = crate::linalg::decomp::det(&p)?.norm();
    let s = T::one() / d.powf(T::one() / T::from_usize(spec.dim).unwrap());
    Ok(p.scale_real(s))
}

/// Random affine map with well-conditioned linear part and no constraints.
pub fn random_general<T: Real>(spec: &InstanceSpec) -> Result<Affine<T>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let (p, _) = random_well_conditioned::<T, _>(spec.dim, spec.cond_cap, &mut rng)?;
    Affine::new(p, random_vector(spec.dim, &mut rng))
}

/// Affine instance of any kind; matrix generators get a random translation
/// drawn after the matrix from a derived seed.
pub fn generate<T: Real>(spec: &InstanceSpec) -> Result<Affine<T>> {
    let translation = || {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
        random_vector::<T, _>(spec.dim, &mut rng)
    };
    match spec.kind {
        InstanceKind::Coninvolution => random_coninvolution(spec),
        InstanceKind::CReversible => Affine::new(random_c_reversible(spec)?, translation()),
        InstanceKind::UnipotentAffine => random_unipotent_affine(spec),
        InstanceKind::UnimodularDet => Affine::new(random_unimodular_det(spec)?, translation()),
        InstanceKind::General => random_general(spec),
    }
}

/// Closed-form facts about a one-dimensional map `(a, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dim1Facts {
    /// `|a| = 1` and `a v̄ + v = 0`.
    pub coninvolution: bool,
    /// `|a| = 1`; also decides two-factor existence.
    pub c_reversible: bool,
    /// `|a| = 1`; decides existence of any coninvolution product.
    pub unimodular: bool,
}

pub fn oracle_dim1<T: Real>(g: &Affine<T>, tol: &Tolerance<T>) -> Result<Dim1Facts> {
    if g.dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "oracle_dim1 on dimension {}",
            g.dim()
        )));
    }
    let a = g.linear[(0, 0)];
    let v = g.translation[0];
    let unimodular = (a.norm() - T::one()).abs() <= tol.residual_rel;
    let fixed = (a * v.conj() + v).norm() <= tol.residual_rel * T::one().max(v.norm());
    Ok(Dim1Facts {
        coninvolution: unimodular && fixed,
        c_reversible: unimodular,
        unimodular,
    })
}

/// `21 × 21 × 21` maps `(a, v)`: `|a| = 2^{(i−10)/10}`, `arg a = 2πj/21`,
/// and `v` along the fixed direction `i e^{iφ/2}` of `v ↦ −a v̄` (first
/// eleven steps) or across it.
pub fn dim1_grid<T: Real>() -> Vec<Affine<T>> {
    let mut out = Vec::with_capacity(21 * 21 * 21);
    for i in 0..21 {
        let r = 2f64.powf((i as f64 - 10.0) / 10.0);
        for j in 0..21 {
            let phi = 2.0 * PI * j as f64 / 21.0;
            for k in 0..21 {
                let v = if k < 11 {
                    polar::<T>((k as f64 - 5.0) / 2.5, phi / 2.0 + PI / 2.0)
                } else {
                    polar::<T>((k as f64 - 10.0) / 2.5, phi / 2.0)
                };
                out.push(Affine {
                    linear: Matrix::diag(&[polar(r, phi)]),
                    translation: vec![v],
                });
            }
        }
    }
    out
}

/// One-sided search for `k` with `k A = B k̄`: random draws projected onto
/// the kernel of the real-linear map `k ↦ k A − B k̄` by least squares, then
/// tested for invertibility. `false` means "not found".
pub fn oracle_consimilar_2x2<T: Real, R: Rng + ?Sized>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    budget: usize,
    rng: &mut R,
) -> Result<bool> {
    if a.rows() != 2 || b.rows() != 2 || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch(
            "oracle_consimilar_2x2 needs 2x2 matrices".into(),
        ));
    }
    let to_matrix = |x: &[T]| Matrix::from_fn(2, 2, |i, j| Complex::new(x[2 * (2 * i + j)], x[2 * (2 * i + j) + 1]));
    let apply = |k: &Matrix<T>| {
        let r = &(k * a) - &(b * &k.conj());
        r.as_slice().iter().flat_map(|z| [z.re, z.im]).collect::<Vec<T>>()
    };
    let lmat = Matrix::from_fn(8, 8, |row, col| {
        let mut e = [T::zero(); 8];
        e[col] = T::one();
        Complex::new(apply(&to_matrix(&e))[row], T::zero())
    });
    let svd = Svd::new(&lmat)?;
    let scale = T::one().max(lmat.norm_fro());
    let threshold = T::lit(1e-9) * scale;
    let gate = T::lit(1e-8) * scale;
    for _ in 0..budget {
        let k0: Vec<T> = (0..8).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let lk: Vec<Complex<T>> = apply(&to_matrix(&k0))
            .into_iter()
            .map(|x| Complex::new(x, T::zero()))
            .collect();
        let corr = svd.solve(&lk, threshold);
        let x: Vec<T> = k0.iter().zip(&corr).map(|(&k, c)| k - c.re).collect();
        let k = to_matrix(&x);
        let residual = apply(&k).iter().fold(T::zero(), |acc, &r| acc + r * r).sqrt();
        if residual > gate * T::one().max(k.norm_fro()) {
            continue;
        }
        if let Ok((_, rcond)) = inverse_with_rcond(&k) {
            if rcond >= T::lit(1e-6) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `k g k̄⁻¹` reached through plain conjugation and through consimilarity
/// for the same `k`; used to show the former breaks coninvolutions.
pub fn translation_counterexample<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Affine<T>, Affine<T>) {
    let v: Vec<Complex<T>> = (0..n)
        .map(|_| Complex::new(T::zero(), T::lit(rng.gen_range(-1.0..1.0))))
        .collect();
    let g = Affine::translation(v);
    let k = Affine::linear(random_matrix(n, rng));
    (g, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::two_factor;
    use crate::linalg::{consimilarity_transform, group_conjugate};
    use crate::reversibility::is_c_reversible_matrix;
    use crate::scalar::c;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn golden_certificate() -> Certificate<f64> {
        let g = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let g1 = Affine::new(
            Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]),
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let g2 = Affine::linear(Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, -1.0]]));
        Certificate::new(g, vec![g1, g2], Vec::new(), &tol()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let t = tol();
        let e = Affine::<f64>::identity(3);
        let cert = Certificate::new(e.clone(), vec![e.clone(), e], Vec::new(), &t).unwrap();
        assert!(verify_certificate(&cert, &t).passed());

        let report = verify_certificate(&golden_certificate(), &t);
        assert!(report.passed());
        assert!(report.worst() <= 1e-12);

        let mut bad = golden_certificate();
        bad.factors[1].linear = -&bad.factors[1].linear;
        let report = verify_certificate(&bad, &t);
        assert!(!report.passed());
        let names: Vec<_> = report.failures().map(|c| c.identity.clone()).collect();
        assert_eq!(names, vec!["product of factors equals the input".to_string()]);

        let mut bad = golden_certificate();
        bad.factors[0].translation[0] = c(1e-3, 0.0);
        let report = verify_certificate(&bad, &t);
        assert!(report.failures().any(|c| c.identity == "factor 1: A v̄ + v = 0"));
    }

    #[test]
    fn generators_satisfy_their_predicates() {
        let t = tol();
        for seed in 0..40 {
            for n in 1..=4 {
                let g = random_coninvolution::<f64>(&InstanceSpec::new(InstanceKind::Coninvolution, n, seed)).unwrap();
                assert!(is_coninvolution(&g, &t).holds, "seed {seed} n {n}");
                let a = random_c_reversible::<f64>(&InstanceSpec::new(InstanceKind::CReversible, n, seed)).unwrap();
                assert!(is_c_reversible_matrix(&a, &t).unwrap(), "seed {seed} n {n}");
                let a = random_unimodular_det::<f64>(&InstanceSpec::new(InstanceKind::UnimodularDet, n, seed)).unwrap();
                assert!((crate::linalg::det_modulus(&a).unwrap() - 1.0).abs() <= 1e-10);
                let u =
                    random_unipotent_affine::<f64>(&InstanceSpec::new(InstanceKind::UnipotentAffine, n, seed)).unwrap();
                assert!(crate::spectral::is_unipotent(&u.linear, &t).unwrap());
            }
        }
        let a = random_unimodular_det::<f64>(&InstanceSpec::new(InstanceKind::UnimodularDet, 3, 1)).unwrap();
        assert!(!is_c_reversible_matrix(&a, &t).unwrap());
    }

    #[test]
    fn generators_are_deterministic() {
        for kind in InstanceKind::ALL {
            let spec = InstanceSpec::new(kind, 3, 11);
            assert_eq!(generate::<f64>(&spec).unwrap(), generate::<f64>(&spec).unwrap());
        }
    }

    #[test]
    fn dim1_oracle_examples() {
        let t = tol();
        let g = Affine::new(Matrix::diag(&[c(0.0, 1.0)]), vec![c(1.0, 1.0)]).unwrap();
        assert!(!oracle_dim1(&g, &t).unwrap().coninvolution);
        let phi = 0.4_f64;
        let g = Affine::linear(Matrix::diag(&[c(phi.cos(), phi.sin())]));
        let facts = oracle_dim1(&g, &t).unwrap();
        assert!(facts.coninvolution && facts.c_reversible);
        let g = Affine::linear(Matrix::diag(&[c(2.0, 0.0)]));
        assert!(!oracle_dim1(&g, &t).unwrap().c_reversible);
        assert!(oracle_dim1(&Affine::<f64>::identity(2), &t).is_err());
    }

    #[test]
    fn dim1_grid_mixes_outcomes() {
        let t = tol();
        let grid = dim1_grid::<f64>();
        assert_eq!(grid.len(), 9261);
        let con = grid
            .iter()
            .filter(|g| oracle_dim1(g, &t).unwrap().coninvolution)
            .count();
        // 21 angles at |a| = 1, each with the 11 fixed-direction samples (v = 0 among them)
        assert_eq!(con, 21 * 11);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in grid.iter().step_by(97) {
            let facts = oracle_dim1(g, &t).unwrap();
            assert_eq!(two_factor(g, &mut rng, &t).is_ok(), facts.c_reversible);
        }
    }

    #[test]
    fn consimilarity_oracle_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: Matrix<f64> = Matrix::from_real_rows(&[&[1.0, 2.0], &[0.5, 3.0]]);
        assert!(oracle_consimilar_2x2(&a, &a, 50, &mut rng).unwrap());
        let phi = 0.9_f64;
        let b: Matrix<f64> = Matrix::diag(&[c(phi.cos(), phi.sin()), c(1.0, 0.0)]);
        assert!(oracle_consimilar_2x2(&Matrix::identity(2), &b, 50, &mut rng).unwrap());
        let b: Matrix<f64> = Matrix::diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(!oracle_consimilar_2x2(&Matrix::identity(2), &b, 200, &mut rng).unwrap());
    }

    #[test]
    fn counterexample_shape() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (g, k) = translation_counterexample::<f64, _>(3, &mut rng);
        assert!(is_coninvolution(&g, &t).holds);
        assert!(!is_coninvolution(&group_conjugate(&k, &g, &t).unwrap(), &t).holds);
        assert!(is_coninvolution(&consimilarity_transform(&k, &g, &t).unwrap(), &t).holds);
    }
}
