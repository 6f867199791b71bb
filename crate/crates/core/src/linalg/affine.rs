//! The affine group `Aff(n, ℂ) = GL(n, ℂ) ⋉ ℂⁿ` and its entrywise conjugation.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::decomp::{det, inverse_checked};
use super::matrix::{vector, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// Numerical thresholds shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    /// Relative residual gate for identities.
    pub residual_rel: T,
    /// Single-linkage radius for eigenvalue clusters.
    pub eig_cluster: T,
    /// Relative singular value cut for numerical rank and invertibility.
    pub rank_cut: T,
    pub max_retries: usize,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            residual_rel: T::lit(T::RESIDUAL_REL),
            eig_cluster: T::lit(T::EIG_CLUSTER),
            rank_cut: T::lit(T::RANK_CUT),
            max_retries: 32,
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !pos(self.residual_rel) {
            return Err(Error::InvalidTolerance("residual_rel must be positive"));
        }
        if !pos(self.eig_cluster) {
            return Err(Error::InvalidTolerance("eig_cluster must be positive"));
        }
        if !pos(self.rank_cut) {
            return Err(Error::InvalidTolerance("rank_cut must be positive"));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidTolerance("max_retries must be at least 1"));
        }
        Ok(())
    }

    pub fn with_residual(mut self, residual_rel: T) -> Self {
        self.residual_rel = residual_rel;
        self
    }
}

/// The map `x ↦ A x + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<T> {
    pub linear: Matrix<T>,
    pub translation: Vec<Complex<T>>,
}

impl<T: Real> Affine<T> {
    /// Checks shape and finiteness; invertibility is checked where it is used.
    pub fn new(linear: Matrix<T>, translation: Vec<Complex<T>>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "linear part is {}x{}",
                linear.rows(),
                linear.cols()
            )));
        }
        if translation.len() != linear.rows() {
            return Err(Error::DimensionMismatch(format!(
                "translation of length {} for n={}",
                translation.len(),
                linear.rows()
            )));
        }
        if !linear.is_finite() || !translation.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite);
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            linear: Matrix::identity(n),
            translation: vector::zeros(n),
        }
    }

    pub fn linear(a: Matrix<T>) -> Self {
        let n = a.rows();
        Self {
            linear: a,
            translation: vector::zeros(n),
        }
    }

    pub fn translation(v: Vec<Complex<T>>) -> Self {
        Self {
            linear: Matrix::identity(v.len()),
            translation: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    /// Frobenius norm of the pair, `sqrt(‖A‖² + ‖v‖²)`.
    pub fn norm(&self) -> T {
        let a = self.linear.norm_fro();
        let v = vector::norm(&self.translation);
        (a * a + v * v).sqrt()
    }

    /// Distance between two maps in the same norm.
    pub fn dist(&self, other: &Self) -> T {
        let a = self.linear.dist(&other.linear);
        let v = vector::norm(&vector::sub(&self.translation, &other.translation));
        (a * a + v * v).sqrt()
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        vector::add(&self.linear.mul_vec(x), &self.translation)
    }

    pub fn det(&self) -> Result<Complex<T>> {
        det(&self.linear)
    }

    /// `(A ⊕ B, v ⊕ w)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.translation.clone();
        t.extend_from_slice(&other.translation);
        Self {
            linear: self.linear.direct_sum(&other.linear),
            translation: t,
        }
    }

    /// Composition `self ∘ other`: `(A_f A_g, A_f v_g + v_f)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        affine_compose(self, other)
    }

    pub fn conj(&self) -> Self {
        affine_conj(self)
    }

    pub fn inverse(&self, tol: &Tolerance<T>) -> Result<Self> {
        affine_inverse(self, tol)
    }
}

fn check_same_dim<T: Real>(f: &Affine<T>, g: &Affine<T>) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "affine maps of dimension {} and {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(())
}

pub fn affine_compose<T: Real>(f: &Affine<T>, g: &Affine<T>) -> Result<Affine<T>> {
    check_same_dim(f, g)?;
    Ok(Affine {
        linear: &f.linear * &g.linear,
        translation: vector::add(&f.linear.mul_vec(&g.translation), &f.translation),
    })
}

/// Composes a sequence left to right: `fs[0] ∘ fs[1] ∘ ⋯`.
pub fn compose_all<T: Real>(fs: &[Affine<T>]) -> Result<Affine<T>> {
    let first = fs
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty product".into()))?;
    fs[1..].iter().try_fold(first.clone(), |acc, f| affine_compose(&acc, f))
}

/// `(A⁻¹, −A⁻¹ v)`; fails when the reciprocal condition of `A` is below `rank_cut`.
pub fn affine_inverse<T: Real>(g: &Affine<T>, tol: &Tolerance<T>) -> Result<Affine<T>> {
    let inv = inverse_checked(&g.linear, tol.rank_cut)?;
    let t = vector::neg(&inv.mul_vec(&g.translation));
    Ok(Affine {
        linear: inv,
        translation: t,
    })
}

pub fn affine_conj<T: Real>(g: &Affine<T>) -> Affine<T> {
    Affine {
        linear: g.linear.conj(),
        translation: vector::conj(&g.translation),
    }
}

/// Outcome of the coninvolution test, with both scaled residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConinvolutionCheck<T> {
    pub holds: bool,
    /// `‖A Ā − I‖ / max(1, ‖A‖²)`
    pub linear: T,
    /// `‖A v̄ + v‖ / max(1, ‖A‖ ‖v‖)`
    pub translation: T,
}

impl<T: Real> ConinvolutionCheck<T> {
    pub fn worst(&self) -> T {
        self.linear.max(self.translation)
    }
}

/// Tests `g ḡ = e`, i.e. `A Ā = I` and `A v̄ + v = 0`.
pub fn is_coninvolution<T: Real>(g: &Affine<T>, tol: &Tolerance<T>) -> ConinvolutionCheck<T> {
    let n = g.dim();
    let a = &g.linear;
    let an = a.norm_fro();
    let vn = vector::norm(&g.translation);
    let lin = (a * &a.conj()).dist(&Matrix::identity(n)) / T::one().max(an * an);
    let tr =
        vector::norm(&vector::add(&a.mul_vec(&vector::conj(&g.translation)), &g.translation)) / T::one().max(an * vn);
    ConinvolutionCheck {
        holds: lin <= tol.residual_rel && tr <= tol.residual_rel,
        linear: lin,
        translation: tr,
    }
}

/// `Θ(A, v) = [[A, v], [0, 1]]`.
pub fn homogeneous_embed<T: Real>(g: &Affine<T>) -> Matrix<T> {
    let n = g.dim();
    let mut m = Matrix::zeros(n + 1, n + 1);
    m.set_block(0, 0, &g.linear);
    for i in 0..n {
        m[(i, n)] = g.translation[i];
    }
    m[(n, n)] = Complex::one();
    m
}

/// Inverse of [`homogeneous_embed`]; the last row must be `(0, …, 0, 1)`.
pub fn homogeneous_extract<T: Real>(m: &Matrix<T>) -> Result<Affine<T>> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::DimensionMismatch("homogeneous matrix must be square".into()));
    }
    let n = m.rows() - 1;
    let last_ok = (0..n).all(|j| m[(n, j)].is_zero()) && m[(n, n)] == Complex::one();
    if !last_ok {
        return Err(Error::DimensionMismatch("last row is not (0, ..., 0, 1)".into()));
    }
    Affine::new(m.block(0, 0, n, n), (0..n).map(|i| m[(i, n)]).collect())
}

/// `k g k⁻¹`.
pub fn group_conjugate<T: Real>(k: &Affine<T>, g: &Affine<T>, tol: &Tolerance<T>) -> Result<Affine<T>> {
    check_same_dim(k, g)?;
    let kinv = affine_inverse(k, tol)?;
    affine_compose(&affine_compose(k, g)?, &kinv)
}

/// `k g k̄⁻¹`.
pub fn consimilarity_transform<T: Real>(k: &Affine<T>, g: &Affine<T>, tol: &Tolerance<T>) -> Result<Affine<T>> {
    check_same_dim(k, g)?;
    let kbar_inv = affine_inverse(&affine_conj(k), tol)?;
    affine_compose(&affine_compose(k, g)?, &kbar_inv)
}

/// `|det A|`.
pub fn det_modulus<T: Real>(a: &Matrix<T>) -> Result<T> {
    Ok(det(a)?.norm())
}

/// `‖f₁ ∘ ⋯ ∘ f_k − g‖ / max(1, ‖g‖, Π‖fᵢ‖)`.
pub fn product_residual<T: Real>(g: &Affine<T>, fs: &[Affine<T>]) -> Result<T> {
    let p = compose_all(fs)?;
    check_same_dim(&p, g)?;
    let scale = fs
        .iter()
        .fold(T::one(), |acc, f| acc * f.norm())
        .max(g.norm())
        .max(T::one());
    Ok(p.dist(g) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn scalar_map(a: (f64, f64), v: (f64, f64)) -> Affine<f64> {
        Affine::new(Matrix::diag(&[c(a.0, a.1)]), vec![c(v.0, v.1)]).unwrap()
    }

    #[test]
    fn compose_scalars() {
        let f = scalar_map((2.0, 0.0), (1.0, 0.0));
        let g = scalar_map((3.0, 0.0), (5.0, 0.0));
        assert_eq!(affine_compose(&f, &g).unwrap(), scalar_map((6.0, 0.0), (11.0, 0.0)));
        let e = Affine::identity(1);
        assert_eq!(affine_compose(&e, &g).unwrap(), g);
        assert!(affine_compose(&Affine::identity(2), &g).is_err());
    }

    #[test]
    fn inverse_examples() {
        let g = scalar_map((2.0, 0.0), (4.0, 0.0));
        let inv = affine_inverse(&g, &tol()).unwrap();
        assert!(inv.dist(&scalar_map((0.5, 0.0), (-2.0, 0.0))) < 1e-15);
        let t = Affine::translation(vec![c(1.0, 2.0), c(-3.0, 0.5)]);
        let ti = affine_inverse(&t, &tol()).unwrap();
        assert_eq!(ti.translation, vec![c(-1.0, -2.0), c(3.0, -0.5)]);
        let j = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ji = affine_inverse(&j, &tol()).unwrap();
        let expect = Affine::new(
            Matrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 1.0]]),
            vec![c(1.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap();
        assert!(ji.dist(&expect) < 1e-15);
        // real g: conj(g)^{-1} = g^{-1}
        assert!(affine_inverse(&affine_conj(&j), &tol()).unwrap().dist(&expect) < 1e-15);
        let sing = Affine::linear(Matrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]));
        assert!(matches!(affine_inverse(&sing, &tol()), Err(Error::Singular { .. })));
    }

    #[test]
    fn conj_examples() {
        let g = scalar_map((0.0, 1.0), (1.0, 1.0));
        assert_eq!(affine_conj(&g), scalar_map((0.0, -1.0), (1.0, -1.0)));
        let real = scalar_map((3.0, 0.0), (-2.0, 0.0));
        assert_eq!(affine_conj(&real), real);
    }

    #[test]
    fn coninvolution_examples() {
        assert!(is_coninvolution(&Affine::<f64>::identity(3), &tol()).holds);
        assert!(is_coninvolution(&scalar_map((1.0, 0.0), (0.0, 3.0)), &tol()).holds);
        let r = is_coninvolution(&scalar_map((1.0, 0.0), (1.0, 0.0)), &tol());
        assert!(!r.holds);
        assert!((r.translation - 2.0).abs() < 1e-15);
    }

    #[test]
    fn embed_examples() {
        let m = homogeneous_embed(&Affine::<f64>::identity(2));
        assert_eq!(m, Matrix::identity(3));
        let m = homogeneous_embed(&scalar_map((2.0, 0.0), (5.0, 0.0)));
        assert_eq!(m, Matrix::from_real_rows(&[&[2.0, 5.0], &[0.0, 1.0]]));
        assert_eq!(homogeneous_extract(&m).unwrap(), scalar_map((2.0, 0.0), (5.0, 0.0)));
    }

    #[test]
    fn conjugation_examples() {
        let k = scalar_map((2.0, 0.0), (0.0, 0.0));
        let g = scalar_map((1.0, 0.0), (1.0, 0.0));
        assert!(
            group_conjugate(&k, &g, &tol())
                .unwrap()
                .dist(&scalar_map((1.0, 0.0), (2.0, 0.0)))
                < 1e-15
        );
        assert_eq!(group_conjugate(&Affine::identity(1), &g, &tol()).unwrap(), g);

        let k = scalar_map((0.0, 1.0), (0.0, 0.0));
        let g = scalar_map((-1.0, 0.0), (0.0, 0.0));
        let h = consimilarity_transform(&k, &g, &tol()).unwrap();
        assert!(h.dist(&scalar_map((1.0, 0.0), (0.0, 0.0))) < 1e-15);
    }

    #[test]
    fn translation_conjugation_formula() {
        let a = Matrix::from_real_rows(&[&[2.0, 1.0], &[0.5, -1.0]]);
        let v = vec![c(1.0, 2.0), c(0.0, -1.0)];
        let t = vec![c(0.3, 0.1), c(-0.7, 0.2)];
        let g = Affine::new(a.clone(), v.clone()).unwrap();
        let got = group_conjugate(&Affine::translation(t.clone()), &g, &tol()).unwrap();
        let ia = &Matrix::identity(2) - &a;
        let expect = Affine::new(a, vector::add(&v, &ia.mul_vec(&t))).unwrap();
        assert!(got.dist(&expect) < 1e-14);
    }
}
