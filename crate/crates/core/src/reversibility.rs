//! Conjugate-reversibility: `g` is c-reversible when some `h` satisfies
//! `h g h⁻¹ = ḡ⁻¹`, and strongly so when `h` can be taken with `h h̄ = e`.
//! A strong reverser `h` splits `g` into the two coninvolutions
//! `h⁻¹` and `ḡ⁻¹ h`.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::decomp::inverse_with_rcond;
use crate::linalg::{
    affine_compose, affine_conj, affine_inverse, group_conjugate, is_coninvolution, vector, Affine, Matrix, Svd,
    Tolerance,
};
use crate::scalar::Real;
use crate::spectral::{jordan_structure, principal_inv_sqrt};

/// A reverser `h` for some `g`, with its measured residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct ReverserWitness<T> {
    pub reverser: Affine<T>,
    pub coninvolutory: bool,
    /// `‖h g − ḡ⁻¹ h‖ / max(1, ‖h‖ (‖g‖ + ‖ḡ⁻¹‖))`
    pub residual_reverse: T,
    /// Worst residual of `h h̄ = e`, see [`is_coninvolution`].
    pub residual_coninv: T,
}

impl<T: Real> ReverserWitness<T> {
    /// Measures `h` against `g`.
    pub fn measure(g: &Affine<T>, h: Affine<T>, tol: &Tolerance<T>) -> Result<Self> {
        let residual_reverse = reverse_residual(g, &h, tol)?;
        let ci = is_coninvolution(&h, tol);
        Ok(Self {
            reverser: h,
            coninvolutory: ci.holds,
            residual_reverse,
            residual_coninv: ci.worst(),
        })
    }

    pub fn reverses(&self, tol: &Tolerance<T>) -> bool {
        self.residual_reverse <= tol.residual_rel
    }

    pub fn is_strong(&self, tol: &Tolerance<T>) -> bool {
        self.reverses(tol) && self.coninvolutory
    }

    pub fn linear(&self) -> &Matrix<T> {
        &self.reverser.linear
    }
}

/// Scaled residual of `h g h⁻¹ = ḡ⁻¹`, measured without inverting `h`.
pub fn reverse_residual<T: Real>(g: &Affine<T>, h: &Affine<T>, tol: &Tolerance<T>) -> Result<T> {
    let gbar_inv = affine_inverse(&affine_conj(g), tol)?;
    let lhs = affine_compose(h, g)?;
    let rhs = affine_compose(&gbar_inv, h)?;
    let scale = T::one().max(h.norm() * (g.norm() + gbar_inv.norm()));
    Ok(lhs.dist(&rhs) / scale)
}

fn require_invertible<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("reversibility needs a square matrix".into()));
    }
    let (inv, rcond) = inverse_with_rcond(a)?;
    if rcond < tol.rank_cut {
        return Err(Error::Singular { rcond: rcond.as_f64() });
    }
    Ok(inv)
}

/// `A` is c-reversible iff its Jordan structure is invariant under
/// `λ ↦ 1/λ̄` with block sizes kept.
pub fn is_c_reversible_matrix<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    require_invertible(a, tol)?;
    let js = jordan_structure(a, tol)?;
    let mirrored = js.map_eigenvalues(|l| Complex::new(T::one(), T::zero()) / l.conj());
    Ok(js.matches(&mirrored, tol))
}

/// Decided through the linear part: for affine maps, c-reversible, strongly
/// c-reversible and "linear part c-reversible" coincide.
pub fn is_c_reversible_affine<T: Real>(g: &Affine<T>, tol: &Tolerance<T>) -> Result<bool> {
    is_c_reversible_matrix(&g.linear, tol)
}

/// Orthonormal basis of `{B : B A = Ā⁻¹ B}` from the null space of the
/// vectorized operator `Aᵀ ⊗ I − I ⊗ Ā⁻¹` (column-major `vec`).
pub fn reverser_space<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<Vec<Matrix<T>>> {
    let inv = require_invertible(a, tol)?;
    let target = inv.conj();
    let n = a.rows();
    let nn = n * n;
    let mut k = Matrix::zeros(nn, nn);
    for i in 0..n {
        for j in 0..n {
            let row = i + j * n;
            for l in 0..n {
                let col = i + l * n;
                k[(row, col)] = k[(row, col)] + a[(l, j)];
            }
            for kk in 0..n {
                let col = kk + j * n;
                k[(row, col)] = k[(row, col)] - target[(i, kk)];
            }
        }
    }
    let svd = Svd::new(&k)?;
    let root_n = T::from_usize(n).unwrap().sqrt();
    let threshold = tol.rank_cut * root_n * (a.norm_fro() + target.norm_fro());
    let ns = svd.null_space(threshold);
    Ok((0..ns.cols())
        .map(|c| Matrix::from_fn(n, n, |i, j| ns[(i + j * n, c)]))
        .collect())
}

/// A coninvolutory `B` with `B A B⁻¹ = Ā⁻¹`.
///
/// Draws `B₀` as a real combination of the reverser basis, forms
/// `S = B̄₀ B₀` (which commutes with `A`) and returns `B = B₀ S^{−1/2}`.
/// Draws whose `S` meets the negative real axis, or whose certificate
/// residuals miss the tolerance, are resampled up to `max_retries` times.
pub fn coninvolutory_reverser<T: Real, R: Rng + ?Sized>(
    a: &Matrix<T>,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<ReverserWitness<T>> {
    if !is_c_reversible_matrix(a, tol)? {
        return Err(Error::CReversibilityRequired);
    }
    let basis = reverser_space(a, tol)?;
    if basis.is_empty() {
        return Err(Error::CReversibilityRequired);
    }
    let g = Affine::linear(a.clone());
    let n = a.rows();
    let mut last = f64::INFINITY;
    for _ in 0..tol.max_retries {
        let mut b0 = Matrix::zeros(n, n);
        for e in &basis {
            let r = T::lit(rng.gen_range(-1.0..1.0));
            b0 = &b0 + &e.scale_real(r);
        }
        match inverse_with_rcond(&b0) {
            Ok((_, rcond)) if rcond >= tol.rank_cut => {}
            _ => continue,
        }
        let s = &b0.conj() * &b0;
        let q = match principal_inv_sqrt(&s, tol) {
            Ok(q) => q,
            Err(Error::NegativeRealSpectrum) => continue,
            Err(e) => return Err(e),
        };
        let b = &b0 * &q;
        let w = ReverserWitness::measure(&g, Affine::linear(b), tol)?;
        last = w.residual_reverse.max(w.residual_coninv).as_f64();
        if w.is_strong(tol) {
            return Ok(w);
        }
    }
    Err(Error::RetriesExhausted {
        stage: "coninvolutory_reverser",
        attempts: tol.max_retries,
        last_residual: last,
    })
}

/// Extends a linear reverser `B` of `A` to an affine strong reverser `(B, w)`
/// of `g = (A, v)` by solving `(Ā⁻¹ − I) w = B v + Ā⁻¹ v̄` (minimum-norm
/// least squares) and checking `B w̄ + w = 0`.
pub fn affine_reverser<T: Real>(g: &Affine<T>, b: &Matrix<T>, tol: &Tolerance<T>) -> Result<ReverserWitness<T>> {
    let a = &g.linear;
    let inv = require_invertible(a, tol)?;
    if b.rows() != a.rows() || !b.is_square() {
        return Err(Error::DimensionMismatch("reverser and map dimensions differ".into()));
    }
    let target = inv.conj();
    let lin_res = (b * a).dist(&(&target * b)) / T::one().max(b.norm_fro() * (a.norm_fro() + target.norm_fro()));
    if lin_res > tol.residual_rel {
        return Err(Error::InvalidWitness {
            reverse: lin_res.as_f64(),
            coninv: f64::INFINITY,
        });
    }
    let v = &g.translation;
    let m = target.shift(Complex::new(T::one(), T::zero()));
    let rhs = vector::add(&b.mul_vec(v), &target.mul_vec(&vector::conj(v)));
    let svd = Svd::new(&m)?;
    let root_n = T::from_usize(a.rows().max(1)).unwrap().sqrt();
    let w = svd.solve(&rhs, tol.rank_cut * (target.norm_fro() + root_n));
    let scale = T::one().max(vector::norm(&rhs) + m.norm_fro() * vector::norm(&w));
    let consistency = vector::norm(&vector::sub(&m.mul_vec(&w), &rhs)) / scale;
    if consistency > tol.residual_rel {
        return Err(Error::InconsistentSystem {
            residual: consistency.as_f64(),
        });
    }
    let wn = vector::norm(&w);
    let sym = vector::norm(&vector::add(&b.mul_vec(&vector::conj(&w)), &w)) / T::one().max(b.norm_fro() * wn);
    if sym > tol.residual_rel {
        return Err(Error::InconsistentSystem { residual: sym.as_f64() });
    }
    let h = Affine::new(b.clone(), w)?;
    let witness = ReverserWitness::measure(g, h, tol)?;
    if !witness.reverses(tol) {
        return Err(Error::InvalidWitness {
            reverse: witness.residual_reverse.as_f64(),
            coninv: witness.residual_coninv.as_f64(),
        });
    }
    Ok(witness)
}

/// Carries a reverser `h` of `g` to the reverser `k̄ h k⁻¹` of `k g k⁻¹`,
/// re-measuring residuals against the conjugated map.
pub fn transport_reverser<T: Real>(
    k: &Affine<T>,
    h: &ReverserWitness<T>,
    g: &Affine<T>,
    tol: &Tolerance<T>,
) -> Result<ReverserWitness<T>> {
    let kinv = affine_inverse(k, tol)?;
    let moved = affine_compose(&affine_compose(&affine_conj(k), &h.reverser)?, &kinv)?;
    let g_moved = group_conjugate(k, g, tol)?;
    ReverserWitness::measure(&g_moved, moved, tol)
}

/// `g = h⁻¹ · (ḡ⁻¹ h)` for a coninvolutory reverser `h` of `g`. The second
/// factor is formed as `h g`, equal to `ḡ⁻¹ h`, so `g` is never inverted.
pub fn pair_from_reverser<T: Real>(
    g: &Affine<T>,
    h: &ReverserWitness<T>,
    tol: &Tolerance<T>,
) -> Result<(Affine<T>, Affine<T>)> {
    let w = ReverserWitness::measure(g, h.reverser.clone(), tol)?;
    if !w.is_strong(tol) {
        return Err(Error::InvalidWitness {
            reverse: w.residual_reverse.as_f64(),
            coninv: w.residual_coninv.as_f64(),
        });
    }
    let first = affine_inverse(&h.reverser, tol)?;
    let second = affine_compose(&h.reverser, g)?;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::compose_all;
    use crate::scalar::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    fn swap() -> Matrix<f64> {
        Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn matrix_predicate_examples() {
        let t = tol();
        let e = std::f64::consts::E;
        assert!(is_c_reversible_matrix(&Matrix::diag(&[c(e, 0.0), c(1.0 / e, 0.0)]), &t).unwrap());
        assert!(is_c_reversible_matrix(&Matrix::jordan_block(c(1.0, 0.0), 4), &t).unwrap());
        assert!(!is_c_reversible_matrix(&Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]), &t).unwrap());
        // blocks must pair with equal sizes
        let a = Matrix::jordan_block(c(2.0, 0.0), 2).direct_sum(&Matrix::diag(&[c(0.5, 0.0), c(0.5, 0.0)]));
        assert!(!is_c_reversible_matrix(&a, &t).unwrap());
    }

    #[test]
    fn affine_predicate_examples() {
        let t = tol();
        let g = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(3.0, 1.0), c(-2.0, 0.5)]).unwrap();
        assert!(is_c_reversible_affine(&g, &t).unwrap());
        let g = Affine::linear(Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]));
        assert!(!is_c_reversible_affine(&g, &t).unwrap());
        assert!(is_c_reversible_affine(&Affine::translation(vec![c(1.0, 1.0)]), &t).unwrap());
    }

    #[test]
    fn reverser_space_examples() {
        let t = tol();
        let a = Matrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        let basis = reverser_space(&a, &t).unwrap();
        assert_eq!(basis.len(), 2);
        // the swap lies in the span: its residual against the projector vanishes
        let s = swap();
        let mut proj = Matrix::zeros(2, 2);
        for e in &basis {
            let coeff = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .fold(c(0.0, 0.0), |acc, (i, j)| acc + e[(i, j)].conj() * s[(i, j)]);
            proj = &proj + &e.scale(coeff);
        }
        assert!(proj.dist(&s) < 1e-12);
        assert!(reverser_space(&Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]), &t)
            .unwrap()
            .is_empty());
        assert_eq!(reverser_space(&Matrix::<f64>::identity(2), &t).unwrap().len(), 4);
    }

    #[test]
    fn coninvolutory_reverser_examples() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in [
            Matrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]),
            Matrix::identity(2),
            Matrix::jordan_block(c(1.0, 0.0), 2),
            Matrix::jordan_block(c(0.0, 1.0), 3),
        ] {
            let w = coninvolutory_reverser(&a, &mut rng, &t).unwrap();
            let b = w.linear();
            assert!((b * &b.conj()).dist(&Matrix::identity(a.rows())) < 1e-9);
            let target = inverse_checked_conj(&a);
            assert!((b * &a).dist(&(&target * b)) < 1e-9 * b.norm_fro());
        }
        let w = coninvolutory_reverser(&Matrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]), &mut rng, &t).unwrap();
        let b = w.linear();
        assert!(b[(0, 0)].norm() < 1e-12 && b[(1, 1)].norm() < 1e-12);
        assert_eq!(
            coninvolutory_reverser(&Matrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]), &mut rng, &t),
            Err(Error::CReversibilityRequired)
        );
    }

    fn inverse_checked_conj(a: &Matrix<f64>) -> Matrix<f64> {
        crate::linalg::inverse_checked(a, 1e-12).unwrap().conj()
    }

    #[test]
    fn affine_reverser_examples() {
        let t = tol();
        let g = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let b = Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let h = affine_reverser(&g, &b, &t).unwrap();
        assert!(vector::norm(&vector::sub(&h.reverser.translation, &[c(0.0, 0.0), c(1.0, 0.0)])) < 1e-14);
        assert!(h.is_strong(&t));

        let g = Affine::linear(Matrix::diag(&[c(2.0, 0.0), c(0.5, 0.0)]));
        let h = affine_reverser(&g, &swap(), &t).unwrap();
        assert!(vector::norm(&h.reverser.translation) == 0.0);

        let g = Affine::translation(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        assert!(matches!(
            affine_reverser(&g, &Matrix::identity(2), &t),
            Err(Error::InconsistentSystem { .. })
        ));
    }

    #[test]
    fn transport_examples() {
        let t = tol();
        let k = Affine::linear(Matrix::diag(&[c(2.0, 0.0)]));
        let g = Affine::linear(Matrix::diag(&[c(0.0, 1.0)]));
        let h = ReverserWitness::measure(&g, Affine::linear(Matrix::diag(&[c(-1.0, 0.0)])), &t).unwrap();
        assert!(h.is_strong(&t));
        let moved = transport_reverser(&k, &h, &g, &t).unwrap();
        assert!(moved.reverser.dist(&h.reverser) < 1e-15);

        let g = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h = affine_reverser(&g, &Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]), &t).unwrap();
        let k = Affine::new(
            Matrix::from_rows(&[vec![c(1.0, 0.5), c(0.2, 0.0)], vec![c(-0.3, 1.0), c(2.0, -0.1)]]),
            vec![c(0.4, -0.2), c(1.0, 1.0)],
        )
        .unwrap();
        let moved = transport_reverser(&k, &h, &g, &t).unwrap();
        assert!(moved.is_strong(&t));
    }

    #[test]
    fn worked_pair() {
        let t = tol();
        let g = Affine::new(Matrix::jordan_block(c(1.0, 0.0), 2), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h = ReverserWitness::measure(
            &g,
            Affine::new(
                Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]),
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            )
            .unwrap(),
            &t,
        )
        .unwrap();
        let (g1, g2) = pair_from_reverser(&g, &h, &t).unwrap();
        let e1 = Affine::new(
            Matrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]),
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let e2 = Affine::new(
            Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, -1.0]]),
            vec![c(0.0, 0.0); 2],
        )
        .unwrap();
        assert!(g1.dist(&e1) < 1e-15);
        assert!(g2.dist(&e2) < 1e-15);
        assert!(compose_all(&[g1, g2]).unwrap().dist(&g) < 1e-15);
    }

    #[test]
    fn pair_examples() {
        let t = tol();
        let e = Affine::<f64>::identity(2);
        let h = ReverserWitness::measure(&e, e.clone(), &t).unwrap();
        let (a, b) = pair_from_reverser(&e, &h, &t).unwrap();
        assert_eq!((a, b), (e.clone(), e));

        let phi: f64 = 0.9;
        let g = Affine::linear(Matrix::diag(&[c(phi.cos(), phi.sin())]));
        let h = ReverserWitness::measure(&g, Affine::identity(1), &t).unwrap();
        let (g1, g2) = pair_from_reverser(&g, &h, &t).unwrap();
        assert!(is_coninvolution(&g1, &t).holds && is_coninvolution(&g2, &t).holds);
        assert!(compose_all(&[g1, g2]).unwrap().dist(&g) < 1e-15);

        let bad = ReverserWitness::measure(&g, Affine::linear(Matrix::diag(&[c(2.0, 0.0)])), &t).unwrap();
        assert!(matches!(
            pair_from_reverser(&g, &bad, &t),
            Err(Error::InvalidWitness { .. })
        ));
    }
}
