//! Dense decompositions over `Complex<T>`: pivoted LU, one-sided Jacobi SVD,
//! Hessenberg/QR Schur form with reordering, and triangular Sylvester solves.
//!
//! Sizes in this crate stay small (n ≤ 8 for matrices, n² for vectorized
//! operators), so the algorithms favour accuracy and simplicity over blocking.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unitary plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
pub struct Givens<T> {
    pub c: T,
    pub s: Complex<T>,
}

impl<T: Real> Givens<T> {
    /// Rotation mapping `(x, y)` to `(r, 0)`.
    pub fn zeroing(x: Complex<T>, y: Complex<T>) -> Self {
        let ay = y.norm();
        if ay == T::zero() {
            return Self {
                c: T::one(),
                s: Complex::zero(),
            };
        }
        let ax = x.norm();
        if ax == T::zero() {
            return Self {
                c: T::zero(),
                s: y.conj() / ay,
            };
        }
        let r = ax.hypot(ay);
        let phase = x / ax;
        Self {
            c: ax / r,
            s: phase * y.conj() / r,
        }
    }

    /// `M ← G M` on rows `p, q`, columns `cols`.
    fn apply_rows(&self, m: &mut Matrix<T>, p: usize, q: usize, cols: std::ops::Range<usize>) {
        let c = Complex::new(self.c, T::zero());
        for j in cols {
            let a = m[(p, j)];
            let b = m[(q, j)];
            m[(p, j)] = c * a + self.s * b;
            m[(q, j)] = -self.s.conj() * a + c * b;
        }
    }

    /// `M ← M G*` on columns `p, q`, rows `rows`.
    fn apply_cols(&self, m: &mut Matrix<T>, p: usize, q: usize, rows: std::ops::Range<usize>) {
        let c = Complex::new(self.c, T::zero());
        for i in rows {
            let a = m[(i, p)];
            let b = m[(i, q)];
            m[(i, p)] = a * c + b * self.s.conj();
            m[(i, q)] = -a * self.s + b * c;
        }
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    odd: bool,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().partial_cmp(&lu[(j, k)].norm()).unwrap())
                .unwrap();
            if lu[(p, k)].is_zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let t = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * t;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            odd,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex<T> {
        if self.singular {
            return Complex::zero();
        }
        let d = self.lu.diagonal().into_iter().fold(Complex::one(), |acc, z| acc * z);
        if self.odd {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if self.singular {
            return Err(Error::Singular { rcond: 0.0 });
        }
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!("rhs of length {} for n={n}", b.len())));
        }
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[(i, k)] * x[k];
                x[i] = x[i] - t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.lu[(i, k)] * x[k];
                x[i] = x[i] - t;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve(&b.column(j))?);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        self.solve_matrix(&Matrix::identity(self.lu.rows()))
    }
}

/// Inverse together with the reciprocal 1-norm condition number.
pub fn inverse_with_rcond<T: Real>(a: &Matrix<T>) -> Result<(Matrix<T>, T)> {
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Err(Error::Singular { rcond: 0.0 });
    }
    let inv = lu.inverse()?;
    if !inv.is_finite() {
        return Err(Error::Singular { rcond: 0.0 });
    }
    let denom = a.norm_one() * inv.norm_one();
    let rcond = if denom > T::zero() { T::one() / denom } else { T::zero() };
    Ok((inv, rcond))
}

/// Inverse gated by `rcond ≥ rank_cut`.
pub fn inverse_checked<T: Real>(a: &Matrix<T>, rank_cut: T) -> Result<Matrix<T>> {
    if a.rows() == 0 && a.is_square() {
        return Ok(Matrix::zeros(0, 0));
    }
    let (inv, rcond) = inverse_with_rcond(a)?;
    if rcond < rank_cut {
        return Err(Error::Singular { rcond: rcond.as_f64() });
    }
    Ok(inv)
}

pub fn det<T: Real>(a: &Matrix<T>) -> Result<Complex<T>> {
    if a.rows() == 0 && a.is_square() {
        return Ok(Complex::one());
    }
    Ok(Lu::new(a)?.det())
}

/// Singular value decomposition `A = U Σ V*` from one-sided Jacobi.
///
/// `sigma` has one entry per column of `A`, sorted descending; `v` is square
/// unitary. Columns of `u` belonging to zero singular values are left zero.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut v = Matrix::identity(n);
        let eps = T::epsilon();
        let max_sweeps = 80;
        let mut converged = n < 2;
        // columns at rounding level are final; rotating them never converges
        let floor = {
            let f = eps * a.norm_fro();
            f * f
        };
        for _ in 0..max_sweeps {
            if converged {
                break;
            }
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = Complex::<T>::zero();
                    for i in 0..m {
                        let wp = w[(i, p)];
                        let wq = w[(i, q)];
                        alpha = alpha + wp.norm_sqr();
                        beta = beta + wq.norm_sqr();
                        gamma = gamma + wp.conj() * wq;
                    }
                    let g = gamma.norm();
                    if g == T::zero() || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (g + g);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let t = if zeta == T::zero() { T::one() } else { t };
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = cs * t;
                    let c = Complex::new(cs, T::zero());
                    let s_conj_phase = phase.conj() * sn;
                    let s_phase = phase * sn;
                    for i in 0..m {
                        let a = w[(i, p)];
                        let b = w[(i, q)];
                        w[(i, p)] = c * a - s_conj_phase * b;
                        w[(i, q)] = s_phase * a + c * b;
                    }
                    for i in 0..n {
                        let a = v[(i, p)];
                        let b = v[(i, q)];
                        v[(i, p)] = c * a - s_conj_phase * b;
                        v[(i, q)] = s_phase * a + c * b;
                    }
                }
            }
            converged = !rotated;
        }
        if !converged {
            return Err(Error::IterationFailure { iterations: max_sweeps });
        }
        let norms: Vec<T> = (0..n)
            .map(|j| (0..m).fold(T::zero(), |acc, i| acc + w[(i, j)].norm_sqr()).sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
        let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
        let v_sorted = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
        let u = Matrix::from_fn(m, n, |i, k| {
            let s = norms[order[k]];
            if s > T::zero() {
                w[(i, order[k])] / s
            } else {
                Complex::zero()
            }
        });
        Ok(Self { u, sigma, v: v_sorted })
    }

    pub fn max_singular(&self) -> T {
        self.sigma.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values strictly above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.sigma.iter().filter(|&&s| s > threshold).count()
    }

    /// Whether any singular value lies within a factor of ten of `threshold`.
    pub fn straddles(&self, threshold: T) -> bool {
        let ten = T::lit(10.0);
        self.sigma.iter().any(|&s| s > threshold / ten && s <= threshold * ten)
    }

    /// Orthonormal basis (as columns) of the right null space at `threshold`.
    pub fn null_space(&self, threshold: T) -> Matrix<T> {
        let r = self.rank(threshold);
        let n = self.v.rows();
        self.v.block(0, r, n, n - r)
    }

    /// Minimum-norm least-squares solution, truncating singular values at `threshold`.
    pub fn solve(&self, b: &[Complex<T>], threshold: T) -> Vec<Complex<T>> {
        let n = self.v.rows();
        let mut x = vec![Complex::zero(); n];
        for (k, &s) in self.sigma.iter().enumerate() {
            if s <= threshold {
                break;
            }
            let coeff = (0..self.u.rows()).fold(Complex::zero(), |acc, i| acc + self.u[(i, k)].conj() * b[i]) / s;
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = *xi + self.v[(i, k)] * coeff;
            }
        }
        x
    }
}

/// Orthonormal basis of the orthogonal complement of the column span of `x`,
/// assuming `x` has full column rank.
pub fn orthogonal_complement<T: Real>(x: &Matrix<T>) -> Result<Matrix<T>> {
    let n = x.rows();
    let k = x.cols();
    if k >= n {
        return Ok(Matrix::zeros(n, 0));
    }
    let svd = Svd::new(&x.adjoint())?;
    Ok(svd.v.block(0, k, n, n - k))
}

/// Complex Schur form `A = Q T Q*` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur<T> {
    pub q: Matrix<T>,
    pub t: Matrix<T>,
}

impl<T: Real> Schur<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Schur form of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let (mut h, mut q) = hessenberg(a);
        qr_iterate(&mut h, &mut q)?;
        Ok(Self { q, t: h })
    }

    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        self.t.diagonal()
    }

    /// Swaps the diagonal entries at `k` and `k + 1`.
    pub fn swap(&mut self, k: usize) {
        let n = self.t.rows();
        let a = self.t[(k, k)];
        let b = self.t[(k, k + 1)];
        let d = self.t[(k + 1, k + 1)];
        if b.is_zero() && a == d {
            return;
        }
        let g = Givens::zeroing(b, d - a);
        g.apply_rows(&mut self.t, k, k + 1, 0..n);
        g.apply_cols(&mut self.t, k, k + 1, 0..n);
        g.apply_cols(&mut self.q, k, k + 1, 0..n);
        self.t[(k + 1, k)] = Complex::zero();
        self.t[(k, k)] = d;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Moves the selected diagonal entries to the trailing positions,
    /// preserving relative order within each group.
    pub fn reorder_to_end(&mut self, selected: &[bool]) {
        let n = self.t.rows();
        assert_eq!(selected.len(), n, "selection length mismatch");
        let mut sel = selected.to_vec();
        loop {
            let mut moved = false;
            for k in 0..n.saturating_sub(1) {
                if sel[k] && !sel[k + 1] {
                    self.swap(k);
                    sel.swap(k, k + 1);
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }
}

fn hessenberg<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = super::matrix::vector::norm(&x);
        if xnorm == T::zero() {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.is_zero() { Complex::one() } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] = v[0] - alpha;
        let vnorm = super::matrix::vector::norm(&v);
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        let two = Complex::new(T::lit(2.0), T::zero());
        // H ← (I − 2vv*) H on rows k+1..n
        for j in 0..n {
            let s = (0..v.len()).fold(Complex::zero(), |acc, i| acc + v[i].conj() * h[(k + 1 + i, j)]);
            for i in 0..v.len() {
                h[(k + 1 + i, j)] = h[(k + 1 + i, j)] - two * v[i] * s;
            }
        }
        // H ← H (I − 2vv*), Q ← Q (I − 2vv*) on columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s = (0..v.len()).fold(Complex::zero(), |acc, j| acc + m[(i, k + 1 + j)] * v[j]);
                for j in 0..v.len() {
                    m[(i, k + 1 + j)] = m[(i, k + 1 + j)] - two * s * v[j].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    (h, q)
}

fn qr_iterate<T: Real>(h: &mut Matrix<T>, q: &mut Matrix<T>) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let hnorm = h.norm_fro();
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == T::zero() {
                diag = hnorm;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = Complex::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::IterationFailure { iterations: total });
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift
            d + Complex::new(T::lit(0.75) * c.norm(), T::lit(0.4) * c.norm())
        } else {
            let half = T::lit(0.5);
            let tr = (a + d) * half;
            let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
            let l1 = tr + disc;
            let l2 = tr - disc;
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_rows(h, k, k + 1, k..n);
            h[(k + 1, k)] = Complex::zero();
            rots.push(g);
        }
        for (idx, g) in rots.iter().enumerate() {
            let k = lo + idx;
            g.apply_cols(h, k, k + 1, 0..(k + 2).min(hi + 1));
            g.apply_cols(q, k, k + 1, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    // clean the strictly lower part
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex::zero();
        }
    }
    Ok(())
}

/// Solves `T₁ X − X T₂ = C` for upper triangular `T₁` (p×p) and `T₂` (q×q).
pub fn solve_triangular_sylvester<T: Real>(t1: &Matrix<T>, t2: &Matrix<T>, rhs: &Matrix<T>) -> Result<Matrix<T>> {
    let p = t1.rows();
    let q = t2.rows();
    if rhs.rows() != p || rhs.cols() != q {
        return Err(Error::DimensionMismatch("triangular Sylvester right-hand side".into()));
    }
    let mut x = Matrix::zeros(p, q);
    for j in 0..q {
        let mut col: Vec<Complex<T>> = rhs.column(j);
        for k in 0..j {
            let t = t2[(k, j)];
            if t.is_zero() {
                continue;
            }
            for (i, ci) in col.iter_mut().enumerate() {
                *ci = *ci + x[(i, k)] * t;
            }
        }
        let shift = t2[(j, j)];
        for i in (0..p).rev() {
            let mut s = col[i];
            for k in i + 1..p {
                s = s - t1[(i, k)] * x[(k, j)];
            }
            let denom = t1[(i, i)] - shift;
            if denom.is_zero() {
                return Err(Error::Singular { rcond: 0.0 });
            }
            x[(i, j)] = s / denom;
        }
    }
    Ok(x)
}

/// Solves the general Sylvester equation `A X − X B = C` through Schur forms.
pub fn solve_sylvester<T: Real>(a: &Matrix<T>, b: &Matrix<T>, rhs: &Matrix<T>) -> Result<Matrix<T>> {
    let sa = Schur::new(a)?;
    let sb = Schur::new(b)?;
    let f = &(&sa.q.adjoint() * rhs) * &sb.q;
    let y = solve_triangular_sylvester(&sa.t, &sb.t, &f)?;
    Ok(&(&sa.q * &y) * &sb.q.adjoint())
}

/// Inverse of an upper triangular matrix by back substitution.
pub fn upper_triangular_inverse<T: Real>(r: &Matrix<T>) -> Result<Matrix<T>> {
    let n = r.rows();
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        if r[(j, j)].is_zero() {
            return Err(Error::Singular { rcond: 0.0 });
        }
        x[(j, j)] = Complex::<T>::one() / r[(j, j)];
        for i in (0..j).rev() {
            let mut s = Complex::<T>::zero();
            for k in i + 1..=j {
                s = s + r[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = -s / r[(i, i)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sample() -> Matrix<f64> {
        Matrix::from_fn(4, 4, |i, j| {
            let x = (i * 7 + j * 3) as f64;
            c((x * 0.37).sin() + if i == j { 2.0 } else { 0.0 }, (x * 0.11).cos())
        })
    }

    #[test]
    fn lu_inverse_and_det() {
        let a = sample();
        let (inv, rcond) = inverse_with_rcond(&a).unwrap();
        assert!(rcond > 1e-6);
        assert!((&a * &inv).dist(&Matrix::identity(4)) < 1e-12);
        let d = det(&Matrix::<f64>::from_real_rows(&[&[2.0, 1.0], &[4.0, 3.0]])).unwrap();
        assert!((d - c(2.0, 0.0)).norm() < 1e-14);
        let sing = Matrix::<f64>::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(inverse_checked(&sing, 1e-10).is_err());
    }

    #[test]
    fn svd_reconstructs() {
        let a = sample();
        let svd = Svd::new(&a).unwrap();
        let s = Matrix::diag(&svd.sigma.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let back = &(&svd.u * &s) * &svd.v.adjoint();
        assert!(back.dist(&a) < 1e-12);
        assert!((&svd.v.adjoint() * &svd.v).dist(&Matrix::identity(4)) < 1e-12);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_null_space_of_wide_matrix() {
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 1.0, 0.0]]);
        let svd = Svd::new(&a).unwrap();
        let ns = svd.null_space(1e-12);
        assert_eq!(ns.cols(), 2);
        assert!((&a * &ns).norm_fro() < 1e-14);
    }

    #[test]
    fn schur_is_unitary_triangularization() {
        let a = sample();
        let s = Schur::new(&a).unwrap();
        assert!(s.t.is_upper_triangular());
        let back = &(&s.q * &s.t) * &s.q.adjoint();
        assert!(back.dist(&a) < 1e-12);
    }

    #[test]
    fn schur_of_rotation_has_complex_pair() {
        let a = Matrix::<f64>::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let mut ev = Schur::new(&a).unwrap().eigenvalues();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn reorder_moves_selection_last() {
        let a = Matrix::<f64>::from_real_rows(&[&[1.0, 2.0, 3.0], &[0.0, 4.0, 5.0], &[0.0, 0.0, 6.0]]);
        let mut s = Schur::new(&a).unwrap();
        let sel: Vec<bool> = s.eigenvalues().iter().map(|z| (z.re - 1.0).abs() < 1e-9).collect();
        s.reorder_to_end(&sel);
        assert!((s.t[(2, 2)] - c(1.0, 0.0)).norm() < 1e-12);
        let back = &(&s.q * &s.t) * &s.q.adjoint();
        assert!(back.dist(&a) < 1e-12);
    }

    #[test]
    fn sylvester_matches_definition() {
        let a = Matrix::<f64>::from_real_rows(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let b = Matrix::<f64>::from_real_rows(&[&[1.0, 0.5], &[-0.5, 1.0]]);
        let rhs = sample().block(0, 0, 2, 2);
        let x = solve_sylvester(&a, &b, &rhs).unwrap();
        assert!((&(&a * &x) - &(&x * &b)).dist(&rhs) < 1e-12);
    }
}
