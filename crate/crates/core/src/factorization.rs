//! Factorizations of affine maps into two, three or four coninvolutions.
//!
//! Every pipeline ends in a [`Certificate`] whose residuals are recomputed
//! from the returned factors; a certificate that misses the tolerance is
//! never returned.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::decomp::{inverse_with_rcond, orthogonal_complement};
use crate::linalg::{
    affine_compose, consimilarity_transform, det_modulus, group_conjugate, inverse_checked, is_coninvolution,
    product_residual, vector, Affine, Lu, Matrix, Svd, Tolerance,
};
use crate::reversibility::{
    coninvolutory_reverser, is_c_reversible_affine, is_c_reversible_matrix, pair_from_reverser, transport_reverser,
    ReverserWitness,
};
use crate::scalar::Real;
use crate::spectral::{are_similar, exp_translation_factor, is_unipotent, split_at_one, weyr_sequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Two,
    Three,
    Four,
}

impl Kind {
    pub fn factor_count(self) -> usize {
        match self {
            Kind::Two => 2,
            Kind::Three => 3,
            Kind::Four => 4,
        }
    }

    pub fn from_count(n: usize) -> Option<Self> {
        match n {
            2 => Some(Kind::Two),
            3 => Some(Kind::Three),
            4 => Some(Kind::Four),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Two => "two",
            Kind::Three => "three",
            Kind::Four => "four",
        }
    }
}

/// Factors `g = f₁ ∘ ⋯ ∘ f_k` with the residuals measured at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub input: Affine<T>,
    pub factors: Vec<Affine<T>>,
    pub kind: Kind,
    /// See [`product_residual`].
    pub residual_product: T,
    /// Worst coninvolution residual per factor.
    pub residual_factors: Vec<T>,
    pub provenance: Vec<String>,
}

impl<T: Real> Certificate<T> {
    /// Measures the residuals of `factors` against `input` without gating.
    pub fn new(input: Affine<T>, factors: Vec<Affine<T>>, provenance: Vec<String>, tol: &Tolerance<T>) -> Result<Self> {
        let kind = Kind::from_count(factors.len())
            .ok_or_else(|| Error::DimensionMismatch(format!("{} factors", factors.len())))?;
        let residual_product = product_residual(&input, &factors)?;
        let residual_factors = factors.iter().map(|f| is_coninvolution(f, tol).worst()).collect();
        Ok(Self {
            input,
            factors,
            kind,
            residual_product,
            residual_factors,
            provenance,
        })
    }

    /// Rejects the certificate unless every residual is within `residual_rel`.
    pub fn sealed(self, tol: &Tolerance<T>) -> Result<Self> {
        for (i, &r) in self.residual_factors.iter().enumerate() {
            if !(r <= tol.residual_rel) {
                return Err(Error::CertificateRejected {
                    identity: format!("factor {} is a coninvolution", i + 1),
                    residual: r.as_f64(),
                });
            }
        }
        if !(self.residual_product <= tol.residual_rel) {
            return Err(Error::CertificateRejected {
                identity: "product reproduces the input".into(),
                residual: self.residual_product.as_f64(),
            });
        }
        Ok(self)
    }

    pub fn worst_residual(&self) -> T {
        self.residual_factors
            .iter()
            .fold(self.residual_product, |acc, &r| acc.max(r))
    }
}

fn one<T: Real>() -> Complex<T> {
    Complex::one()
}

fn unimodular<T: Real>(theta: f64) -> Complex<T> {
    Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
}

/// `k g k⁻¹ = (T ⊕ U, 0 ⊕ v_U)` with `1 ∉ σ(T)` and `U` unipotent.
#[derive(Debug, Clone)]
pub struct NormalForm<T> {
    pub k: Affine<T>,
    pub t: Matrix<T>,
    pub u: Matrix<T>,
    pub v_u: Vec<Complex<T>>,
}

impl<T: Real> NormalForm<T> {
    pub fn map(&self) -> Affine<T> {
        let mut v = vec![Complex::zero(); self.t.rows()];
        v.extend_from_slice(&self.v_u);
        Affine {
            linear: self.t.direct_sum(&self.u),
            translation: v,
        }
    }
}

pub fn normal_form<T: Real>(g: &Affine<T>, tol: &Tolerance<T>) -> Result<NormalForm<T>> {
    inverse_checked(&g.linear, tol.rank_cut)?;
    let split = split_at_one(&g.linear, tol)?;
    let (kt, _) = split.sizes();
    let y = split.p.mul_vec(&g.translation);
    let mut shift = vec![Complex::zero(); g.dim()];
    if kt > 0 {
        // v + (I − T) t = 0 on the T-block
        let lu = Lu::new(&(&Matrix::identity(kt) - &split.t))?;
        let z = lu.solve(&y[..kt])?;
        for (s, zi) in shift.iter_mut().zip(z) {
            *s = -zi;
        }
    }
    Ok(NormalForm {
        k: Affine::new(split.p.clone(), shift)?,
        v_u: y[kt..].to_vec(),
        t: split.t,
        u: split.u,
    })
}

/// Strong reverser `(B, w)` of `exp(J(0, n), x)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointWitness<T> {
    pub b: Matrix<T>,
    pub w: Vec<Complex<T>>,
    pub a: Complex<T>,
    pub signs: Vec<i8>,
}

/// With `ε_k = (−1)^{k+1}`: `a = −ε_n x̄_n / x_n` (or 1 when `x_n = 0`),
/// `B = diag(ε_k a)`, `w₁ = 0`, `w_{k+1} = −(ε_k a x_k + x̄_k)`.
///
/// Then `B N B⁻¹ = −N̄`, `B B̄ = I`, `B x + x̄ = −N̄ w` and `B w̄ + w = 0`
/// for `N = J(0, n)`.
pub fn adjoint_witness<T: Real>(x: &[Complex<T>]) -> AdjointWitness<T> {
    let n = x.len();
    let signs: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
    let eps = |i: usize| Complex::new(T::from_i8(signs[i]).unwrap(), T::zero());
    let a = match x.last() {
        Some(&xn) if !xn.is_zero() => {
            let a = -eps(n - 1) * xn.conj() / xn;
            a / a.norm()
        }
        _ => one(),
    };
    let mut w = vec![Complex::zero(); n];
    for i in 0..n.saturating_sub(1) {
        w[i + 1] = -(eps(i) * a * x[i] + x[i].conj());
    }
    let diag: Vec<Complex<T>> = (0..n).map(|i| eps(i) * a).collect();
    AdjointWitness {
        b: Matrix::diag(&diag),
        w,
        a,
        signs,
    }
}

/// One Jordan chain of `N`: columns `s₁, …, s_m` of unit norm with
/// `N s_{i+1} = e_i s_i` and `N s₁ = 0`.
struct Chain<T> {
    vectors: Vec<Vec<Complex<T>>>,
    weights: Vec<T>,
}

fn normalize_phase<T: Real>(h: &mut [Complex<T>]) {
    let norm = vector::norm(h);
    if norm == T::zero() {
        return;
    }
    let big = h
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    let phase = big.conj() / big.norm();
    for z in h.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Jordan chains of a nilpotent `N` from nested kernels of its powers,
/// sized by the Weyr sequence.
fn jordan_chains<T: Real>(nm: &Matrix<T>, threshold: T) -> Result<Vec<Chain<T>>> {
    let n = nm.rows();
    let scale = nm.norm_fro();
    if scale == T::zero() {
        return Ok((0..n)
            .map(|i| {
                let mut e = vec![Complex::zero(); n];
                e[i] = one();
                Chain {
                    vectors: vec![e],
                    weights: Vec::new(),
                }
            })
            .collect());
    }
    let weyr = weyr_sequence(nm, threshold)?;
    if weyr.ambiguous || weyr.total() != n {
        return Err(Error::NotUnipotent);
    }
    let nu = &weyr.nullities;
    let p = nu.len();
    let unit = nm.scale_real(T::one() / scale);
    let mut kernels: Vec<Matrix<T>> = vec![Matrix::zeros(n, 0)];
    let mut power = Matrix::identity(n);
    let mut dim = 0;
    for &count in nu {
        power = &power * &unit;
        dim += count;
        let svd = Svd::new(&power)?;
        kernels.push(svd.v.block(0, n - dim, n, dim));
    }

    let mut chains: Vec<Chain<T>> = Vec::new();
    for level in (1..=p).rev() {
        let needed = nu[level - 1] - nu.get(level).copied().unwrap_or(0);
        if needed == 0 {
            continue;
        }
        let mut span: Vec<Vec<Complex<T>>> = (0..kernels[level - 1].cols())
            .map(|j| kernels[level - 1].column(j))
            .collect();
        for ch in &chains {
            if ch.vectors.len() > level {
                span.push(ch.vectors[level - 1].clone());
            }
        }
        let complement = if span.is_empty() {
            Matrix::identity(n)
        } else {
            orthogonal_complement(&Matrix::from_columns(n, &span))?
        };
        let projected = &complement.adjoint() * &kernels[level];
        let svd = Svd::new(&projected)?;
        if svd.sigma.len() < needed || svd.sigma[needed - 1] <= T::zero() {
            return Err(Error::IllConditioned("Jordan chain heads are dependent".into()));
        }
        for i in 0..needed {
            let mut head = complement.mul_vec(&svd.u.column(i));
            normalize_phase(&mut head);
            let mut vectors = vec![head];
            let mut weights = Vec::new();
            for _ in 1..level {
                let next = nm.mul_vec(vectors.last().unwrap());
                let e = vector::norm(&next);
                if e == T::zero() {
                    return Err(Error::IllConditioned("Jordan chain broke off early".into()));
                }
                weights.push(e);
                vectors.push(vector::scale(&next, Complex::new(T::one() / e, T::zero())));
            }
            vectors.reverse();
            weights.reverse();
            chains.push(Chain { vectors, weights });
        }
    }
    Ok(chains)
}

fn unipotent_threshold<T: Real>(u: &Matrix<T>, nm: &Matrix<T>, tol: &Tolerance<T>) -> T {
    let s = u.norm_fro().max(nm.norm_fro());
    tol.rank_cut * if s > T::zero() { s } else { T::one() }
}

/// Strong reverser of one block `(I + E, y)` with `E` the superdiagonal of
/// chain weights, returned as `(linear, translation)`.
fn block_reverser<T: Real>(
    weights: &[T],
    y: &[Complex<T>],
    tol: &Tolerance<T>,
) -> Result<(Matrix<T>, Vec<Complex<T>>)> {
    let m = y.len();
    // I + E = D⁻¹ J(1, m) D
    let mut d = vec![T::one(); m];
    for i in 1..m {
        d[i] = d[i - 1] * weights[i - 1];
    }
    let d_mat = Matrix::diag(&d.iter().map(|&x| Complex::new(x, T::zero())).collect::<Vec<_>>());
    let n0 = Matrix::jordan_block(Complex::zero(), m);
    let c = exp_translation_factor(&n0);
    // exp N − I = N C; Krylov chain K with exp(N) K = K J(1, m)
    let step = &n0 * &c;
    let mut cols = vec![vec![Complex::zero(); m]; m];
    cols[m - 1][m - 1] = one();
    for j in (0..m - 1).rev() {
        cols[j] = step.mul_vec(&cols[j + 1]);
    }
    let k = Matrix::from_columns(m, &cols);
    let c_inv = inverse_checked(&c, tol.rank_cut)?;
    let x = c_inv.mul_vec(&k.mul_vec(&d_mat.mul_vec(y)));
    let aw = adjoint_witness(&x);
    // R = D⁻¹ K⁻¹ is real
    let k_inv = inverse_checked(&k, tol.rank_cut)?;
    let d_inv = Matrix::diag(
        &d.iter()
            .map(|&x| Complex::new(T::one() / x, T::zero()))
            .collect::<Vec<_>>(),
    );
    let r = &d_inv * &k_inv;
    let r_inv = &k * &d_mat;
    Ok((&(&r * &aw.b) * &r_inv, r.mul_vec(&aw.w)))
}

/// Strong reverser of `(U, v)` for unipotent `U`.
fn unipotent_reverser<T: Real>(
    u: &Matrix<T>,
    v: &[Complex<T>],
    tol: &Tolerance<T>,
) -> Result<(ReverserWitness<T>, Vec<usize>)> {
    let g = Affine::new(u.clone(), v.to_vec())?;
    let n = u.rows();
    if n == 0 {
        return Ok((ReverserWitness::measure(&g, Affine::identity(0), tol)?, Vec::new()));
    }
    if !is_unipotent(u, tol)? {
        return Err(Error::NotUnipotent);
    }
    let nm = u.shift(one());
    let chains = jordan_chains(&nm, unipotent_threshold(u, &nm, tol))?;
    let cols: Vec<Vec<Complex<T>>> = chains.iter().flat_map(|c| c.vectors.iter().cloned()).collect();
    let s = Matrix::from_columns(n, &cols);
    let (s_inv, rcond) = inverse_with_rcond(&s)?;
    if rcond < tol.rank_cut {
        return Err(Error::IllConditioned(format!(
            "Jordan chain basis has reciprocal condition {:e}",
            rcond.as_f64()
        )));
    }
    let y = s_inv.mul_vec(v);
    let mut lin = Matrix::zeros(n, n);
    let mut trans = vec![Complex::zero(); n];
    let mut off = 0;
    let mut sizes = Vec::with_capacity(chains.len());
    for ch in &chains {
        let m = ch.vectors.len();
        let (bl, bw) = block_reverser(&ch.weights, &y[off..off + m], tol)?;
        lin.set_block(off, off, &bl);
        trans[off..off + m].copy_from_slice(&bw);
        off += m;
        sizes.push(m);
    }
    let sbar = s.conj();
    let h = Affine::new(&(&sbar * &lin) * &s_inv, sbar.mul_vec(&trans))?;
    Ok((ReverserWitness::measure(&g, h, tol)?, sizes))
}

/// `(U, v) = g₁ g₂` with coninvolutions `gᵢ`, for unipotent `U`.
pub fn two_factor_unipotent<T: Real>(u: &Matrix<T>, v: &[Complex<T>], tol: &Tolerance<T>) -> Result<Certificate<T>> {
    tol.validate()?;
    let g = Affine::new(u.clone(), v.to_vec())?;
    let (h, sizes) = unipotent_reverser(u, v, tol)?;
    let (g1, g2) = pair_from_reverser(&g, &h, tol)?;
    let provenance = vec![
        format!("jordan blocks {:?}", sizes),
        "adjoint witness per block, transported through the chain basis".to_string(),
        "pair from strong reverser".to_string(),
    ];
    Certificate::new(g, vec![g1, g2], provenance, tol)?.sealed(tol)
}

/// Strong reverser of a c-reversible `g`, assembled in normal form and
/// transported back.
fn strong_reverser<T: Real, R: Rng + ?Sized>(
    g: &Affine<T>,
    rng: &mut R,
    tol: &Tolerance<T>,
    provenance: &mut Vec<String>,
) -> Result<ReverserWitness<T>> {
    let nf = normal_form(g, tol)?;
    provenance.push(format!("normal_form: T {0}x{0}, U {1}x{1}", nf.t.rows(), nf.u.rows()));
    let h_t = if nf.t.rows() > 0 {
        let w = coninvolutory_reverser(&nf.t, rng, tol)?;
        provenance.push(format!(
            "coninvolutory_reverser on T: residual {:.3e}",
            w.residual_reverse.max(w.residual_coninv).as_f64()
        ));
        Affine::linear(w.reverser.linear)
    } else {
        Affine::identity(0)
    };
    let (h_u, sizes) = unipotent_reverser(&nf.u, &nf.v_u, tol)?;
    if !sizes.is_empty() {
        provenance.push(format!("unipotent jordan blocks {:?}", sizes));
    }
    let map = nf.map();
    let local = ReverserWitness::measure(&map, h_t.direct_sum(&h_u.reverser), tol)?;
    let k_inv = nf.k.inverse(tol)?;
    transport_reverser(&k_inv, &local, &map, tol)
}

/// `g = g₁ g₂` with coninvolutions `gᵢ`; exists iff `g` is c-reversible.
pub fn two_factor<T: Real, R: Rng + ?Sized>(g: &Affine<T>, rng: &mut R, tol: &Tolerance<T>) -> Result<Certificate<T>> {
    tol.validate()?;
    if !is_c_reversible_affine(g, tol)? {
        return Err(Error::CReversibilityRequired);
    }
    let mut provenance = Vec::new();
    let h = strong_reverser(g, rng, tol, &mut provenance)?;
    let (g1, g2) = pair_from_reverser(g, &h, tol)?;
    provenance.push("pair from strong reverser".to_string());
    Certificate::new(g.clone(), vec![g1, g2], provenance, tol)?.sealed(tol)
}

/// `h` with `h h̄⁻¹ = g` for a coninvolution `g`: `h = (μA + μ̄I, v/2)` with
/// random unimodular `μ`.
pub fn con_sqrt<T: Real, R: Rng + ?Sized>(g: &Affine<T>, rng: &mut R, tol: &Tolerance<T>) -> Result<Affine<T>> {
    tol.validate()?;
    let check = is_coninvolution(g, tol);
    if !check.holds {
        return Err(Error::NotConinvolution {
            linear: check.linear.as_f64(),
            translation: check.translation.as_f64(),
        });
    }
    let n = g.dim();
    let half = vector::scale(&g.translation, Complex::new(T::lit(0.5), T::zero()));
    let scale = T::one().max(g.norm());
    let mut last = f64::INFINITY;
    for _ in 0..tol.max_retries {
        let mu: Complex<T> = unimodular(rng.gen_range(0.0..2.0 * PI));
        let b = &g.linear.scale(mu) + &Matrix::identity(n).scale(mu.conj());
        match inverse_with_rcond(&b) {
            Ok((_, rcond)) if rcond >= tol.rank_cut => {}
            _ => continue,
        }
        let h = Affine::new(b, half.clone())?;
        let back = affine_compose(&h, &h.conj().inverse(tol)?)?;
        let r = back.dist(g) / scale;
        last = r.as_f64();
        if r <= tol.residual_rel {
            return Ok(h);
        }
    }
    Err(Error::RetriesExhausted {
        stage: "con_sqrt",
        attempts: tol.max_retries,
        last_residual: last,
    })
}

fn require_unimodular_det<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<()> {
    let modulus = det_modulus(a)?;
    if !((modulus - T::one()).abs() <= tol.residual_rel) {
        return Err(Error::DeterminantModulusNotOne {
            modulus: modulus.as_f64(),
        });
    }
    Ok(())
}

/// `g = (k⁻¹ g₁ k̄)(k̄⁻¹ g₂ k)(k⁻¹ k̄)` where `g₁ g₂ = k g k̄⁻¹`.
pub fn three_factor_with_witness<T: Real, R: Rng + ?Sized>(
    g: &Affine<T>,
    k: &Affine<T>,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<Certificate<T>> {
    tol.validate()?;
    require_unimodular_det(&g.linear, tol)?;
    let moved = consimilarity_transform(k, g, tol)?;
    if !is_c_reversible_affine(&moved, tol)? {
        return Err(Error::WitnessRejected("k g k̄⁻¹ is not c-reversible".into()));
    }
    let inner = two_factor(&moved, rng, tol)?;
    let k_inv = k.inverse(tol)?;
    let kbar = k.conj();
    let kbar_inv = kbar.inverse(tol)?;
    let f1 = affine_compose(&affine_compose(&k_inv, &inner.factors[0])?, &kbar)?;
    let f2 = affine_compose(&affine_compose(&kbar_inv, &inner.factors[1])?, k)?;
    let f3 = affine_compose(&k_inv, &kbar)?;
    let mut provenance = vec!["consimilarity by witness k".to_string()];
    provenance.extend(inner.provenance);
    provenance.push("factors transported by k⁻¹ and k̄⁻¹, third factor k⁻¹ k̄".to_string());
    Certificate::new(g.clone(), vec![f1, f2, f3], provenance, tol)?.sealed(tol)
}

/// `A` and `B` are consimilar iff `A Ā` and `B B̄` are similar.
pub fn are_consimilar<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    inverse_checked(a, tol.rank_cut)?;
    inverse_checked(b, tol.rank_cut)?;
    are_similar(&(a * &a.conj()), &(b * &b.conj()), tol)
}

fn random_unit_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    loop {
        let x: Vec<Complex<T>> = (0..n)
            .map(|_| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
            .collect();
        let norm = vector::norm(&x);
        if norm > T::lit(1e-3) {
            return vector::scale(&x, Complex::new(T::one() / norm, T::zero()));
        }
    }
}

fn scalar_deviation<T: Real>(t: &Matrix<T>) -> T {
    let n = t.rows();
    if n == 0 {
        return T::zero();
    }
    let mean = t.trace() / Complex::new(T::from_usize(n).unwrap(), T::zero());
    let scale = t.norm_fro();
    if scale == T::zero() {
        return T::zero();
    }
    t.shift(mean).norm_fro() / scale
}

/// Candidate draws per peeling step; the one with the smallest functional wins.
const PEEL_CANDIDATES: usize = 6;
/// Schur complements closer than this (relative) to a scalar are redrawn.
const SCALAR_MARGIN: f64 = 1e-2;

type Peeled<T> = (T, Matrix<T>, Matrix<T>, Matrix<T>);

fn peel<T: Real, R: Rng + ?Sized>(
    t: &Matrix<T>,
    betas: &[Complex<T>],
    gammas: &[Complex<T>],
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = t.rows();
    if n == 1 {
        return Ok((Matrix::diag(&[betas[0]]), Matrix::diag(&[t[(0, 0)] / betas[0]])));
    }
    let alpha = betas[0] * gammas[0];
    // (‖f‖, S, S⁻¹, S⁻¹ T S)
    let mut best: Option<Peeled<T>> = None;
    let mut draws = 0;
    while draws < tol.max_retries * PEEL_CANDIDATES {
        draws += 1;
        let x = random_unit_vector::<T, R>(n, rng);
        let tx = t.mul_vec(&x);
        // f with fᵀx = 1 and fᵀTx = β₁γ₁, minimum norm
        let m = Matrix::from_fn(2, n, |i, j| if i == 0 { x[j] } else { tx[j] });
        let svd = Svd::new(&m.adjoint())?;
        if svd.sigma.len() < 2 || svd.sigma[1] <= T::lit(1e-3) * svd.sigma[0] {
            continue;
        }
        let gram = Lu::new(&(&m * &m.adjoint()))?;
        let coeff = match gram.solve(&[one(), alpha]) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let f = m.adjoint().mul_vec(&coeff);
        let fnorm = vector::norm(&f);
        let z = orthogonal_complement(&Matrix::from_columns(n, &[vector::conj(&f)]))?;
        let mut s = Matrix::zeros(n, n);
        s.set_column(0, &x);
        s.set_block(0, 1, &z);
        let s_inv = match inverse_with_rcond(&s) {
            Ok((inv, rcond)) if rcond >= tol.rank_cut => inv,
            _ => continue,
        };
        let tp = &(&s_inv * t) * &s;
        let c = tp.block(1, 0, n - 1, 1);
        let r = tp.block(0, 1, 1, n - 1);
        let t2 = &tp.block(1, 1, n - 1, n - 1) - &(&c * &r).scale(one::<T>() / alpha);
        if n >= 3 && scalar_deviation(&t2) < T::lit(SCALAR_MARGIN) {
            continue;
        }
        if best.as_ref().is_none_or(|b| fnorm < b.0) {
            best = Some((fnorm, s, s_inv, tp));
        }
        if draws >= PEEL_CANDIDATES && best.is_some() {
            break;
        }
    }
    let (_, s, s_inv, tp) = best.ok_or(Error::RetriesExhausted {
        stage: "prescribed_spectrum_product",
        attempts: tol.max_retries,
        last_residual: f64::INFINITY,
    })?;
    let c = tp.block(1, 0, n - 1, 1);
    let r = tp.block(0, 1, 1, n - 1);
    let t2 = &tp.block(1, 1, n - 1, n - 1) - &(&c * &r).scale(one::<T>() / alpha);
    let (x1, y1) = peel(&t2, &betas[1..], &gammas[1..], rng, tol)?;
    let mut xp = Matrix::zeros(n, n);
    xp[(0, 0)] = betas[0];
    xp.set_block(1, 0, &c.scale(one::<T>() / gammas[0]));
    xp.set_block(1, 1, &x1);
    let mut yp = Matrix::zeros(n, n);
    yp[(0, 0)] = gammas[0];
    yp.set_block(0, 1, &r.scale(one::<T>() / betas[0]));
    yp.set_block(1, 1, &y1);
    Ok((&(&s * &xp) * &s_inv, &(&s * &yp) * &s_inv))
}

/// `T = X Y` with `σ(X) = {βᵢ}` and `σ(Y) = {γᵢ}`.
///
/// Peels one eigenvalue pair per step: in a basis `[x, ker fᵀ]` with
/// `fᵀx = 1`, `fᵀTx = β₁γ₁` the leading entry of `T` is `β₁γ₁`, and the
/// product of a lower and an upper block-triangular factor leaves the
/// Schur complement `T₁ − c r / (β₁γ₁)` for the remaining values.
pub fn prescribed_spectrum_product<T: Real, R: Rng + ?Sized>(
    t: &Matrix<T>,
    betas: &[Complex<T>],
    gammas: &[Complex<T>],
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    tol.validate()?;
    let n = t.rows();
    if !t.is_square() || betas.len() != n || gammas.len() != n {
        return Err(Error::DimensionMismatch(
            "prescription length must match the matrix".into(),
        ));
    }
    if n == 0 {
        return Ok((Matrix::zeros(0, 0), Matrix::zeros(0, 0)));
    }
    inverse_checked(t, tol.rank_cut)?;
    if n >= 2 && scalar_deviation(t) <= tol.residual_rel {
        return Err(Error::ScalarInput);
    }
    let det = crate::linalg::decomp::det(t)?;
    let prod = betas
        .iter()
        .zip(gammas)
        .fold(Complex::<T>::one(), |acc, (&b, &g)| acc * b * g);
    if (prod - det).norm() > tol.residual_rel * T::one().max(det.norm()) {
        return Err(Error::InvalidPrescription(format!(
            "product of prescribed values {:e} differs from det T",
            (prod - det).norm().as_f64()
        )));
    }
    for vals in [betas, gammas] {
        if vals.iter().any(|z| z.is_zero()) {
            return Err(Error::InvalidPrescription("zero eigenvalue".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (vals[i] - vals[j]).norm() <= tol.eig_cluster {
                    return Err(Error::InvalidPrescription("values are not pairwise distinct".into()));
                }
            }
        }
    }
    peel(t, betas, gammas, rng, tol)
}

/// Equally spaced unimodular values `e^{i(φ + 2πk/n)}` in random order.
fn spread_on_circle<T: Real, R: Rng + ?Sized>(n: usize, phi: f64, rng: &mut R) -> Vec<Complex<T>> {
    let mut vals: Vec<Complex<T>> = (0..n)
        .map(|k| unimodular(phi + 2.0 * PI * k as f64 / n as f64))
        .collect();
    vals.shuffle(rng);
    vals
}

/// `T = X Y` with both factors c-reversible, for `|det T| = 1`.
pub fn c_reversible_split<T: Real, R: Rng + ?Sized>(
    t: &Matrix<T>,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    tol.validate()?;
    require_unimodular_det(t, tol)?;
    let n = t.rows();
    if n == 0 || is_c_reversible_matrix(t, tol)? || scalar_deviation(t) <= tol.residual_rel {
        return Ok((t.clone(), Matrix::identity(n)));
    }
    let det = crate::linalg::decomp::det(t)?;
    let mut last = f64::INFINITY;
    for _ in 0..tol.max_retries {
        let betas: Vec<Complex<T>> = spread_on_circle(n, rng.gen_range(0.0..2.0 * PI), rng);
        let beta_prod = betas.iter().fold(Complex::<T>::one(), |acc, &b| acc * b);
        let target = det / beta_prod;
        let spacing = 2.0 * PI / n as f64;
        // Π e^{i(ψ + 2πk/n)} = e^{i(nψ + π(n−1))}
        let psi = (target.arg().as_f64() - PI * (n as f64 - 1.0)) / n as f64 + spacing * rng.gen_range(0..n) as f64;
        let mut gammas: Vec<Complex<T>> = spread_on_circle(n, psi, rng);
        let gamma_prod = gammas.iter().fold(Complex::<T>::one(), |acc, &g| acc * g);
        gammas[n - 1] = gammas[n - 1] * target / gamma_prod;
        let (x, y) = match prescribed_spectrum_product(t, &betas, &gammas, rng, tol) {
            Ok(p) => p,
            Err(Error::RetriesExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let r = (&x * &y).dist(t) / T::one().max(x.norm_fro() * y.norm_fro());
        last = r.as_f64();
        if r <= tol.residual_rel && is_c_reversible_matrix(&x, tol)? && is_c_reversible_matrix(&y, tol)? {
            return Ok((x, y));
        }
    }
    Err(Error::RetriesExhausted {
        stage: "c_reversible_split",
        attempts: tol.max_retries,
        last_residual: last,
    })
}

/// Splits the linear map `x` into two coninvolutions.
fn linear_pair<T: Real, R: Rng + ?Sized>(
    x: &Matrix<T>,
    rng: &mut R,
    tol: &Tolerance<T>,
) -> Result<(Affine<T>, Affine<T>)> {
    let g = Affine::linear(x.clone());
    let w = coninvolutory_reverser(x, rng, tol)?;
    pair_from_reverser(&g, &w, tol)
}

/// Carries the pair `a b` to `k a b k⁻¹` and re-extracts two coninvolutions
/// from the transported reverser `ā`.
fn transport_pair<T: Real>(
    k: &Affine<T>,
    a: &Affine<T>,
    b: &Affine<T>,
    tol: &Tolerance<T>,
) -> Result<(Affine<T>, Affine<T>)> {
    let p = affine_compose(a, b)?;
    let w = ReverserWitness::measure(&p, a.conj(), tol)?;
    let moved = transport_reverser(k, &w, &p, tol)?;
    pair_from_reverser(&group_conjugate(k, &p, tol)?, &moved, tol)
}

/// At most four coninvolutions with product `g`; requires `|det A| = 1`.
/// Falls back to two factors when `g` is already c-reversible.
pub fn four_factor<T: Real, R: Rng + ?Sized>(g: &Affine<T>, rng: &mut R, tol: &Tolerance<T>) -> Result<Certificate<T>> {
    tol.validate()?;
    require_unimodular_det(&g.linear, tol)?;
    if is_c_reversible_affine(g, tol)? {
        let mut cert = two_factor(g, rng, tol)?;
        cert.provenance
            .insert(0, "input is c-reversible: two factors suffice".into());
        return Ok(cert);
    }
    let mut provenance = Vec::new();
    let nf = normal_form(g, tol)?;
    let (kt, m) = (nf.t.rows(), nf.u.rows());
    provenance.push(format!("normal_form: T {kt}x{kt}, U {m}x{m}"));
    let (x, y) = c_reversible_split(&nf.t, rng, tol)?;
    provenance.push("c_reversible_split of T by prescribed unimodular spectra".to_string());
    let (t1, t2) = linear_pair(&x, rng, tol)?;
    let (t3, t4) = linear_pair(&y, rng, tol)?;
    let (hu, sizes) = unipotent_reverser(&nf.u, &nf.v_u, tol)?;
    let (u1, u2) = pair_from_reverser(&Affine::new(nf.u.clone(), nf.v_u.clone())?, &hu, tol)?;
    if !sizes.is_empty() {
        provenance.push(format!("unipotent jordan blocks {:?}", sizes));
    }
    let id = Affine::identity(m);
    let g1 = t1.direct_sum(&u1);
    let g2 = t2.direct_sum(&u2);
    let g3 = t3.direct_sum(&id);
    let g4 = t4.direct_sum(&id);
    let k_inv = nf.k.inverse(tol)?;
    let (f1, f2) = transport_pair(&k_inv, &g1, &g2, tol)?;
    let (f3, f4) = transport_pair(&k_inv, &g3, &g4, tol)?;
    provenance.push("pairs transported through the normal-form conjugation".to_string());
    Certificate::new(g.clone(), vec![f1, f2, f3, f4], provenance, tol)?.sealed(tol)
}
