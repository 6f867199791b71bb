//! Spectral machinery: eigenvalues, clustering, Jordan structure from rank
//! sequences, the split `A ~ T ⊕ U` at eigenvalue one, finite series for
//! nilpotent/unipotent matrices, and the principal inverse square root.

use std::collections::HashMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::decomp::{solve_triangular_sylvester, upper_triangular_inverse};
use crate::linalg::{Affine, Matrix, Schur, Svd, Tolerance};
use crate::scalar::Real;

/// Eigenvalues with multiplicity, from the complex Schur form.
pub fn eigenvalues<T: Real>(a: &Matrix<T>, _tol: &Tolerance<T>) -> Result<Vec<Complex<T>>> {
    Ok(Schur::new(a)?.eigenvalues())
}

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub representative: Complex<T>,
    pub multiplicity: usize,
}

fn lex_order<T: Real>(eigs: &[Complex<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..eigs.len()).collect();
    idx.sort_by(|&i, &j| {
        eigs[i]
            .re
            .partial_cmp(&eigs[j].re)
            .unwrap()
            .then(eigs[i].im.partial_cmp(&eigs[j].im).unwrap())
    });
    idx
}

/// Single-linkage groups at `radius`, as index lists. Groups are ordered by
/// their lexicographically smallest member.
fn single_linkage<T: Real>(eigs: &[Complex<T>], order: &[usize], radius: T) -> Vec<Vec<usize>> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for &i in order {
        let r = find(&mut parent, i);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn mean<T: Real>(eigs: &[Complex<T>], members: &[usize]) -> Complex<T> {
    let s = members.iter().fold(Complex::<T>::zero(), |acc, &i| acc + eigs[i]);
    s / Complex::new(T::from_usize(members.len()).unwrap(), T::zero())
}

/// Single-linkage clustering at radius `eig_cluster`; the representative is
/// the cluster mean. Deterministic after sorting by `(re, im)`.
pub fn cluster<T: Real>(eigs: &[Complex<T>], tol: &Tolerance<T>) -> Vec<Cluster<T>> {
    let order = lex_order(eigs);
    single_linkage(eigs, &order, tol.eig_cluster)
        .into_iter()
        .map(|g| Cluster {
            representative: mean(eigs, &g),
            multiplicity: g.len(),
        })
        .collect()
}

/// Nullities `ν_k = rank(M^{k-1}) − rank(M^k)` of `M = A − μI`, computed by
/// repeated unitary deflation of the numerical kernel. `ambiguous` is set
/// when some singular value lies within a factor of ten of `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weyr {
    pub nullities: Vec<usize>,
    pub ambiguous: bool,
}

impl Weyr {
    pub fn total(&self) -> usize {
        self.nullities.iter().sum()
    }

    /// Jordan block sizes (descending), or `None` when the sequence is not
    /// non-increasing.
    pub fn block_sizes(&self) -> Option<Vec<usize>> {
        let nu = &self.nullities;
        if nu.windows(2).any(|w| w[1] > w[0]) {
            return None;
        }
        let mut blocks = Vec::new();
        for (k, &count) in nu.iter().enumerate() {
            let next = nu.get(k + 1).copied().unwrap_or(0);
            for _ in 0..count - next {
                blocks.push(k + 1);
            }
        }
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        Some(blocks)
    }
}

pub fn weyr_sequence<T: Real>(m: &Matrix<T>, threshold: T) -> Result<Weyr> {
    let mut current = m.clone();
    let mut nullities = Vec::new();
    let mut ambiguous = false;
    while current.rows() > 0 {
        let svd = Svd::new(&current)?;
        ambiguous |= svd.straddles(threshold);
        let r = svd.rank(threshold);
        let nu = current.rows() - r;
        if nu == 0 {
            break;
        }
        nullities.push(nu);
        let range = svd.v.block(0, 0, current.rows(), r);
        current = &(&range.adjoint() * &current) * &range;
    }
    Ok(Weyr { nullities, ambiguous })
}

fn weyr_threshold<T: Real>(a: &Matrix<T>, shifted: &Matrix<T>, tol: &Tolerance<T>) -> T {
    let scale = a.norm_fro().max(shifted.norm_fro());
    let scale = if scale > T::zero() { scale } else { T::one() };
    tol.rank_cut * scale
}

/// Rank sequence `r_k = rank((A − λI)^k)`, `k = 0..=n`.
pub fn rank_sequence<T: Real>(a: &Matrix<T>, lambda: Complex<T>, tol: &Tolerance<T>) -> Result<Vec<usize>> {
    let n = a.rows();
    let m = a.shift(lambda);
    let w = weyr_sequence(&m, weyr_threshold(a, &m, tol))?;
    if w.ambiguous {
        return Err(Error::IllConditioned("singular values straddle the rank cut".into()));
    }
    let mut seq = vec![n];
    for k in 0..n {
        let nu = w.nullities.get(k).copied().unwrap_or(0);
        seq.push(seq[k] - nu);
    }
    Ok(seq)
}

/// One eigenvalue cluster with its Jordan block sizes (descending).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanCluster<T> {
    pub eigenvalue: Complex<T>,
    pub blocks: Vec<usize>,
}

impl<T> JordanCluster<T> {
    pub fn multiplicity(&self) -> usize {
        self.blocks.iter().sum()
    }
}

/// Similarity invariant: eigenvalue clusters with Jordan block multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure<T> {
    pub clusters: Vec<JordanCluster<T>>,
}

impl<T: Real> JordanStructure<T> {
    pub fn dim(&self) -> usize {
        self.clusters.iter().map(JordanCluster::multiplicity).sum()
    }

    /// Cluster whose representative lies within `radius` of `lambda`.
    pub fn find(&self, lambda: Complex<T>, radius: T) -> Option<&JordanCluster<T>> {
        self.clusters
            .iter()
            .filter(|c| (c.eigenvalue - lambda).norm() <= radius)
            .min_by(|a, b| {
                (a.eigenvalue - lambda)
                    .norm()
                    .partial_cmp(&(b.eigenvalue - lambda).norm())
                    .unwrap()
            })
    }

    /// Equality up to pairing representatives within `eig_cluster` (relative
    /// to `max(1, |λ|)`).
    pub fn matches(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        if self.clusters.len() != other.clusters.len() || self.dim() != other.dim() {
            return false;
        }
        self.clusters.iter().all(|c| {
            let radius = tol.eig_cluster * T::one().max(c.eigenvalue.norm());
            other.find(c.eigenvalue, radius).is_some_and(|d| d.blocks == c.blocks)
        })
    }

    /// Image under `λ ↦ f(λ)` with blocks kept.
    pub fn map_eigenvalues(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            clusters: self
                .clusters
                .iter()
                .map(|c| JordanCluster {
                    eigenvalue: f(c.eigenvalue),
                    blocks: c.blocks.clone(),
                })
                .collect(),
        }
    }
}

/// Jordan structure from rank sequences.
///
/// Computed eigenvalues of a defective block spread like `ε^{1/m}`, so a
/// fixed radius cannot group them. Candidate partitions are the levels of the
/// single-linkage dendrogram above `eig_cluster`; a cluster is accepted when
/// the total nullity of `A − μI` at its mean `μ` equals its size, and the
/// coarsest partition in which every cluster is accepted wins.
pub fn jordan_structure<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<JordanStructure<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "Jordan structure of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(JordanStructure { clusters: Vec::new() });
    }
    let eigs = eigenvalues(a, tol)?;
    let order = lex_order(&eigs);

    let mut radii = vec![tol.eig_cluster];
    for i in 0..n {
        for j in i + 1..n {
            let d = (eigs[i] - eigs[j]).norm();
            if d > tol.eig_cluster {
                radii.push(d);
            }
        }
    }
    radii.sort_by(|x, y| x.partial_cmp(y).unwrap());
    radii.dedup();

    let mut partitions: Vec<Vec<Vec<usize>>> = Vec::new();
    for &r in &radii {
        let p = single_linkage(&eigs, &order, r);
        if partitions.last() != Some(&p) {
            partitions.push(p);
        }
    }

    let mut cache: HashMap<Vec<usize>, Option<Vec<usize>>> = HashMap::new();
    let mut validate = |members: &Vec<usize>| -> Result<Option<Vec<usize>>> {
        let mut key = members.clone();
        key.sort_unstable();
        if let Some(v) = cache.get(&key) {
            return Ok(v.clone());
        }
        let mu = mean(&eigs, members);
        let m = a.shift(mu);
        let w = weyr_sequence(&m, weyr_threshold(a, &m, tol))?;
        let blocks = if w.ambiguous || w.total() != members.len() {
            None
        } else {
            w.block_sizes()
        };
        cache.insert(key, blocks.clone());
        Ok(blocks)
    };

    for partition in partitions.iter().rev() {
        let mut clusters = Vec::with_capacity(partition.len());
        let mut ok = true;
        for members in partition {
            match validate(members)? {
                Some(blocks) => clusters.push(JordanCluster {
                    eigenvalue: mean(&eigs, members),
                    blocks,
                }),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(JordanStructure { clusters });
        }
    }
    Err(Error::IllConditioned(
        "no eigenvalue clustering is consistent with the numerical ranks".into(),
    ))
}

pub fn are_similar<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch(
            "similarity test needs equal square sizes".into(),
        ));
    }
    Ok(jordan_structure(a, tol)?.matches(&jordan_structure(b, tol)?, tol))
}

/// Whether `U − I` is numerically nilpotent (all eigenvalues equal to one).
pub fn is_unipotent<T: Real>(u: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(
            "unipotency test of a non-square matrix".into(),
        ));
    }
    let m = u.shift(Complex::one());
    let w = weyr_sequence(&m, weyr_threshold(u, &m, tol))?;
    Ok(!w.ambiguous && w.total() == u.rows())
}

pub fn is_nilpotent<T: Real>(n: &Matrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch(
            "nilpotency test of a non-square matrix".into(),
        ));
    }
    if n.norm_fro() == T::zero() {
        return Ok(true);
    }
    let w = weyr_sequence(n, weyr_threshold(n, n, tol))?;
    Ok(!w.ambiguous && w.total() == n.rows())
}

/// `P A P⁻¹ = T ⊕ U` with `1 ∉ σ(T)` and `σ(U) = {1}`.
#[derive(Debug, Clone)]
pub struct SplitAtOne<T> {
    pub p: Matrix<T>,
    pub p_inv: Matrix<T>,
    pub t: Matrix<T>,
    pub u: Matrix<T>,
}

impl<T: Real> SplitAtOne<T> {
    /// `(n − m, m)`.
    pub fn sizes(&self) -> (usize, usize) {
        (self.t.rows(), self.u.rows())
    }

    pub fn block_diagonal(&self) -> Matrix<T> {
        self.t.direct_sum(&self.u)
    }
}

/// Splits off the eigenvalue-one part via a reordered Schur form and one
/// triangular Sylvester solve that zeroes the coupling block.
pub fn split_at_one<T: Real>(a: &Matrix<T>, tol: &Tolerance<T>) -> Result<SplitAtOne<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("split of a non-square matrix".into()));
    }
    let n = a.rows();
    let one = Complex::<T>::one();
    let shifted = a.shift(one);
    let w = weyr_sequence(&shifted, weyr_threshold(a, &shifted, tol))?;
    if w.ambiguous {
        return Err(Error::IllConditioned("rank of A − I straddles the rank cut".into()));
    }
    let m = w.total();

    let mut schur = Schur::new(a)?;
    let eigs = schur.eigenvalues();
    let mut by_distance: Vec<usize> = (0..n).collect();
    by_distance.sort_by(|&i, &j| (eigs[i] - one).norm().partial_cmp(&(eigs[j] - one).norm()).unwrap());
    if m < n {
        let outside = (eigs[by_distance[m]] - one).norm();
        let inside = if m > 0 {
            (eigs[by_distance[m - 1]] - one).norm()
        } else {
            T::zero()
        };
        if outside <= tol.eig_cluster || (m > 0 && outside <= inside) {
            return Err(Error::BorderlineSpectrum {
                distance: outside.as_f64(),
            });
        }
    }
    let mut selected = vec![false; n];
    for &i in &by_distance[..m] {
        selected[i] = true;
    }
    schur.reorder_to_end(&selected);

    let k = n - m;
    let t11 = schur.t.block(0, 0, k, k);
    let t12 = schur.t.block(0, k, k, m);
    let t22 = schur.t.block(k, k, m, m);
    let x = solve_triangular_sylvester(&t11, &t22, &(-&t12))?;

    let mut s_inv = Matrix::identity(n);
    let mut s = Matrix::identity(n);
    s_inv.set_block(0, k, &(-&x));
    s.set_block(0, k, &x);
    let p = &s_inv * &schur.q.adjoint();
    let p_inv = &schur.q * &s;
    Ok(SplitAtOne {
        p,
        p_inv,
        t: t11,
        u: t22,
    })
}

/// Finite power series `Σ_{k=0}^{n} c_k M^k`.
fn finite_series<T: Real>(m: &Matrix<T>, coeff: impl Fn(usize) -> T) -> Matrix<T> {
    let n = m.rows();
    let mut out = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n);
    for k in 0..=n {
        let ck = coeff(k);
        if ck != T::zero() {
            out = &out + &power.scale_real(ck);
        }
        power = &power * m;
    }
    out
}

/// `log U = Σ_{k≥1} (−1)^{k+1} (U − I)^k / k`, a finite sum for unipotent `U`.
pub fn unipotent_log<T: Real>(u: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    if !is_unipotent(u, tol)? {
        return Err(Error::NotUnipotent);
    }
    let m = u.shift(Complex::one());
    Ok(finite_series(&m, |k| {
        if k == 0 {
            T::zero()
        } else {
            let s = if k % 2 == 1 { T::one() } else { -T::one() };
            s / T::from_usize(k).unwrap()
        }
    }))
}

fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, i| acc * T::from_usize(i).unwrap())
}

/// `exp N = Σ_{k=0}^{n−1} N^k / k!` for nilpotent `N`.
pub fn nilpotent_exp<T: Real>(n: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    if !is_nilpotent(n, tol)? {
        return Err(Error::NotNilpotent);
    }
    Ok(finite_series(n, factorial_recip::<T>))
}

fn factorial_recip<T: Real>(k: usize) -> T {
    T::one() / factorial::<T>(k)
}

/// `C = I + N/2! + N²/3! + ⋯`, the translation factor of the affine exponential.
pub fn exp_translation_factor<T: Real>(n: &Matrix<T>) -> Matrix<T> {
    finite_series(n, |k| T::one() / factorial::<T>(k + 1))
}

/// `exp(N, x) = (exp N, C x)` for nilpotent `N`.
pub fn affine_exp<T: Real>(n: &Matrix<T>, x: &[Complex<T>], tol: &Tolerance<T>) -> Result<Affine<T>> {
    if x.len() != n.rows() {
        return Err(Error::DimensionMismatch("affine exponential translation length".into()));
    }
    let e = nilpotent_exp(n, tol)?;
    let c = exp_translation_factor(n);
    Affine::new(e, c.mul_vec(x))
}

/// Whether the eigenvalue multiset is closed under complex conjugation,
/// matching each eigenvalue greedily with a conjugate partner within `radius`.
pub fn spectrum_conjugation_symmetric<T: Real>(eigs: &[Complex<T>], radius: T) -> bool {
    let mut used = vec![false; eigs.len()];
    for i in 0..eigs.len() {
        if used[i] {
            continue;
        }
        let target = eigs[i].conj();
        let partner = (0..eigs.len())
            .filter(|&j| !used[j] && j != i && (eigs[j] - target).norm() <= radius)
            .min_by(|&a, &b| {
                (eigs[a] - target)
                    .norm()
                    .partial_cmp(&(eigs[b] - target).norm())
                    .unwrap()
            });
        used[i] = true;
        if eigs[i].im.abs() <= radius {
            continue;
        }
        match partner {
            Some(j) => used[j] = true,
            None => return false,
        }
    }
    true
}

/// Principal inverse square root `S^{−1/2}` via the Schur method.
///
/// The result is the primary matrix function, hence a polynomial in `S`;
/// its coefficients are real when the spectrum is conjugation-closed.
pub fn principal_inv_sqrt<T: Real>(s: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch("square root of a non-square matrix".into()));
    }
    let n = s.rows();
    let schur = Schur::new(s)?;
    let scale = T::one().max(s.norm_fro());
    for z in schur.eigenvalues() {
        let near_axis = z.im.abs() <= tol.eig_cluster * T::one().max(z.norm());
        if (near_axis && z.re <= T::zero()) || z.norm() <= tol.rank_cut * scale {
            return Err(Error::NegativeRealSpectrum);
        }
    }
    let r = &schur.t;
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        x[(j, j)] = r[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut acc = r[(i, j)];
            for k in i + 1..j {
                acc = acc - x[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / (x[(i, i)] + x[(j, j)]);
        }
    }
    let y = upper_triangular_inverse(&x)?;
    Ok(&(&schur.q * &y) * &schur.q.adjoint())
}
