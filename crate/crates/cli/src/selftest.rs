//! Deterministic generator sweep behind `coninv selftest`.

use coninv::certify::{generate, verify_certificate, InstanceKind, InstanceSpec};
use coninv::factorization::{con_sqrt, four_factor, three_factor_with_witness, two_factor, two_factor_unipotent};
use coninv::linalg::{affine_compose, compose_all};
use coninv::{AffineMap, Result, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Failure;

pub fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let lo: usize = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: usize = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if lo == 0 || hi < lo {
        return Err(format!("empty or zero dimension range {s:?}"));
    }
    Ok((lo, hi))
}

/// Runs one case; returns the worst residual, failing when it exceeds the gate.
fn case(kind: InstanceKind, n: usize, seed: u64, tol: &Tolerance) -> Result<f64> {
    let spec = InstanceSpec::new(kind, n, seed);
    let g = generate::<f64>(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let cert = match kind {
        InstanceKind::Coninvolution => {
            let h = con_sqrt(&g, &mut rng, tol)?;
            let back = affine_compose(&h, &h.conj().inverse(tol)?)?;
            return Ok(back.dist(&g) / g.norm().max(1.0));
        }
        InstanceKind::CReversible => two_factor(&g, &mut rng, tol)?,
        InstanceKind::UnipotentAffine => two_factor_unipotent(&g.linear, &g.translation, tol)?,
        InstanceKind::UnimodularDet => four_factor(&g, &mut rng, tol)?,
        InstanceKind::General => {
            // g = k⁻¹ (c₁ c₂) k̄ with witness k
            let c1 = generate::<f64>(&InstanceSpec::new(InstanceKind::Coninvolution, n, seed.wrapping_add(1)))?;
            let c2 = generate::<f64>(&InstanceSpec::new(InstanceKind::Coninvolution, n, seed.wrapping_add(2)))?;
            let target: AffineMap = compose_all(&[g.inverse(tol)?, affine_compose(&c1, &c2)?, g.conj()])?;
            three_factor_with_witness(&target, &g, &mut rng, tol)?
        }
    };
    let report = verify_certificate(&cert, tol);
    Ok(if report.passed() { report.worst() } else { f64::INFINITY })
}

pub fn run(seed: u64, count: usize, dims: (usize, usize), tol: &Tolerance) -> std::result::Result<(), Failure> {
    println!(
        "selftest seed {seed}, {count} instances per kind, dims {}..{}, residual gate {:e}",
        dims.0, dims.1, tol.residual_rel
    );
    let span = dims.1 - dims.0 + 1;
    let mut failed = Vec::new();
    for (k, kind) in InstanceKind::ALL.into_iter().enumerate() {
        let mut passed = 0;
        let mut worst = 0.0f64;
        for i in 0..count {
            let n = dims.0 + i % span;
            let s = seed.wrapping_mul(1_000_003).wrapping_add((k * 100_000 + i) as u64);
            match case(kind, n, s, tol) {
                Ok(r) if r <= tol.residual_rel => {
                    passed += 1;
                    worst = worst.max(r);
                }
                Ok(r) => failed.push(format!("{} n={n} seed={s}: residual {r:e}", kind.as_str())),
                Err(e) => failed.push(format!("{} n={n} seed={s}: {e}", kind.as_str())),
            }
        }
        println!(
            "{:<24} {passed:>5}/{count:<5} worst residual {worst:.3e}",
            kind.as_str()
        );
    }
    for f in &failed {
        println!("failed: {f}");
    }
    if failed.is_empty() {
        println!("all passed");
        Ok(())
    } else {
        Err(Failure::Numerical(format!("{} selftest cases failed", failed.len())))
    }
}
