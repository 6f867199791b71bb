//! Instance and certificate documents.

use std::fs;
use std::path::Path;

use coninv::factorization::{Certificate, Kind};
use coninv::linalg::{Affine, Matrix};
use coninv::{AffineMap, Tolerance, C64};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const FORMAT_VERSION: &str = "1";

type Pair = [f64; 2];

fn default_version() -> String {
    FORMAT_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    #[serde(default = "default_version")]
    pub version: String,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Pair>>,
}

impl Instance {
    pub fn from_map(g: &AffineMap) -> Self {
        let n = g.dim();
        Self {
            version: default_version(),
            n,
            a: (0..n)
                .map(|i| (0..n).map(|j| pair(g.linear[(i, j)])).collect())
                .collect(),
            v: Some(g.translation.iter().map(|&z| pair(z)).collect()),
        }
    }

    pub fn to_map(&self) -> Result<AffineMap, Failure> {
        let n = self.n;
        if n == 0 {
            return Err(Failure::Malformed("n must be positive".into()));
        }
        if self.a.len() != n || self.a.iter().any(|row| row.len() != n) {
            return Err(Failure::Malformed(format!("A must be {n}x{n}")));
        }
        let rows: Vec<Vec<C64>> = self.a.iter().map(|row| row.iter().map(complex).collect()).collect();
        let v = match &self.v {
            Some(v) if v.len() != n => return Err(Failure::Malformed(format!("v must have length {n}"))),
            Some(v) => v.iter().map(complex).collect(),
            None => vec![C64::new(0.0, 0.0); n],
        };
        Affine::new(Matrix::from_rows(&rows), v).map_err(|e| Failure::Malformed(e.to_string()))
    }
}

fn pair(z: C64) -> Pair {
    // adding +0 turns -0 into +0
    [z.re + 0.0, z.im + 0.0]
}

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDoc {
    pub residual_rel: f64,
    pub eig_cluster: f64,
    pub rank_cut: f64,
    pub max_retries: usize,
}

impl From<&Tolerance> for ToleranceDoc {
    fn from(t: &Tolerance) -> Self {
        Self {
            residual_rel: t.residual_rel,
            eig_cluster: t.eig_cluster,
            rank_cut: t.rank_cut,
            max_retries: t.max_retries,
        }
    }
}

impl From<&ToleranceDoc> for Tolerance {
    fn from(t: &ToleranceDoc) -> Self {
        Tolerance {
            residual_rel: t.residual_rel,
            eig_cluster: t.eig_cluster,
            rank_cut: t.rank_cut,
            max_retries: t.max_retries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub input: Instance,
    pub kind: String,
    pub factors: Vec<Instance>,
    pub residual_product: f64,
    pub residual_factors: Vec<f64>,
    pub provenance: Vec<String>,
    pub seed: u64,
    pub tolerance: ToleranceDoc,
}

impl CertificateDoc {
    pub fn new(cert: &Certificate<f64>, seed: u64, tol: &Tolerance) -> Self {
        Self {
            input: Instance::from_map(&cert.input),
            kind: cert.kind.as_str().to_string(),
            factors: cert.factors.iter().map(Instance::from_map).collect(),
            residual_product: cert.residual_product,
            residual_factors: cert.residual_factors.clone(),
            provenance: cert.provenance.clone(),
            seed,
            tolerance: tol.into(),
        }
    }

    /// Rebuilds the certificate from the stored maps; residuals are
    /// recomputed rather than trusted.
    pub fn to_certificate(&self) -> Result<Certificate<f64>, Failure> {
        let tol = Tolerance::from(&self.tolerance);
        let input = self.input.to_map()?;
        let factors = self
            .factors
            .iter()
            .map(Instance::to_map)
            .collect::<Result<Vec<_>, _>>()?;
        let kind = [Kind::Two, Kind::Three, Kind::Four]
            .into_iter()
            .find(|k| k.as_str() == self.kind)
            .ok_or_else(|| Failure::Malformed(format!("unknown kind {:?}", self.kind)))?;
        let cert = Certificate::new(input, factors, self.provenance.clone(), &tol)
            .map_err(|e| Failure::Malformed(e.to_string()))?;
        if cert.kind != kind {
            return Err(Failure::Malformed(format!(
                "kind {} with {} factors",
                self.kind,
                cert.factors.len()
            )));
        }
        Ok(cert)
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

pub fn to_json<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_defaults() {
        let inst: Instance = serde_json::from_str(r#"{"n":1,"A":[[[1,0]]]}"#).unwrap();
        assert_eq!(inst.version, FORMAT_VERSION);
        let g = inst.to_map().unwrap();
        assert_eq!(g.translation, vec![C64::new(0.0, 0.0)]);
    }

    #[test]
    fn malformed_instances() {
        for text in [
            r#"{"n":2,"A":[[[1,0]]]}"#,
            r#"{"n":1,"A":[[[1,0]]],"v":[]}"#,
            r#"{"n":0,"A":[]}"#,
            r#"{"n":1,"A":[[[1,0,0]]]}"#,
            r#"{"n":1,"A":[[[1,0]]],"w":1}"#,
        ] {
            let parsed = serde_json::from_str::<Instance>(text).map_err(|e| e.to_string());
            assert!(parsed.map(|i| i.to_map().is_err()).unwrap_or(true), "{text}");
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let g = Affine::new(
            Matrix::from_rows(&[
                vec![C64::new(0.1, 1.0 / 3.0), C64::new(-2.5e-17, 7.0)],
                vec![C64::new(1e300, 0.0), C64::new(0.0, -0.3)],
            ]),
            vec![C64::new(std::f64::consts::PI, 0.0), C64::new(0.0, 1e-310)],
        )
        .unwrap();
        let text = to_json(&Instance::from_map(&g));
        let back: Instance = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_map().unwrap(), g);
    }
}
