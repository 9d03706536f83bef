use crate::error::{Error, Result};

/// Key pre-distribution schemes with a closed-form direct connectivity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    Hgbs,
    /// Two-dimensional grid-based polynomial scheme over `nodes` nodes.
    Gbs {
        nodes: f64,
    },
    /// Three-dimensional grid-based variant.
    Gbs3d {
        nodes: f64,
    },
    /// Plat-based polynomial scheme.
    Plat {
        nodes: f64,
    },
    /// Random key pool of `pool` keys, rings of `ring` keys.
    Eg {
        pool: u64,
        ring: u64,
    },
    /// Closest-pair style: `m` neighbours out of `nodes`.
    Cps {
        m: f64,
        nodes: f64,
    },
    /// Multi-space: `omega` spaces, `tau` per node.
    Ddhv {
        omega: u64,
        tau: u64,
    },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Hgbs => "hgbs",
            Scheme::Gbs { .. } => "gbs",
            Scheme::Gbs3d { .. } => "gbs3d",
            Scheme::Plat { .. } => "plat",
            Scheme::Eg { .. } => "eg",
            Scheme::Cps { .. } => "cps",
            Scheme::Ddhv { .. } => "ddhv",
        }
    }
}

/// `1 - ((P-k)!)^2 / ((P-2k)! P!)`, evaluated as
/// `1 - prod_{i<k} (P-k-i)/(P-i)` in log space.
fn shared_subset_probability(pool: u64, ring: u64) -> Result<f64> {
    if ring == 0 || pool < 2 * ring {
        return Err(Error::ParamDomain(format!(
            "need 1 <= k and P >= 2k (P={pool}, k={ring})"
        )));
    }
    let ln_disjoint: f64 = (0..ring).map(|i| (-(ring as f64) / (pool - i) as f64).ln_1p()).sum();
    Ok(-ln_disjoint.exp_m1())
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::ParamDomain(format!("{name} must be positive, got {v}")))
    }
}

/// Direct-key connectivity. Grid-based formulas are returned as printed and
/// can exceed one for tiny networks.
pub fn scheme_connectivity(scheme: &Scheme) -> Result<f64> {
    match *scheme {
        Scheme::Hgbs => Ok(1.0),
        Scheme::Gbs { nodes } => {
            let root = positive("N", nodes)?.sqrt();
            if root <= 1.0 {
                return Err(Error::ParamDomain(format!("GBS needs N > 1, got {nodes}")));
            }
            Ok(2.0 / (root - 1.0))
        }
        Scheme::Gbs3d { nodes } => {
            let c = positive("N", nodes)?.cbrt();
            Ok(3.0 / (c * c + c + 1.0))
        }
        Scheme::Plat { nodes } => Ok(3.0 / positive("N", nodes)?.cbrt()),
        Scheme::Eg { pool, ring } => shared_subset_probability(pool, ring),
        Scheme::Cps { m, nodes } => {
            let (m, nodes) = (positive("m", m)?, positive("N", nodes)?);
            if m > nodes {
                return Err(Error::ParamDomain(format!("m={m} exceeds N={nodes}")));
            }
            Ok(m / nodes)
        }
        Scheme::Ddhv { omega, tau } => shared_subset_probability(omega, tau),
    }
}
