use num_bigint::BigInt;

use super::{pow2, BigRational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PairConnectivity {
    /// Probability that two distinct random nodes both lie in one specific
    /// grid of order `z`.
    pub probability: BigRational,
    /// `(2^(z-n))^2`.
    pub bound: BigRational,
}

/// `C(2^(z-1) m, 2) / C(2^(n-1) m, 2)` and its upper bound.
pub fn connectivity_pz(z: u32, n: u32, m: u64) -> Result<PairConnectivity> {
    if z == 0 || z > n || n > 62 {
        return Err(Error::ParamDomain(format!("need 1 <= z <= n <= 62 (z={z}, n={n})")));
    }
    if m < 2 {
        return Err(Error::ParamDomain(format!("zone size {m} < 2")));
    }
    let pairs = |nodes: BigInt| &nodes * (&nodes - 1u8) / 2u8;
    let inner = BigInt::from(m) << (z - 1);
    let outer = BigInt::from(m) << (n - 1);
    let probability = BigRational::new(pairs(inner), pairs(outer));
    let bound = pow2(2 * (n - z)).recip();
    assert!(probability <= bound, "pair probability exceeds (2^(z-n))^2");
    Ok(PairConnectivity { probability, bound })
}

/// Order connectivity `(2^(i-n))^beta`.
pub fn connectivity_order(i: u32, n: u32, beta: f64) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::ParamDomain(format!("order {i} outside 1..={n}")));
    }
    if !(1.0..=2.0).contains(&beta) {
        return Err(Error::ParamDomain(format!("beta {beta} outside [1, 2]")));
    }
    Ok(((i as f64 - n as f64) * beta).exp2())
}
