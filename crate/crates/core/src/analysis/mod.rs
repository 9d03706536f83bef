//! Closed-form models: traffic weights, connectivity, memory, computation,
//! communication, compromise resiliency, blocked traffic, and the
//! connectivity of competing schemes.
//!
//! Identities that hold exactly (weights summing to one, the pair-probability
//! bound, blocked-traffic constancy) are computed over [`BigRational`];
//! factorial-heavy probabilities use `f64` in log space.

mod compare;
mod connectivity;
mod overhead;
mod security;
mod traffic;

pub use num_rational::BigRational;

pub use compare::{scheme_connectivity, Scheme};
pub use connectivity::{connectivity_order, connectivity_pz, PairConnectivity};
pub use overhead::{
    communication_bits, compute_cost, memory_cost, ComputeCost, CostModel, MemoryCost, MemoryModel, WordMult,
};
pub use security::{
    blocked_fraction, highest_order_break, resiliency_pr, resiliency_pr_without_replacement, HighestOrderBreak,
};
pub use traffic::{ctf_weights, TrafficKind, TrafficModel};

use num_bigint::BigInt;

#[cfg(test)]
pub(crate) fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn pow2(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(1u8) << e)
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
