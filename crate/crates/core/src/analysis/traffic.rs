use num_traits::{One, Zero};

use super::{pow2, BigRational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrafficKind {
    /// `p_i = c / 2^(i-1)` with `c` chosen so the weights sum to one.
    Geometric,
    /// `p_i = 1 / 2^(i-1)` without normalization.
    GeometricUnnormalized,
}

/// Fraction of traffic whose endpoints first meet in a grid of order `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficModel {
    kind: TrafficKind,
    weights: Vec<BigRational>,
    beta: f64,
}

/// Normalized geometric weights for a network of order `n`.
pub fn ctf_weights(n: u32) -> Result<TrafficModel> {
    TrafficModel::geometric(n)
}

impl TrafficModel {
    pub fn geometric(n: u32) -> Result<Self> {
        check_order(n)?;
        // c = 2^(n-1) / (2^n - 1)
        let c = pow2(n - 1) / (pow2(n) - BigRational::one());
        let weights = (1..=n).map(|i| &c / pow2(i - 1)).collect();
        Ok(Self {
            kind: TrafficKind::Geometric,
            weights,
            beta: 1.0,
        })
    }

    pub fn geometric_unnormalized(n: u32) -> Result<Self> {
        check_order(n)?;
        let weights = (1..=n).map(|i| pow2(i - 1).recip()).collect();
        Ok(Self {
            kind: TrafficKind::GeometricUnnormalized,
            weights,
            beta: 1.0,
        })
    }

    /// Sets the communication-pattern exponent, `1 <= beta <= 2`.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&beta) {
            return Err(Error::ParamDomain(format!("beta {beta} outside [1, 2]")));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn kind(&self) -> TrafficKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.weights.len() as u32
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// `p_i` for `1 <= i <= n`.
    pub fn weight(&self, i: u32) -> Option<&BigRational> {
        self.weights.get((i as usize).checked_sub(1)?)
    }

    /// The leading constant `c` (`p_1`).
    pub fn constant(&self) -> &BigRational {
        &self.weights[0]
    }

    pub fn total(&self) -> BigRational {
        self.weights.iter().fold(BigRational::zero(), |acc, w| acc + w)
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 || n > 62 {
        return Err(Error::ParamDomain(format!("network order {n} outside 1..=62")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ratio;

    #[test]
    fn geometric_examples() {
        let t = ctf_weights(3).unwrap();
        assert_eq!(t.constant(), &ratio(4, 7));
        assert_eq!(t.weights(), &[ratio(4, 7), ratio(2, 7), ratio(1, 7)]);
        assert_eq!(ctf_weights(1).unwrap().weights(), &[ratio(1, 1)]);
        assert_eq!(ctf_weights(2).unwrap().weights(), &[ratio(2, 3), ratio(1, 3)]);
    }

    #[test]
    fn weights_sum_to_one_exactly() {
        for n in 1..=40 {
            assert!(ctf_weights(n).unwrap().total().is_one(), "n={n}");
        }
    }

    #[test]
    fn unnormalized_weights() {
        let t = TrafficModel::geometric_unnormalized(4).unwrap();
        assert_eq!(t.weights(), &[ratio(1, 1), ratio(1, 2), ratio(1, 4), ratio(1, 8)]);
        assert_eq!(t.total(), ratio(15, 8));
    }

    #[test]
    fn domain() {
        assert!(ctf_weights(0).is_err());
        let t = ctf_weights(2).unwrap();
        assert!(t.clone().with_beta(0.5).is_err());
        assert!(t.clone().with_beta(2.5).is_err());
        assert_eq!(t.with_beta(1.5).unwrap().beta(), 1.5);
    }
}
