use statrs::function::factorial::ln_binomial;

use super::{pow2, BigRational, TrafficModel};
use crate::error::{Error, Result};

fn check_counts(nc: u64, threshold: u64, m: u64, nodes: u64) -> Result<()> {
    if nodes == 0 || m == 0 || m > nodes {
        return Err(Error::ParamDomain(format!("need 0 < m <= N (m={m}, N={nodes})")));
    }
    if nc > nodes {
        return Err(Error::ParamDomain(format!("{nc} compromised out of {nodes}")));
    }
    if threshold == 0 {
        return Err(Error::ParamDomain("share threshold must be >= 1".into()));
    }
    Ok(())
}

/// Probability that at least `threshold` of `nc` compromised nodes belong to
/// one given basic zone, each node landing in it independently with
/// probability `m / N`:
///
/// `1 - sum_{i < threshold} C(nc, i) (m/N)^i ((N-m)/N)^(nc-i)`.
///
/// With `threshold = t0` this is the published formula; a degree-`t0`
/// polynomial actually needs `t0 + 1` shares, so pass `t0 + 1` for the
/// break probability. The upper tail is summed directly in log space, so
/// small probabilities keep full relative precision.
pub fn resiliency_pr(nc: u64, threshold: u64, m: u64, nodes: u64) -> Result<f64> {
    check_counts(nc, threshold, m, nodes)?;
    if threshold > nc {
        return Ok(0.0);
    }
    if m == nodes {
        return Ok(1.0);
    }
    let ln_p = (m as f64 / nodes as f64).ln();
    let ln_q = ((nodes - m) as f64 / nodes as f64).ln();
    let tail: f64 = (threshold..=nc)
        .map(|i| (ln_binomial(nc, i) + i as f64 * ln_p + (nc - i) as f64 * ln_q).exp())
        .sum();
    Ok(tail.min(1.0))
}

/// Same event when the `nc` compromised nodes are distinct (hypergeometric):
/// `sum_{i >= threshold} C(m, i) C(N-m, nc-i) / C(N, nc)`.
pub fn resiliency_pr_without_replacement(nc: u64, threshold: u64, m: u64, nodes: u64) -> Result<f64> {
    check_counts(nc, threshold, m, nodes)?;
    let hi = nc.min(m);
    let lo = threshold.max(nc.saturating_sub(nodes - m));
    if lo > hi {
        return Ok(0.0);
    }
    let ln_total = ln_binomial(nodes, nc);
    let tail: f64 = (lo..=hi)
        .map(|i| (ln_binomial(m, i) + ln_binomial(nodes - m, nc - i) - ln_total).exp())
        .sum();
    Ok(tail.min(1.0))
}

/// Share of all traffic blocked while one order-`i` polynomial is broken:
/// `p_i / 2^(n-i)`.
pub fn blocked_fraction(i: u32, traffic: &TrafficModel) -> Result<BigRational> {
    let n = traffic.order();
    let p = traffic.weight(i).ok_or(Error::OrderOutOfRange { order: i, max: n })?;
    Ok(p / pow2(n - i))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HighestOrderBreak {
    /// Half of the top-order weight, `p_n / 2`.
    pub half_top_weight: BigRational,
    /// `1 / 2^(n-1)`, the top weight when weights halve per order from one.
    pub halving_top_weight: BigRational,
}

/// Traffic figures quoted for a break of the single top-order polynomial.
pub fn highest_order_break(traffic: &TrafficModel) -> HighestOrderBreak {
    let n = traffic.order();
    let top = traffic.weight(n).expect("non-empty weights");
    HighestOrderBreak {
        half_top_weight: top / pow2(1),
        halving_top_weight: pow2(n - 1).recip(),
    }
}
