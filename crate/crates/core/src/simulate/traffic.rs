use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::analysis::TrafficModel;
use crate::error::{Error, Result};
use crate::keying::Deployment;
use crate::polynomial::eval_bivar;

/// Marks the order-`i` polynomial of grid 0 broken and measures the share of
/// traffic it carried by enumerating every node pair. Each order's traffic
/// weight is spread evenly over the pairs that first meet at that order.
pub fn mc_blocked_traffic(dep: &Deployment, i: u32, traffic: &TrafficModel) -> Result<BigRational> {
    let grid = dep.grid();
    let n = grid.order();
    grid.check_order(i)?;
    if traffic.order() != n {
        return Err(Error::ParamDomain(format!(
            "traffic model of order {} for a network of order {n}",
            traffic.order()
        )));
    }
    let nodes: Vec<_> = grid.nodes().collect();
    let mut per_order = vec![0u64; n as usize];
    let mut blocked = vec![0u64; n as usize];
    for (ia, &a) in nodes.iter().enumerate() {
        for &b in &nodes[ia + 1..] {
            let o = a.common_order(b)?;
            per_order[o as usize - 1] += 1;
            if o == i && a.grid_index(i)? == 0 {
                blocked[o as usize - 1] += 1;
            }
        }
    }
    let mut out = BigRational::zero();
    for o in 1..=n {
        let idx = o as usize - 1;
        if blocked[idx] > 0 {
            let share = BigRational::new(BigInt::from(blocked[idx]), BigInt::from(per_order[idx]));
            out += share * traffic.weight(o).expect("order in range");
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryReport {
    pub broken_order: u32,
    pub fallback_order: u32,
    /// Pairs that used the broken polynomial.
    pub affected_pairs: u64,
    /// Of those, pairs whose two fallback keys match.
    pub agreed: u64,
    pub oracle_checked: u64,
    pub oracle_matches: u64,
}

/// Re-keys every pair served by the broken order-`i` polynomial of grid 0
/// with the order `i + 1` polynomial both nodes also hold.
pub fn reestablish_after_break(dep: &Deployment, i: u32) -> Result<RecoveryReport> {
    let grid = dep.grid();
    let n = grid.order();
    grid.check_order(i)?;
    let fallback = i + 1;
    grid.check_order(fallback)?;
    let nodes: Vec<_> = grid.nodes().collect();
    let mut report = RecoveryReport {
        broken_order: i,
        fallback_order: fallback,
        affected_pairs: 0,
        agreed: 0,
        oracle_checked: 0,
        oracle_matches: 0,
    };
    debug_assert!(fallback <= n);
    for (ia, &a) in nodes.iter().enumerate() {
        for &b in &nodes[ia + 1..] {
            if a.common_order(b)? != i || a.grid_index(i)? != 0 {
                continue;
            }
            report.affected_pairs += 1;
            let kab = dep.key_at_order(a, b, fallback)?;
            if kab == dep.key_at_order(b, a, fallback)? {
                report.agreed += 1;
            }
            if let Some(poly) = dep.authority_polynomial(fallback, a.grid_index(fallback)?) {
                report.oracle_checked += 1;
                if eval_bivar(poly, dep.id_element(a), dep.id_element(b))? == kab {
                    report.oracle_matches += 1;
                }
            }
        }
    }
    Ok(report)
}
