use std::time::Instant;

use rayon::prelude::*;

use super::{pairs, SimReport};
use crate::analysis::{connectivity_pz, to_f64};
use crate::error::{Error, Result};
use crate::keying::Deployment;
use crate::polynomial::eval_bivar;
use crate::rng::{sub_rng, uniform_below};
use crate::topology::GridParams;

/// Estimates the probability that two distinct uniformly drawn nodes both
/// fall in grid 0 of order `z`.
pub fn mc_same_zone(grid: GridParams, z: u32, trials: u64, seed: u64) -> Result<SimReport> {
    grid.check_order(z)?;
    if trials == 0 {
        return Err(Error::ParamDomain("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let nodes = grid.capacity();
    let inside = grid.grid_population(z);
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = sub_rng(seed, &[t]);
            let a = uniform_below(&mut rng, nodes);
            let mut b = uniform_below(&mut rng, nodes - 1);
            if b >= a {
                b += 1;
            }
            a < inside && b < inside
        })
        .count() as u64;
    let closed = connectivity_pz(z, grid.order(), grid.zone_size())?;
    Ok(
        SimReport::for_grid("same-zone", grid, format!("z={z}"), trials, seed).with_result(
            hits as f64 / trials as f64,
            Some(to_f64(&closed.probability)),
            start.elapsed(),
        ),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementReport {
    pub pairs: u64,
    /// Pairs whose two directions produced the same key.
    pub agreed: u64,
    /// Pairs compared against the authority polynomial.
    pub oracle_checked: u64,
    pub oracle_matches: u64,
    /// `per_order[o - 1]`: pairs whose lowest common order is `o`.
    pub per_order: Vec<u64>,
    /// Combinatorial count of the same, `2^(n-1) C(m, 2)` for order one and
    /// `2^(n-o) (m 2^(o-2))^2` above.
    pub expected_per_order: Vec<u64>,
}

impl AgreementReport {
    pub fn agreement_rate(&self) -> f64 {
        if self.pairs == 0 {
            1.0
        } else {
            self.agreed as f64 / self.pairs as f64
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.agreed == self.pairs
            && self.oracle_matches == self.oracle_checked
            && self.per_order == self.expected_per_order
    }
}

#[derive(Default)]
struct Tally {
    pairs: u64,
    agreed: u64,
    oracle_checked: u64,
    oracle_matches: u64,
    per_order: Vec<u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.pairs += other.pairs;
        self.agreed += other.agreed;
        self.oracle_checked += other.oracle_checked;
        self.oracle_matches += other.oracle_matches;
        if self.per_order.len() < other.per_order.len() {
            self.per_order.resize(other.per_order.len(), 0);
        }
        for (a, b) in self.per_order.iter_mut().zip(other.per_order) {
            *a += b;
        }
        self
    }
}

/// Establishes every pair in both directions and, when the authority
/// polynomials are present, checks each key against `f(ID_a, ID_b)`.
pub fn agreement_sweep(dep: &Deployment) -> Result<AgreementReport> {
    let grid = dep.grid();
    let n = grid.order();
    if dep.truncation() < n {
        return Err(Error::OrderTruncated {
            needed: n,
            retained: dep.truncation(),
        });
    }
    let nodes: Vec<_> = grid.nodes().collect();
    let tally = (0..nodes.len())
        .into_par_iter()
        .map(|ia| -> Result<Tally> {
            let a = nodes[ia];
            let mut t = Tally {
                per_order: vec![0; n as usize],
                ..Tally::default()
            };
            for &b in &nodes[ia + 1..] {
                let o = a.common_order(b)?;
                t.per_order[o as usize - 1] += 1;
                t.pairs += 1;
                let kab = dep.establish_key(a, b)?;
                if kab == dep.establish_key(b, a)? {
                    t.agreed += 1;
                }
                if let Some(poly) = dep.authority_polynomial(o, a.grid_index(o)?) {
                    t.oracle_checked += 1;
                    if eval_bivar(poly, dep.id_element(a), dep.id_element(b))? == kab {
                        t.oracle_matches += 1;
                    }
                }
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))?;

    let m = grid.zone_size();
    let expected_per_order = (1..=n)
        .map(|o| {
            if o == 1 {
                grid.zones() * pairs(m)
            } else {
                let half = grid.grid_population(o - 1);
                grid.grids_at(o) * half * half
            }
        })
        .collect();
    let mut per_order = tally.per_order;
    per_order.resize(n as usize, 0);
    Ok(AgreementReport {
        pairs: tally.pairs,
        agreed: tally.agreed,
        oracle_checked: tally.oracle_checked,
        oracle_matches: tally.oracle_matches,
        per_order,
        expected_per_order,
    })
}

impl AgreementReport {
    pub fn to_sim_report(&self, dep: &Deployment) -> SimReport {
        SimReport::for_deployment("agreement", dep, format!("pairs={}", self.pairs), self.pairs, 0).with_result(
            self.agreement_rate(),
            Some(1.0),
            Default::default(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldModulus;
    use crate::keying::{assign_keying_material, DegreePolicy, PolicyKind};
    use crate::topology::make_grid;

    #[test]
    fn same_zone_root_is_certain() {
        let grid = make_grid(3, 1).unwrap();
        let r = mc_same_zone(grid, 3, 37, 5).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.abs_error, Some(0.0));
    }

    #[test]
    fn same_zone_is_reproducible() {
        let grid = make_grid(2, 1).unwrap();
        let a = mc_same_zone(grid, 1, 2000, 77).unwrap();
        let b = mc_same_zone(grid, 1, 2000, 77).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert!(mc_same_zone(grid, 1, 0, 77).is_err());
        assert!(mc_same_zone(grid, 3, 10, 77).is_err());
    }

    #[test]
    fn agreement_on_small_grid() {
        let grid = make_grid(3, 1).unwrap();
        let policy = DegreePolicy::new(PolicyKind::Doubling, 0.5, grid.zone_size()).unwrap();
        let dep = assign_keying_material(grid, policy, FieldModulus::default(), 1).unwrap();
        let r = agreement_sweep(&dep).unwrap();
        assert_eq!(r.pairs, 120);
        assert_eq!(r.per_order, [24, 32, 64]);
        assert!(r.is_perfect());
        assert_eq!(r.oracle_checked, 120);

        let t = dep.truncate_rings(2).unwrap();
        assert!(matches!(agreement_sweep(&t), Err(Error::OrderTruncated { .. })));
    }

    #[test]
    fn single_zone_network() {
        let grid = make_grid(1, 1).unwrap();
        let dep = assign_keying_material(
            grid,
            DegreePolicy::with_base_degree(PolicyKind::Flat, 2),
            FieldModulus::default(),
            1,
        )
        .unwrap();
        let r = agreement_sweep(&dep).unwrap();
        assert_eq!(r.per_order, [6]);
        assert!(r.is_perfect());
    }
}
