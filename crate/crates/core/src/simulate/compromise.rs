use std::time::Instant;

use rayon::prelude::*;

use super::{pairs, SimReport};
use crate::analysis::{resiliency_pr, resiliency_pr_without_replacement};
use crate::error::{Error, Result};
use crate::keying::Deployment;
use crate::rng::{sample_distinct, sub_rng};
use crate::topology::NodeId;

/// What an attacker holding a set of nodes has learned.
///
/// Each compromised node discloses every share it retains. A polynomial of
/// degree `t` is broken once `t + 1` distinct shares of it are revealed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompromiseState {
    compromised: Vec<bool>,
    /// `revealed[o - 1][g]`
    revealed: Vec<Vec<u64>>,
    /// `thresholds[o - 1] = degree + 1`
    thresholds: Vec<u64>,
}

impl CompromiseState {
    pub fn new(dep: &Deployment) -> Self {
        let grid = dep.grid();
        let policy = dep.policy();
        Self {
            compromised: vec![false; grid.capacity() as usize],
            revealed: (1..=grid.order()).map(|o| vec![0; grid.grids_at(o) as usize]).collect(),
            thresholds: (1..=grid.order()).map(|o| policy.degree_at(o) as u64 + 1).collect(),
        }
    }

    pub fn from_nodes(dep: &Deployment, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut state = Self::new(dep);
        for id in nodes {
            state.compromise(dep, id)?;
        }
        Ok(state)
    }

    /// Adds a node; compromising it twice reveals nothing new.
    pub fn compromise(&mut self, dep: &Deployment, id: NodeId) -> Result<()> {
        let ring = dep.ring(id)?;
        let slot = &mut self.compromised[id.index() as usize];
        if *slot {
            return Ok(());
        }
        *slot = true;
        for o in 1..=ring.truncation() {
            self.revealed[o as usize - 1][id.grid_index(o)? as usize] += 1;
        }
        Ok(())
    }

    pub fn is_compromised(&self, id: NodeId) -> bool {
        self.compromised[id.index() as usize]
    }

    pub fn compromised_count(&self) -> u64 {
        self.compromised.iter().filter(|&&c| c).count() as u64
    }

    pub fn revealed(&self, order: u32, index: u64) -> u64 {
        self.revealed[order as usize - 1][index as usize]
    }

    pub fn is_broken(&self, order: u32, index: u64) -> bool {
        self.revealed(order, index) >= self.thresholds[order as usize - 1]
    }

    pub fn broken_polynomials(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for (o, row) in self.revealed.iter().enumerate() {
            for (g, &count) in row.iter().enumerate() {
                if count >= self.thresholds[o] {
                    out.push((o as u32 + 1, g as u64));
                }
            }
        }
        out
    }

    /// `(affected, total)` over pairs of uncompromised nodes that hold a
    /// direct key: `affected` counts those whose key polynomial is broken.
    pub fn affected_links(&self, dep: &Deployment) -> (u64, u64) {
        let grid = dep.grid();
        let m = grid.zone_size() as usize;
        // uncompromised nodes per grid, built bottom-up
        let mut alive: Vec<Vec<u64>> = Vec::with_capacity(grid.order() as usize);
        alive.push(
            self.compromised
                .chunks(m)
                .map(|zone| zone.iter().filter(|&&c| !c).count() as u64)
                .collect(),
        );
        for o in 1..grid.order() as usize {
            let below = &alive[o - 1];
            alive.push(below.chunks(2).map(|c| c.iter().sum()).collect());
        }

        let (mut affected, mut total) = (0, 0);
        for o in 1..=dep.truncation() as usize {
            for (g, &count) in alive[o - 1].iter().enumerate() {
                let mut links = pairs(count);
                if o > 1 {
                    links -= pairs(alive[o - 2][2 * g]) + pairs(alive[o - 2][2 * g + 1]);
                }
                total += links;
                if self.revealed[o - 1][g] >= self.thresholds[o - 1] {
                    affected += links;
                }
            }
        }
        (affected, total)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompromiseReport {
    /// Break rate of the zone-0 basic polynomial; the closed form is the
    /// binomial tail at threshold `t0 + 1`.
    pub zone_break: SimReport,
    /// Binomial tail at threshold `t0`, as published.
    pub paper_literal: f64,
    /// Binomial tail at threshold `t0 + 1`.
    pub threshold_corrected: f64,
    /// Exact break probability for `nc` distinct nodes (hypergeometric tail
    /// at `t0 + 1`).
    pub without_replacement: f64,
    /// Fraction of links between uncompromised nodes secured by a broken
    /// polynomial, pooled over trials.
    pub affected_links: SimReport,
    /// Largest per-trial affected fraction.
    pub max_affected_fraction: f64,
}

/// Compromises `nc` distinct uniformly chosen nodes per trial.
pub fn mc_compromise_random(dep: &Deployment, nc: u64, trials: u64, seed: u64) -> Result<CompromiseReport> {
    let grid = dep.grid();
    let nodes = grid.capacity();
    if nc > nodes {
        return Err(Error::ParamDomain(format!("{nc} compromised out of {nodes}")));
    }
    if trials == 0 {
        return Err(Error::ParamDomain("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, u64, u64)> {
            let mut rng = sub_rng(seed, &[t]);
            let picked = sample_distinct(&mut rng, nodes as usize, nc as usize);
            let state = CompromiseState::from_nodes(
                dep,
                picked.into_iter().map(|i| grid.node_at(i as u64).expect("in range")),
            )?;
            let (affected, total) = state.affected_links(dep);
            Ok((state.is_broken(1, 0), affected, total))
        })
        .collect::<Result<Vec<_>>>()?;

    let broken = outcomes.iter().filter(|o| o.0).count() as u64;
    let affected: u128 = outcomes.iter().map(|o| o.1 as u128).sum();
    let total: u128 = outcomes.iter().map(|o| o.2 as u128).sum();
    let max_affected_fraction = outcomes
        .iter()
        .map(|o| if o.2 == 0 { 0.0 } else { o.1 as f64 / o.2 as f64 })
        .fold(0.0, f64::max);

    let t0 = dep.policy().degree_at(1) as u64;
    let m = grid.zone_size();
    let paper_literal = resiliency_pr(nc, t0, m, nodes)?;
    let threshold_corrected = resiliency_pr(nc, t0 + 1, m, nodes)?;
    let without_replacement = resiliency_pr_without_replacement(nc, t0 + 1, m, nodes)?;
    let elapsed = start.elapsed();
    let param = format!("nc={nc}");
    Ok(CompromiseReport {
        zone_break: SimReport::for_deployment("compromise-random", dep, param.clone(), trials, seed).with_result(
            broken as f64 / trials as f64,
            Some(threshold_corrected),
            elapsed,
        ),
        paper_literal,
        threshold_corrected,
        without_replacement,
        affected_links: SimReport::for_deployment("compromise-random-links", dep, param, trials, seed).with_result(
            if total == 0 {
                0.0
            } else {
                affected as f64 / total as f64
            },
            None,
            elapsed,
        ),
        max_affected_fraction,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectiveReport {
    /// Break rate of the target zone polynomial; closed form is 1 when the
    /// budget reaches the threshold and 0 otherwise.
    pub zone_break: SimReport,
    /// Fewest nodes of the zone that break its polynomial (`t0 + 1`), or
    /// `None` when the zone has fewer nodes than that.
    pub min_break_budget: Option<u64>,
    /// Expected number of uniformly random compromises before the zone has
    /// `t0 + 1` captured nodes: `(t0 + 1)(N + 1)/(m + 1)`.
    pub expected_random_budget: Option<f64>,
    pub affected_links: SimReport,
}

fn check_zone(dep: &Deployment, zone: u64) -> Result<()> {
    let zones = dep.grid().zones();
    if zone >= zones {
        return Err(Error::ZoneOutOfRange { zone, zones });
    }
    Ok(())
}

/// Compromises `budget` distinct nodes drawn from one basic zone per trial.
pub fn mc_compromise_selective(
    dep: &Deployment,
    zone: u64,
    budget: u64,
    trials: u64,
    seed: u64,
) -> Result<SelectiveReport> {
    check_zone(dep, zone)?;
    let grid = dep.grid();
    let m = grid.zone_size();
    if budget > m {
        return Err(Error::ParamDomain(format!("budget {budget} exceeds zone size {m}")));
    }
    if trials == 0 {
        return Err(Error::ParamDomain("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, u64, u64)> {
            let mut rng = sub_rng(seed, &[t]);
            let picked = sample_distinct(&mut rng, m as usize, budget as usize);
            let ids = picked
                .into_iter()
                .map(|l| grid.node(zone, l as u64 + 1).expect("in zone"));
            let state = CompromiseState::from_nodes(dep, ids)?;
            let (affected, total) = state.affected_links(dep);
            Ok((state.is_broken(1, zone), affected, total))
        })
        .collect::<Result<Vec<_>>>()?;
    let broken = outcomes.iter().filter(|o| o.0).count() as u64;
    let affected: u128 = outcomes.iter().map(|o| o.1 as u128).sum();
    let total: u128 = outcomes.iter().map(|o| o.2 as u128).sum();

    let threshold = dep.policy().degree_at(1) as u64 + 1;
    let reachable = threshold <= m;
    let nodes = grid.capacity();
    let elapsed = start.elapsed();
    let param = format!("zone={zone};budget={budget}");
    Ok(SelectiveReport {
        zone_break: SimReport::for_deployment("compromise-selective", dep, param.clone(), trials, seed).with_result(
            broken as f64 / trials as f64,
            Some(if budget >= threshold { 1.0 } else { 0.0 }),
            elapsed,
        ),
        min_break_budget: reachable.then_some(threshold),
        expected_random_budget: reachable.then(|| threshold as f64 * (nodes + 1) as f64 / (m + 1) as f64),
        affected_links: SimReport::for_deployment("compromise-selective-links", dep, param, trials, seed).with_result(
            if total == 0 {
                0.0
            } else {
                affected as f64 / total as f64
            },
            None,
            elapsed,
        ),
    })
}

/// Compromises nodes in uniformly random order until the zone polynomial
/// breaks; the estimate is the mean number of nodes that took.
pub fn mc_random_break_budget(dep: &Deployment, zone: u64, trials: u64, seed: u64) -> Result<SimReport> {
    check_zone(dep, zone)?;
    let grid = dep.grid();
    let (nodes, m) = (grid.capacity(), grid.zone_size());
    let threshold = dep.policy().degree_at(1) as u64 + 1;
    if threshold > m {
        return Err(Error::ParamDomain(format!(
            "zone of {m} nodes cannot reveal {threshold} shares"
        )));
    }
    if trials == 0 {
        return Err(Error::ParamDomain("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let total: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = sub_rng(seed, &[t]);
            let order = sample_distinct(&mut rng, nodes as usize, nodes as usize);
            let mut hits = 0;
            for (step, idx) in order.into_iter().enumerate() {
                if idx as u64 / m == zone {
                    hits += 1;
                    if hits == threshold {
                        return step as u64 + 1;
                    }
                }
            }
            unreachable!("zone holds at least the threshold")
        })
        .sum();
    let closed = threshold as f64 * (nodes + 1) as f64 / (m + 1) as f64;
    Ok(
        SimReport::for_deployment("random-break-budget", dep, format!("zone={zone}"), trials, seed).with_result(
            total as f64 / trials as f64,
            Some(closed),
            start.elapsed(),
        ),
    )
}
