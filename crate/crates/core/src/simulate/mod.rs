//! Monte Carlo estimates and exhaustive sweeps that check the closed forms
//! against an actual deployment.
//!
//! Trials are independent: trial `t` draws from `sub_rng(seed, [t])`, and
//! results are accumulated as integer counts and divided once, so parallel
//! execution gives the same numbers as a sequential run.

mod compromise;
mod sweep;
mod traffic;

use std::time::Duration;

pub use compromise::{
    mc_compromise_random, mc_compromise_selective, mc_random_break_budget, CompromiseReport, CompromiseState,
    SelectiveReport,
};
pub use sweep::{agreement_sweep, mc_same_zone, AgreementReport};
pub use traffic::{mc_blocked_traffic, reestablish_after_break, RecoveryReport};

use crate::keying::Deployment;
use crate::topology::GridParams;

/// CSV columns of a [`SimReport`] row.
pub const SIM_COLUMNS: [&str; 11] = [
    "sim_kind",
    "n",
    "k",
    "alpha",
    "policy",
    "param",
    "trials",
    "seed",
    "estimate",
    "closed_form",
    "abs_error",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub kind: &'static str,
    pub n: u32,
    pub k: u32,
    pub alpha: Option<f64>,
    pub policy: Option<String>,
    /// Free-form parameter echo, e.g. `nc=40`.
    pub param: String,
    pub trials: u64,
    pub seed: u64,
    pub estimate: f64,
    pub closed_form: Option<f64>,
    pub abs_error: Option<f64>,
    pub wall_time: Duration,
}

impl SimReport {
    pub fn for_grid(kind: &'static str, grid: GridParams, param: String, trials: u64, seed: u64) -> Self {
        Self {
            kind,
            n: grid.order(),
            k: grid.unit(),
            alpha: None,
            policy: None,
            param,
            trials,
            seed,
            estimate: 0.0,
            closed_form: None,
            abs_error: None,
            wall_time: Duration::ZERO,
        }
    }

    pub fn for_deployment(kind: &'static str, dep: &Deployment, param: String, trials: u64, seed: u64) -> Self {
        let policy = dep.policy();
        Self {
            alpha: policy.alpha(),
            policy: Some(policy.kind().to_string()),
            ..Self::for_grid(kind, dep.grid(), param, trials, seed)
        }
    }

    pub fn with_result(mut self, estimate: f64, closed_form: Option<f64>, wall_time: Duration) -> Self {
        self.estimate = estimate;
        self.closed_form = closed_form;
        self.abs_error = closed_form.map(|c| (estimate - c).abs());
        self.wall_time = wall_time;
        self
    }

    /// Cells in [`SIM_COLUMNS`] order. Floats use the shortest round-trip
    /// form; absent values are empty.
    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        vec![
            self.kind.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            opt(self.alpha),
            self.policy.clone().unwrap_or_default(),
            self.param.clone(),
            self.trials.to_string(),
            self.seed.to_string(),
            format!("{:?}", self.estimate),
            opt(self.closed_form),
            opt(self.abs_error),
        ]
    }
}

/// `C(x, 2)`.
pub(crate) fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}
