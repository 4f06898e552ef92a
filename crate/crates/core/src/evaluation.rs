//! Linear normalization of the three metrics, the weighted network score,
//! the requirement check and the argmax selector used by the baseline.

use crate::domain::{NetworkKind, PerNetwork, StrategyParams};
use crate::netmodel::Perf;

/// Dimensionless utilities. Each is 1 for a perfect metric, 0 at the
/// reference threshold and negative beyond it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utilities {
    pub delay: f64,
    pub plr: f64,
    pub jitter: f64,
}

pub fn normalize(perf: &Perf, params: &StrategyParams) -> Utilities {
    Utilities {
        delay: (params.f_delay_ref - perf.delay) / params.f_delay_ref,
        plr: (params.f_plr_ref - perf.plr) / params.f_plr_ref,
        jitter: (params.f_jit_ref - perf.jitter) / params.f_jit_ref,
    }
}

/// Weighted sum of the utilities.
pub fn net_eva(u: &Utilities, params: &StrategyParams) -> f64 {
    params.w_delay * u.delay + params.w_plr * u.plr + params.w_jit * u.jitter
}

/// A network fails when two or more metrics strictly exceed their maximum
/// acceptable value.
pub fn meets_requirements(perf: &Perf, params: &StrategyParams) -> bool {
    let exceeded = [
        perf.delay > params.f_delay_ref,
        perf.plr > params.f_plr_ref,
        perf.jitter > params.f_jit_ref,
    ]
    .into_iter()
    .filter(|&e| e)
    .count();
    exceeded < 2
}

/// A terminal's view of one network in one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetEvaluation {
    pub network: NetworkKind,
    pub utilities: Utilities,
    /// Weighted score, after any disturbance penalty.
    pub score: f64,
    pub meets_requirements: bool,
    /// False when at least one metric could not be measured and a base-load
    /// prior was used in its place.
    pub measured: bool,
}

impl NetEvaluation {
    pub fn from_perf(network: NetworkKind, perf: &Perf, params: &StrategyParams, measured: bool) -> Self {
        let utilities = normalize(perf, params);
        NetEvaluation {
            network,
            utilities,
            score: net_eva(&utilities, params),
            meets_requirements: meets_requirements(perf, params),
            measured,
        }
    }

    /// Applies an additive evaluation penalty.
    pub fn penalized(mut self, delta_e: f64) -> Self {
        self.score -= delta_e;
        self
    }
}

/// Argmax over all three networks. Ties go to `current`, then to the fixed
/// network order.
pub fn select_best(evals: &PerNetwork<NetEvaluation>, current: NetworkKind) -> NetworkKind {
    let mut best = current;
    for kind in NetworkKind::ALL {
        if evals[kind].score > evals[best].score {
            best = kind;
        }
    }
    best
}

/// Highest-scoring network other than `excluded`, ties broken by the fixed
/// network order.
pub fn best_other(evals: &PerNetwork<NetEvaluation>, excluded: NetworkKind) -> NetworkKind {
    let mut best: Option<NetworkKind> = None;
    for kind in NetworkKind::ALL.into_iter().filter(|&k| k != excluded) {
        match best {
            Some(b) if evals[kind].score <= evals[b].score => {}
            _ => best = Some(kind),
        }
    }
    best.expect("two candidates always remain")
}
