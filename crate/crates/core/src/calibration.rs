//! Sanity checks that a set of curves puts the simulator in the intended
//! regime: DSRC best when lightly loaded but unable to carry the whole
//! fleet, LTE the worst first choice, and only a split across all three
//! networks meeting every threshold.

use std::fmt;

use crate::domain::{NetworkKind, PerNetwork, StrategyParams};
use crate::evaluation::meets_requirements;
use crate::netmodel::{ground_truth_eval, NetworkProfile};

/// Load range over which evaluations must fall.
pub const DECREASING_RANGE: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Decreasing,
    DsrcProfile,
    LteWorstAlone,
    SplitRequired,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::Decreasing,
        Condition::DsrcProfile,
        Condition::LteWorstAlone,
        Condition::SplitRequired,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Condition::Decreasing => "decreasing",
            Condition::DsrcProfile => "(a)",
            Condition::LteWorstAlone => "(b)",
            Condition::SplitRequired => "(c)",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub condition: Condition,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<11}{}", self.condition.label(), self.detail)
    }
}

fn all_met(profile: &NetworkProfile, n: u32, params: &StrategyParams) -> bool {
    let p = profile.perf_at(n);
    p.delay <= params.f_delay_ref && p.plr <= params.f_plr_ref && p.jitter <= params.f_jit_ref
}

fn decreasing(profiles: &PerNetwork<NetworkProfile>, params: &StrategyParams) -> CheckResult {
    let bad = NetworkKind::ALL.into_iter().find_map(|k| {
        (0..DECREASING_RANGE)
            .find(|&n| ground_truth_eval(&profiles[k], n + 1, params) >= ground_truth_eval(&profiles[k], n, params))
            .map(|n| (k, n))
    });
    CheckResult {
        condition: Condition::Decreasing,
        passed: bad.is_none(),
        detail: match bad {
            None => format!("every evaluation falls strictly over 0..={DECREASING_RANGE}"),
            Some((k, n)) => format!("{k} evaluation does not fall from n={n} to n={}", n + 1),
        },
    }
}

fn dsrc_profile(profiles: &PerNetwork<NetworkProfile>, params: &StrategyParams, total: u32) -> CheckResult {
    let eval1 = profiles.map(|_, p| ground_truth_eval(p, 1, params));
    let best = eval1.dsrc > eval1.lte && eval1.dsrc > eval1.wifi;
    let light_ok = (1..=params.n_exp).all(|n| all_met(&profiles.dsrc, n, params));
    let breaks = !meets_requirements(&profiles.dsrc.perf_at(total), params);
    let mut problems = Vec::new();
    if !best {
        problems.push("DSRC is not best at n=1".to_string());
    }
    if !light_ok {
        problems.push(format!("DSRC misses a threshold below n={}", params.n_exp));
    }
    if !breaks {
        problems.push(format!("DSRC still meets requirements at n={total}"));
    }
    CheckResult {
        condition: Condition::DsrcProfile,
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "DSRC best at n=1 ({:.4}), within thresholds up to {}, fails requirements at {total}",
                eval1.dsrc, params.n_exp
            )
        } else {
            problems.join("; ")
        },
    }
}

fn lte_worst(profiles: &PerNetwork<NetworkProfile>, params: &StrategyParams) -> CheckResult {
    let e = profiles.map(|_, p| ground_truth_eval(p, 1, params));
    CheckResult {
        condition: Condition::LteWorstAlone,
        passed: e.lte < e.dsrc && e.lte < e.wifi,
        detail: format!("n=1 evaluations DSRC {:.4}, LTE {:.4}, Wi-Fi {:.4}", e.dsrc, e.lte, e.wifi),
    }
}

fn split_required(profiles: &PerNetwork<NetworkProfile>, params: &StrategyParams, total: u32) -> CheckResult {
    let single = NetworkKind::ALL.into_iter().find(|&k| all_met(&profiles[k], total, params));
    let split = (0..=total).find_map(|d| {
        (0..=total - d).find_map(|l| {
            let w = total - d - l;
            let ok = all_met(&profiles.dsrc, d, params) && all_met(&profiles.lte, l, params) && all_met(&profiles.wifi, w, params);
            ok.then_some((d, l, w))
        })
    });
    let detail = match (single, split) {
        (Some(k), _) => format!("{k} alone carries {total} within every threshold"),
        (None, None) => format!("no split of {total} meets every threshold"),
        (None, Some((d, l, w))) => format!("no network carries {total} alone; {d}/{l}/{w} meets every threshold"),
    };
    CheckResult {
        condition: Condition::SplitRequired,
        passed: single.is_none() && split.is_some(),
        detail,
    }
}

/// Runs every condition for a fleet of `total` terminals.
pub fn check(profiles: &PerNetwork<NetworkProfile>, params: &StrategyParams, total: u32) -> Vec<CheckResult> {
    vec![
        decreasing(profiles, params),
        dsrc_profile(profiles, params, total),
        lte_worst(profiles, params),
        split_required(profiles, params, total),
    ]
}
