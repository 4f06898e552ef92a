//! Per-terminal handoff decisions.
//!
//! [`decide_game`] is the probabilistic multi-play strategy: a terminal on
//! DSRC leaves with a small probability when DSRC is overloaded or failing,
//! and a terminal elsewhere drifts back to DSRC while DSRC has headroom. The
//! probabilities are tuned so that, on average, only a fraction of the
//! excess moves in any one cycle. [`decide_baseline`] is the single-play
//! argmax over the network scores.

use rand::RngCore;

use crate::domain::{NetworkKind, PerNetwork, StrategyParams};
use crate::evaluation::{best_other, select_best, NetEvaluation};

/// Switching probability for an overloaded DSRC terminal that perceives `x`
/// DSRC senders.
///
/// # Panics
///
/// If `x <= n_exp`: the overload branch must not be entered then.
pub fn p_overload(x: u32, n_exp: u32, rho: f64) -> f64 {
    assert!(x > n_exp, "overload branch taken with x={x} <= n_exp={n_exp}");
    rho * f64::from(x - n_exp + 1) / (f64::from(x) + 1.0)
}

/// Switching probability on a failing network where `x` senders are heard,
/// once the degradation counter has reached `c`.
pub fn p_degraded(c: u32, x: u32, sigma: f64) -> f64 {
    let raw = if x == 0 {
        sigma * f64::from(c)
    } else {
        sigma * f64::from(c) / f64::from(x)
    };
    raw.min(1.0)
}

/// Probability of returning to DSRC for a terminal that hears `x` DSRC
/// senders and `x_prime` senders on its own network.
pub fn p_return(x: u32, x_prime: u32, n_exp: u32, rho: f64) -> f64 {
    let headroom = f64::from(n_exp) - f64::from(x);
    (rho * headroom / (f64::from(x_prime) + 1.0)).clamp(0.0, rho)
}

/// Degradation counter update: `+1` on a failing cycle, halved (floor) on a
/// satisfying one.
pub fn update_counter(c: u32, met: bool) -> u32 {
    if met {
        c / 2
    } else {
        c.saturating_add(1)
    }
}

/// What a terminal knows when it decides.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalView {
    pub current: NetworkKind,
    /// Distinct DSRC senders in the window, after any perception noise.
    pub x_dsrc: u32,
    /// Distinct senders on the current network.
    pub x_current: u32,
    pub evals: PerNetwork<NetEvaluation>,
    pub dsrc_meets: bool,
    pub current_meets: bool,
    pub counter_c: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Stay,
    SwitchTo(NetworkKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trigger {
    None,
    Overload,
    Degradation,
    ReturnToDsrc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub action: Action,
    pub new_counter_c: u32,
    pub trigger: Trigger,
}

impl Decision {
    fn stay(c: u32) -> Self {
        Decision {
            action: Action::Stay,
            new_counter_c: c,
            trigger: Trigger::None,
        }
    }

    fn switch(to: NetworkKind, c: u32, trigger: Trigger) -> Self {
        Decision {
            action: Action::SwitchTo(to),
            new_counter_c: c,
            trigger,
        }
    }

    pub fn target(&self) -> Option<NetworkKind> {
        match self.action {
            Action::SwitchTo(k) => Some(k),
            Action::Stay => None,
        }
    }
}

/// Source of uniform draws in `[0, 1)`. A switch with probability `p`
/// happens when the draw is below `p`.
pub trait DrawSource {
    fn unit(&mut self) -> f64;
}

impl<R: RngCore + ?Sized> DrawSource for R {
    fn unit(&mut self) -> f64 {
        rand::Rng::random(self)
    }
}

/// Replays a fixed list of draws, then repeats the last one (or returns
/// `0.999…` when empty). Useful for pinning a decision path in tests.
#[derive(Debug, Clone)]
pub struct ScriptedDraws {
    draws: Vec<f64>,
    next: usize,
}

impl ScriptedDraws {
    pub fn new(draws: impl Into<Vec<f64>>) -> Self {
        ScriptedDraws {
            draws: draws.into(),
            next: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl DrawSource for ScriptedDraws {
    fn unit(&mut self) -> f64 {
        let v = self
            .draws
            .get(self.next)
            .or(self.draws.last())
            .copied()
            .unwrap_or(1.0 - f64::EPSILON);
        self.next += 1;
        v
    }
}

/// One play of the probabilistic game for one terminal.
///
/// The counter is updated from `current_meets` every cycle; the degradation
/// probability uses the updated value.
pub fn decide_game<D: DrawSource + ?Sized>(view: &TerminalView, params: &StrategyParams, draws: &mut D) -> Decision {
    let c = update_counter(view.counter_c, view.current_meets);

    if view.current == NetworkKind::Dsrc {
        if view.x_dsrc > params.n_exp && draws.unit() < p_overload(view.x_dsrc, params.n_exp, params.rho) {
            let target = best_other(&view.evals, NetworkKind::Dsrc);
            return Decision::switch(target, c, Trigger::Overload);
        }
        if !view.dsrc_meets && draws.unit() < p_degraded(c, view.x_dsrc, params.sigma) {
            let target = best_other(&view.evals, NetworkKind::Dsrc);
            return Decision::switch(target, c, Trigger::Degradation);
        }
        return Decision::stay(c);
    }

    if view.dsrc_meets && view.x_dsrc < params.n_exp {
        if draws.unit() < p_return(view.x_dsrc, view.x_current, params.n_exp, params.rho) {
            return Decision::switch(NetworkKind::Dsrc, c, Trigger::ReturnToDsrc);
        }
        return Decision::stay(c);
    }
    if !view.current_meets && draws.unit() < p_degraded(c, view.x_current, params.sigma) {
        let target = best_other(&view.evals, view.current);
        return Decision::switch(target, c, Trigger::Degradation);
    }
    Decision::stay(c)
}

/// Single-play selection: move to the argmax if it is not the current network.
pub fn decide_baseline(view: &TerminalView) -> Decision {
    let best = select_best(&view.evals, view.current);
    if best == view.current {
        Decision::stay(view.counter_c)
    } else {
        Decision::switch(best, view.counter_c, Trigger::None)
    }
}
