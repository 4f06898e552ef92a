//! Ground-truth network performance as a function of load.
//!
//! Each metric follows `base + growth * (n / cap)^k`, so performance worsens
//! convexly as terminals attach and the network evaluation falls with `n`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{NetworkKind, StrategyParams};
use crate::evaluation::{net_eva, normalize};

fn default_exponent() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkProfile {
    pub kind: NetworkKind,
    /// Delay with no load, seconds. Includes the relay overhead for LTE and Wi-Fi.
    pub d0: f64,
    pub a: f64,
    pub p0: f64,
    pub b: f64,
    pub g0: f64,
    pub h: f64,
    /// Load scale, in terminals.
    pub cap: f64,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
}

/// Delay and jitter in seconds, loss as a ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perf {
    pub delay: f64,
    pub plr: f64,
    pub jitter: f64,
}

impl NetworkProfile {
    fn load(&self, n: u32) -> f64 {
        (f64::from(n) / self.cap).powf(self.exponent)
    }

    pub fn perf_at(&self, n: u32) -> Perf {
        let load = self.load(n);
        Perf {
            delay: self.d0 + self.a * load,
            plr: (self.p0 + self.b * load).min(1.0),
            jitter: self.g0 + self.h * load,
        }
    }
}

pub fn perf_at(profile: &NetworkProfile, n: u32) -> Perf {
    profile.perf_at(n)
}

/// Outcome of one sender-to-receiver delivery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSample {
    Lost,
    Delivered { delay: f64 },
}

impl LinkSample {
    pub fn delivered(&self) -> bool {
        matches!(self, LinkSample::Delivered { .. })
    }

    pub fn delay(&self) -> Option<f64> {
        match *self {
            LinkSample::Delivered { delay } => Some(delay),
            LinkSample::Lost => None,
        }
    }
}

/// Samples one delivery on a network carrying `n` terminals.
///
/// Loss is Bernoulli with the curve's PLR. A delivered message's delay is the
/// mean delay plus a uniform perturbation on `[-jitter, +jitter]`, floored at
/// the profile's base delay. Always consumes exactly two draws.
pub fn sample_link<R: Rng + ?Sized>(profile: &NetworkProfile, n: u32, rng: &mut R) -> LinkSample {
    let perf = profile.perf_at(n);
    let loss_draw: f64 = rng.random();
    let spread_draw: f64 = rng.random();
    if loss_draw < perf.plr {
        return LinkSample::Lost;
    }
    let delay = (perf.delay + (2.0 * spread_draw - 1.0) * perf.jitter).max(profile.d0);
    LinkSample::Delivered { delay }
}

/// Noise-free evaluation of a network carrying `n` terminals.
pub fn ground_truth_eval(profile: &NetworkProfile, n: u32, params: &StrategyParams) -> f64 {
    net_eva(&normalize(&profile.perf_at(n), params), params)
}
