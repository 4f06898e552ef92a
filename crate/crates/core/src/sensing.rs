//! Per-terminal record of received BSMs and the metrics derived from it.
//!
//! For every network the ledger keeps the per-sender propagation delays of
//! the three most recent cycles, and the cycle in which each sender was last
//! heard over a trailing one-second span. Everything a terminal knows about
//! load and performance comes from here.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

use crate::domain::{trailing_cycles, Bsm, NetworkKind, PerNetwork, TerminalId};
use crate::netmodel::Perf;

/// Depth of the sender-counting window, in cycles.
pub const WINDOW_CYCLES: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SensingError {
    #[error("BSM from {sender} received at {recv_time}s before it was generated at {gen_time}s")]
    Acausal {
        sender: TerminalId,
        gen_time: f64,
        recv_time: f64,
    },
    #[error("BSM from cycle {cycle} is older than the ledger window (current cycle {current})")]
    Stale { cycle: u64, current: u64 },
}

/// A metric that cannot be computed because the messages it needs were not
/// received.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no receptions to measure from")]
pub struct Undefined;

#[derive(Debug, Clone, Default)]
struct CycleSlot {
    cycle: u64,
    delays: BTreeMap<TerminalId, f64>,
}

#[derive(Debug, Clone, Default)]
struct NetworkLog {
    /// Newest first, at most [`WINDOW_CYCLES`] entries.
    window: VecDeque<CycleSlot>,
    last_seen: BTreeMap<TerminalId, u64>,
}

impl NetworkLog {
    fn slot(&self, cycle: u64) -> Option<&CycleSlot> {
        self.window.iter().find(|s| s.cycle == cycle)
    }
}

#[derive(Debug, Clone)]
pub struct ReceptionLedger {
    trailing: usize,
    current: u64,
    logs: PerNetwork<NetworkLog>,
}

impl ReceptionLedger {
    pub fn new(cycle_length: f64) -> Self {
        ReceptionLedger {
            trailing: trailing_cycles(cycle_length),
            current: 0,
            logs: PerNetwork::default(),
        }
    }

    pub fn current_cycle(&self) -> u64 {
        self.current
    }

    /// Length of the trailing sender record, in cycles.
    pub fn trailing_cycles(&self) -> usize {
        self.trailing
    }

    /// Moves the ledger to `cycle`, expiring data that falls out of the
    /// windows. Moving backwards is a no-op.
    pub fn advance_to(&mut self, cycle: u64) {
        if cycle < self.current {
            return;
        }
        self.current = cycle;
        let window_floor = (self.current + 1).saturating_sub(WINDOW_CYCLES as u64);
        let trailing_floor = (self.current + 1).saturating_sub(self.trailing as u64);
        for kind in NetworkKind::ALL {
            let log = &mut self.logs[kind];
            while log.window.back().is_some_and(|s| s.cycle < window_floor) {
                log.window.pop_back();
            }
            log.last_seen.retain(|_, seen| *seen >= trailing_floor);
        }
    }

    /// Logs `bsm` as received at `recv_time`. A second reception of the same
    /// sender in the same cycle replaces the first.
    pub fn record_reception(&mut self, bsm: &Bsm, recv_time: f64) -> Result<(), SensingError> {
        if recv_time < bsm.gen_time {
            return Err(SensingError::Acausal {
                sender: bsm.sender_id,
                gen_time: bsm.gen_time,
                recv_time,
            });
        }
        if bsm.cycle_seq > self.current {
            self.advance_to(bsm.cycle_seq);
        }
        let floor = (self.current + 1).saturating_sub(WINDOW_CYCLES as u64);
        if bsm.cycle_seq < floor {
            return Err(SensingError::Stale {
                cycle: bsm.cycle_seq,
                current: self.current,
            });
        }

        let log = &mut self.logs[bsm.network];
        let pos = log.window.iter().position(|s| s.cycle <= bsm.cycle_seq);
        let slot = match pos {
            Some(i) if log.window[i].cycle == bsm.cycle_seq => &mut log.window[i],
            Some(i) => {
                log.window.insert(i, CycleSlot { cycle: bsm.cycle_seq, ..Default::default() });
                &mut log.window[i]
            }
            None => {
                log.window.push_back(CycleSlot { cycle: bsm.cycle_seq, ..Default::default() });
                log.window.back_mut().unwrap()
            }
        };
        slot.delays.insert(bsm.sender_id, recv_time - bsm.gen_time);
        let seen = log.last_seen.entry(bsm.sender_id).or_insert(bsm.cycle_seq);
        *seen = (*seen).max(bsm.cycle_seq);
        Ok(())
    }

    /// Distinct senders heard on `network` within the last three cycles.
    pub fn distinct_senders(&self, network: NetworkKind) -> usize {
        let floor = (self.current + 1).saturating_sub(WINDOW_CYCLES as u64);
        self.logs[network]
            .last_seen
            .values()
            .filter(|&&c| c >= floor)
            .count()
    }

    /// Distinct senders heard on `network` over the trailing second.
    pub fn trailing_senders(&self, network: NetworkKind) -> usize {
        self.logs[network].last_seen.len()
    }

    /// Senders heard on `network` in the current cycle.
    pub fn current_senders(&self, network: NetworkKind) -> usize {
        self.logs[network]
            .slot(self.current)
            .map_or(0, |s| s.delays.len())
    }

    /// Mean propagation delay of the current cycle's receptions.
    pub fn measure_delay(&self, network: NetworkKind) -> Result<f64, Undefined> {
        let slot = self.logs[network].slot(self.current).ok_or(Undefined)?;
        if slot.delays.is_empty() {
            return Err(Undefined);
        }
        Ok(slot.delays.values().sum::<f64>() / slot.delays.len() as f64)
    }

    /// `(trailing − current) / current` sender counts, floored at zero.
    pub fn measure_plr(&self, network: NetworkKind) -> Result<f64, Undefined> {
        let current = self.current_senders(network);
        if current == 0 {
            return Err(Undefined);
        }
        let trailing = self.trailing_senders(network);
        Ok((trailing as f64 - current as f64).max(0.0) / current as f64)
    }

    /// Mean absolute change in per-sender delay between the previous and the
    /// current cycle, over senders heard in both.
    pub fn measure_jitter(&self, network: NetworkKind) -> Result<f64, Undefined> {
        let log = &self.logs[network];
        let now = log.slot(self.current).ok_or(Undefined)?;
        let prev = self
            .current
            .checked_sub(1)
            .and_then(|c| log.slot(c))
            .ok_or(Undefined)?;
        let (sum, count) = now
            .delays
            .iter()
            .filter_map(|(id, d)| prev.delays.get(id).map(|p| (d - p).abs()))
            .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
        if count == 0 {
            return Err(Undefined);
        }
        Ok(sum / count as f64)
    }

    /// All three metrics; each may be undefined independently.
    pub fn measure(&self, network: NetworkKind) -> Measurement {
        Measurement {
            delay: self.measure_delay(network).ok(),
            plr: self.measure_plr(network).ok(),
            jitter: self.measure_jitter(network).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub delay: Option<f64>,
    pub plr: Option<f64>,
    pub jitter: Option<f64>,
}

impl Measurement {
    pub fn is_complete(&self) -> bool {
        self.delay.is_some() && self.plr.is_some() && self.jitter.is_some()
    }

    /// Fills undefined metrics from `prior`.
    pub fn or_prior(&self, prior: &Perf) -> Perf {
        Perf {
            delay: self.delay.unwrap_or(prior.delay),
            plr: self.plr.unwrap_or(prior.plr),
            jitter: self.jitter.unwrap_or(prior.jitter),
        }
    }
}
