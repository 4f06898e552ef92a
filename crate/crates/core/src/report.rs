//! Run summaries, convergence detection and CSV output.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::domain::{NetworkKind, PerNetwork};
use crate::engine::CycleRecord;

pub const CSV_HEADER: &str = "cycle,time_s,count_dsrc,count_lte,count_wifi,handoffs,avg_score,score_dsrc,score_lte,score_wifi,delay_dsrc,delay_lte,delay_wifi,plr_dsrc,plr_lte,plr_wifi,jit_dsrc,jit_lte,jit_wifi";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot summarize an empty run")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// First cycle `c` such that every entry in `c..c + window` is at most
/// `threshold`.
pub fn detect_convergence(handoffs: &[u32], threshold: u32, window: usize) -> Option<usize> {
    assert!(window >= 1, "window must be positive");
    let mut run = 0;
    for (i, &h) in handoffs.iter().enumerate() {
        if h <= threshold {
            run += 1;
            if run == window {
                return Some(i + 1 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub converged_at_cycle: Option<usize>,
    /// Mean handoffs per cycle from convergence on, or over the whole run if
    /// it never converged.
    pub pingpong_index: f64,
    pub total_handoffs: u64,
    pub mean_avg_score: f64,
    /// Mean attachment per network over the same span as `pingpong_index`.
    pub mean_counts_post: PerNetwork<f64>,
    pub num_cycles: usize,
    pub total_terminals: u32,
}

fn mean_counts(records: &[CycleRecord]) -> PerNetwork<f64> {
    let n = records.len().max(1) as f64;
    PerNetwork::from_fn(|k| records.iter().map(|r| f64::from(r.counts[k])).sum::<f64>() / n)
}

pub fn summarize(records: &[CycleRecord], threshold: u32, window: usize) -> Result<RunSummary, ReportError> {
    let first = records.first().ok_or(ReportError::Empty)?;
    let handoffs: Vec<u32> = records.iter().map(|r| r.handoffs).collect();
    let converged_at_cycle = detect_convergence(&handoffs, threshold, window);
    let tail = &records[converged_at_cycle.unwrap_or(0)..];
    let pingpong_index = tail.iter().map(|r| f64::from(r.handoffs)).sum::<f64>() / tail.len() as f64;
    Ok(RunSummary {
        converged_at_cycle,
        pingpong_index,
        total_handoffs: handoffs.iter().map(|&h| u64::from(h)).sum(),
        mean_avg_score: records.iter().map(|r| r.avg_score).sum::<f64>() / records.len() as f64,
        mean_counts_post: mean_counts(tail),
        num_cycles: records.len(),
        total_terminals: first.counts.dsrc + first.counts.lte + first.counts.wifi,
    })
}

/// Mean attachment over the last quarter of the run.
pub fn steady_state_counts(records: &[CycleRecord]) -> PerNetwork<f64> {
    let keep = (records.len() / 4).max(1).min(records.len());
    mean_counts(&records[records.len() - keep..])
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.converged_at_cycle {
            Some(c) => writeln!(f, "converged at cycle  {c}")?,
            None => writeln!(f, "converged at cycle  never")?,
        }
        writeln!(f, "ping-pong index     {:.4} handoffs/cycle", self.pingpong_index)?;
        writeln!(f, "total handoffs      {} over {} cycles", self.total_handoffs, self.num_cycles)?;
        writeln!(f, "mean avg score      {:.6}", self.mean_avg_score)?;
        write!(f, "mean counts post    ")?;
        for (i, k) in NetworkKind::ALL.into_iter().enumerate() {
            let sep = if i == 0 { "" } else { ", " };
            write!(f, "{sep}{k} {:.2}", self.mean_counts_post[k])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Game handoffs per cycle over baseline handoffs per cycle.
    pub handoff_rate_ratio: f64,
    /// Chance a given terminal hands off in a given cycle.
    pub game_per_terminal: f64,
    pub baseline_per_terminal: f64,
    pub game_converged_at: Option<usize>,
    pub baseline_converged_at: Option<usize>,
    pub game_pingpong: f64,
    pub baseline_pingpong: f64,
}

fn rate(s: &RunSummary) -> f64 {
    s.total_handoffs as f64 / s.num_cycles as f64
}

pub fn compare(game: &RunSummary, baseline: &RunSummary) -> Comparison {
    let (g, b) = (rate(game), rate(baseline));
    let handoff_rate_ratio = if g == b { 1.0 } else { g / b };
    Comparison {
        handoff_rate_ratio,
        game_per_terminal: g / f64::from(game.total_terminals),
        baseline_per_terminal: b / f64::from(baseline.total_terminals),
        game_converged_at: game.converged_at_cycle,
        baseline_converged_at: baseline.converged_at_cycle,
        game_pingpong: game.pingpong_index,
        baseline_pingpong: baseline.pingpong_index,
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conv = |c: Option<usize>| c.map_or("never".to_string(), |c| format!("cycle {c}"));
        writeln!(f, "                    game        baseline")?;
        writeln!(f, "converged           {:<12}{}", conv(self.game_converged_at), conv(self.baseline_converged_at))?;
        writeln!(f, "ping-pong index     {:<12.4}{:.4}", self.game_pingpong, self.baseline_pingpong)?;
        writeln!(f, "per-terminal rate   {:<12.5}{:.5}", self.game_per_terminal, self.baseline_per_terminal)?;
        write!(f, "handoff rate ratio  {:.4}", self.handoff_rate_ratio)
    }
}

pub fn write_csv_to<W: Write>(records: &[CycleRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        write!(
            out,
            "{},{:.6},{},{},{},{},{:.6}",
            r.cycle, r.time_s, r.counts.dsrc, r.counts.lte, r.counts.wifi, r.handoffs, r.avg_score
        )?;
        for v in [r.score, r.perf.map(|_, p| p.delay), r.perf.map(|_, p| p.plr), r.perf.map(|_, p| p.jitter)] {
            write!(out, ",{:.6},{:.6},{:.6}", v.dsrc, v.lte, v.wifi)?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_csv(records: &[CycleRecord], destination: &Path) -> Result<(), ReportError> {
    let wrap = |source| ReportError::Io {
        path: destination.to_path_buf(),
        source,
    };
    let file = File::create(destination).map_err(wrap)?;
    write_csv_to(records, BufWriter::new(file)).map_err(wrap)
}
