//! Monte-Carlo experiment runners. Trial `k` uses the channel drawn with
//! seed `seed ^ k`; trials run in parallel and are aggregated in index
//! order, so results depend only on the inputs.

use crate::channel::{trial_seed, ChannelEnsembleSpec, ChannelError};
use crate::heuristic::heuristic_choice;
use crate::mrt::grid_argmax;
use crate::rates::{tdma_sum_rate, DecodingStructure};
use crate::sumrate::{max_sum_rate, structure_max, SumRateError};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    SumRate(#[from] SumRateError),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("{0} is not supported here")]
    Unsupported(DecodingStructure),
}

/// `10^(db / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Shared experiment settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub n_lambda: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { trials: 500, seed: 0, n_lambda: 201 }
    }
}

fn run_trials<T: Send, F>(cfg: &McConfig, f: F) -> Result<Vec<T>, MonteCarloError>
where
    F: Fn(u64) -> Result<T, MonteCarloError> + Sync,
{
    if cfg.trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    (0..cfg.trials as u64).into_par_iter().map(|k| f(trial_seed(cfg.seed, k))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyRow {
    pub snr_db: f64,
    pub trials: usize,
    /// Fraction of trials whose ND grid argmax is `(unit(h21), unit(h22))`.
    pub interference_pair: f64,
    /// Fraction of trials whose ND grid argmax is `(unit(h11), unit(h22))`.
    pub selfish_pair: f64,
}

/// How often the ND grid argmax sits on each MRT pair, i.i.d. channels.
pub fn mrt_frequency_vs_snr(n: usize, snr_db: &[f64], cfg: &McConfig) -> Result<Vec<FrequencyRow>, MonteCarloError> {
    let ens = ChannelEnsembleSpec::Iid { n };
    snr_db
        .iter()
        .map(|&db| {
            let p = db_to_linear(db);
            let hits = run_trials(cfg, |seed| {
                let ch = ens.draw(seed)?;
                Ok(match grid_argmax(DecodingStructure::ND, &ch, p, cfg.n_lambda) {
                    // The two categories can only coincide when h11 and h21
                    // are parallel; count interference first.
                    Some(g) if g.is_interference() => (1u32, 0u32),
                    Some(g) if g.is_selfish() => (0, 1),
                    _ => (0, 0),
                })
            })?;
            let t = hits.len() as f64;
            Ok(FrequencyRow {
                snr_db: db,
                trials: hits.len(),
                interference_pair: hits.iter().map(|h| h.0 as f64).sum::<f64>() / t,
                selfish_pair: hits.iter().map(|h| h.1 as f64).sum::<f64>() / t,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRow {
    pub structure: DecodingStructure,
    pub snr_db: f64,
    pub trials: usize,
    /// Mean of `(best - best MRT) / best`.
    pub mean_relative_loss: f64,
}

/// Labels of the heuristic entries that are MRT pairs of a structure.
fn mrt_labels(s: DecodingStructure) -> Option<&'static [&'static str]> {
    match s {
        DecodingStructure::ND => Some(&["ND(h21,h22)", "ND(h11,h22)"]),
        DecodingStructure::DD => Some(&["DD(h21,h12)", "DD(h11,h22)", "DD(h21,h22)", "DD(h11,h12)"]),
        _ => None,
    }
}

/// Relative loss of the best full-power MRT pair against the structure's
/// own maximum sum rate. Only ND and DD are accepted.
pub fn rate_loss_vs_snr(
    s: DecodingStructure,
    n: usize,
    snr_db: &[f64],
    cfg: &McConfig,
) -> Result<Vec<LossRow>, MonteCarloError> {
    let ens = ChannelEnsembleSpec::Iid { n };
    let labels = mrt_labels(s).ok_or(MonteCarloError::Unsupported(s))?;
    snr_db
        .iter()
        .map(|&db| {
            let p = db_to_linear(db);
            let losses = run_trials(cfg, |seed| {
                let ch = ens.draw(seed)?;
                let best = structure_max(s, &ch, p, cfg.n_lambda)?.rate;
                let h = heuristic_choice(&ch, p)?;
                let mrt = h
                    .table
                    .iter()
                    .filter(|e| labels.contains(&e.label.as_str()))
                    .map(|e| e.rate)
                    .fold(f64::NEG_INFINITY, f64::max);
                Ok(if best > 0.0 { ((best - mrt) / best).max(0.0) } else { 0.0 })
            })?;
            Ok(LossRow {
                structure: s,
                snr_db: db,
                trials: losses.len(),
                mean_relative_loss: losses.iter().sum::<f64>() / losses.len() as f64,
            })
        })
        .collect()
}

/// Mean sum rates at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// The swept value (SIR linear, or SNR in dB).
    pub x: f64,
    pub trials: usize,
    /// NN, ND, DN, DD.
    pub per_structure: [f64; 4],
    pub tdma: f64,
    /// Mean of the per-trial best over the four structures.
    pub max: f64,
    /// Mean of the heuristic's per-trial choice.
    pub heuristic: f64,
}

impl SweepRow {
    /// Label of the largest mean among NN, ND, DN, DD and TDMA (ties to the
    /// earlier one).
    pub fn best_label(&self) -> &'static str {
        let names = ["NN", "ND", "DN", "DD", "TDMA"];
        let vals = [self.per_structure[0], self.per_structure[1], self.per_structure[2], self.per_structure[3], self.tdma];
        let mut k = 0;
        for i in 1..5 {
            if vals[i] > vals[k] {
                k = i;
            }
        }
        names[k]
    }

    /// Mean rate of the best of NN, ND, DN, DD.
    pub fn best_structure_rate(&self) -> f64 {
        self.per_structure.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn sweep_point(ens: ChannelEnsembleSpec, p: f64, x: f64, cfg: &McConfig) -> Result<SweepRow, MonteCarloError> {
    let rows = run_trials(cfg, |seed| {
        let ch = ens.draw(seed)?;
        let m = max_sum_rate(&ch, p, cfg.n_lambda)?;
        let mut per = [0.0; 4];
        for (k, b) in m.per_structure.iter().enumerate() {
            per[k] = b.rate;
        }
        let h = heuristic_choice(&ch, p)?;
        Ok((per, tdma_sum_rate(&ch, p), m.best.rate, h.winner().rate))
    })?;
    let t = rows.len() as f64;
    let mut out = SweepRow { x, trials: rows.len(), per_structure: [0.0; 4], tdma: 0.0, max: 0.0, heuristic: 0.0 };
    for (per, tdma, best, heur) in &rows {
        for k in 0..4 {
            out.per_structure[k] += per[k] / t;
        }
        out.tdma += tdma / t;
        out.max += best / t;
        out.heuristic += heur / t;
    }
    Ok(out)
}

/// Symmetric channels at fixed angle and SNR, swept over SIR (linear).
pub fn sweep_sir(
    n: usize,
    theta: f64,
    sir: &[f64],
    snr_db: f64,
    cfg: &McConfig,
) -> Result<Vec<SweepRow>, MonteCarloError> {
    let p = db_to_linear(snr_db);
    sir.iter().map(|&s| sweep_point(ChannelEnsembleSpec::Symmetric { n, sir: s, theta }, p, s, cfg)).collect()
}

/// Symmetric channels at fixed angle and SIR, swept over SNR (dB).
pub fn sweep_snr(
    n: usize,
    theta: f64,
    sir: f64,
    snr_db: &[f64],
    cfg: &McConfig,
) -> Result<Vec<SweepRow>, MonteCarloError> {
    let ens = ChannelEnsembleSpec::Symmetric { n, sir, theta };
    snr_db.iter().map(|&db| sweep_point(ens, db_to_linear(db), db, cfg)).collect()
}
