//! Reversible-jump Metropolis–Hastings over inclusion vectors.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::model::{Dataset, ModelState};
use crate::prior::PriorConfig;

const P_BIRTH: f64 = 0.4;
const P_DEATH: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Birth,
    Death,
    Swap,
}

/// Log of the proposal-count correction `q(γ' → γ) / q(γ → γ')`
/// for a model with `size` of `candidates` covariates.
pub fn log_hastings(mv: Move, size: usize, candidates: usize) -> f64 {
    match mv {
        Move::Birth => ((candidates - size) as f64).ln() - ((size + 1) as f64).ln(),
        Move::Death => (size as f64).ln() - ((candidates - size + 1) as f64).ln(),
        Move::Swap => 0.0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainConfig {
    pub draws: usize,
    pub burnin: usize,
    pub seed: u64,
    /// Stream index so parallel chains from one seed never overlap.
    pub stream: u64,
    pub prior: PriorConfig,
    /// Steps between from-scratch recomputations; 0 disables.
    pub audit_every: usize,
}

impl ChainConfig {
    /// `draws` total steps with 20% burn-in.
    pub fn new(draws: usize, seed: u64) -> Self {
        Self {
            draws,
            burnin: draws / 5,
            seed,
            stream: 0,
            prior: PriorConfig::default(),
            audit_every: 1000,
        }
    }
}

/// Chain state plus the index sets needed for O(1) uniform picks.
#[derive(Clone, Debug)]
pub struct Sampler {
    pub hp: Hyperparams,
    pub prior: PriorConfig,
    state: ModelState,
    log_post: f64,
    excluded: Vec<usize>,
    /// Position in `excluded`, or `usize::MAX` when included.
    slot: Vec<usize>,
    rng: ChaCha8Rng,
    pub proposed: u64,
    pub accepted: u64,
    /// Proposals rejected because the update broke down numerically.
    pub breakdowns: u64,
}

impl Sampler {
    pub fn new(data: &Dataset, hp: Hyperparams, prior: PriorConfig, seed: u64, stream: u64) -> Result<Self> {
        hp.validate()?;
        let state = ModelState::null(data, &hp)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut s = Self {
            hp,
            prior,
            log_post: 0.0,
            excluded: Vec::new(),
            slot: Vec::new(),
            rng,
            proposed: 0,
            accepted: 0,
            breakdowns: 0,
            state,
        };
        s.set_state(data, s.state.clone());
        Ok(s)
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn log_post(&self) -> f64 {
        self.log_post
    }

    fn log_posterior(&self, data: &Dataset, st: &ModelState) -> f64 {
        st.log_ml + self.prior.log_prior(st.size(), data.candidates(), &self.hp)
    }

    /// Replaces the current state and rebuilds the index sets.
    pub fn set_state(&mut self, data: &Dataset, state: ModelState) {
        let p = data.p();
        self.slot = vec![usize::MAX; p];
        self.excluded.clear();
        for j in 1..p {
            if !state.included[j] {
                self.slot[j] = self.excluded.len();
                self.excluded.push(j);
            }
        }
        self.log_post = self.log_posterior(data, &state);
        self.state = state;
    }

    fn include(&mut self, j: usize) {
        let at = self.slot[j];
        let last = *self.excluded.last().expect("excluded set is nonempty");
        self.excluded.swap_remove(at);
        if last != j {
            self.slot[last] = at;
        }
        self.slot[j] = usize::MAX;
    }

    fn exclude(&mut self, j: usize) {
        self.slot[j] = self.excluded.len();
        self.excluded.push(j);
    }

    fn propose(&mut self, data: &Dataset) -> Option<(Move, Result<ModelState>, usize, usize)> {
        let u: f64 = self.rng.gen();
        let size = self.state.size();
        let mv = if u < P_BIRTH {
            Move::Birth
        } else if u < P_BIRTH + P_DEATH {
            Move::Death
        } else {
            Move::Swap
        };
        let can_add = !self.excluded.is_empty();
        let can_drop = size > 0;
        let hp = self.hp;
        match mv {
            Move::Birth if can_add => {
                let j = self.excluded[self.rng.gen_range(0..self.excluded.len())];
                Some((mv, self.state.birth(data, j, &hp), j, usize::MAX))
            }
            Move::Death if can_drop => {
                let pos = self.rng.gen_range(1..=size);
                let gone = self.state.cols[pos];
                Some((mv, self.state.death(data, pos, &hp), usize::MAX, gone))
            }
            Move::Swap if can_add && can_drop => {
                let pos = self.rng.gen_range(1..=size);
                let gone = self.state.cols[pos];
                let j = self.excluded[self.rng.gen_range(0..self.excluded.len())];
                let next = self.state.death(data, pos, &hp).and_then(|s| s.birth(data, j, &hp));
                Some((mv, next, j, gone))
            }
            _ => None,
        }
    }

    /// One reversible-jump step; returns whether the state changed.
    pub fn step(&mut self, data: &Dataset) -> bool {
        self.proposed += 1;
        let size = self.state.size();
        let Some((mv, next, added, removed)) = self.propose(data) else {
            return false;
        };
        let next = match next {
            Ok(s) => s,
            Err(e) => {
                log::debug!("proposal rejected after numerical failure: {e}");
                self.breakdowns += 1;
                return false;
            }
        };
        let lp = self.log_posterior(data, &next);
        let log_ratio = lp - self.log_post + log_hastings(mv, size, data.candidates());
        let u: f64 = self.rng.gen();
        if u.ln() >= log_ratio {
            return false;
        }
        if removed != usize::MAX {
            self.exclude(removed);
        }
        if added != usize::MAX {
            self.include(added);
        }
        self.state = next;
        self.log_post = lp;
        self.accepted += 1;
        true
    }

    /// Refactorizes the current model from scratch, replaces the cached
    /// state, and returns the relative log-marginal discrepancy.
    pub fn audit(&mut self, data: &Dataset) -> Result<f64> {
        let fresh = ModelState::from_scratch(data, &self.state.cols, &self.hp)?;
        let err = (fresh.log_ml - self.state.log_ml).abs() / fresh.log_ml.abs().max(1.0);
        self.set_state(data, fresh);
        Ok(err)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainSummary {
    pub p: usize,
    /// Post-burn-in draws summarized.
    pub kept: usize,
    pub mip: Vec<f64>,
    pub mpm: Vec<bool>,
    /// Best visited model (sorted columns) and its log posterior.
    pub map: Vec<usize>,
    pub map_log_post: f64,
    /// Visited models (sorted columns) with relative frequencies, most frequent first.
    pub pmp_top: Vec<(Vec<usize>, f64)>,
    pub beta_bma: Vec<f64>,
    pub beta_mpm: Vec<f64>,
    pub acceptance_rate: f64,
    pub audit_max_error: f64,
    pub breakdowns: u64,
}

impl ChainSummary {
    /// Estimated posterior probability of the model with these columns.
    pub fn frequency_of(&self, cols: &[usize]) -> f64 {
        let mut key = cols.to_vec();
        key.sort_unstable();
        self.pmp_top.iter().find(|(m, _)| *m == key).map_or(0.0, |(_, f)| *f)
    }
}

struct Tally {
    counts: Vec<u64>,
    beta: Vec<f64>,
    models: HashMap<Vec<usize>, u64>,
}

impl Tally {
    /// Credits `run` draws to the model `cols` (factor order) with mean `beta`.
    fn record(&mut self, cols: &[usize], beta: &[f64], run: u64) {
        if run == 0 {
            return;
        }
        for (&c, &b) in cols.iter().zip(beta) {
            self.counts[c] += run;
            self.beta[c] += b * run as f64;
        }
        let mut key = cols.to_vec();
        key.sort_unstable();
        *self.models.entry(key).or_insert(0) += run;
    }
}

/// Runs one chain from the intercept-only model.
///
/// Draw `t` is the state after step `t`; the first `burnin` are discarded.
pub fn run_chain(data: &Dataset, hp: &Hyperparams, cfg: &ChainConfig) -> Result<ChainSummary> {
    if cfg.draws <= cfg.burnin {
        return Err(Error::InvalidConfig(format!("draws ({}) must exceed burn-in ({})", cfg.draws, cfg.burnin)));
    }
    let p = data.p();
    let mut s = Sampler::new(data, *hp, cfg.prior, cfg.seed, cfg.stream)?;
    let mut tally = Tally { counts: vec![0; p], beta: vec![0.0; p], models: HashMap::new() };
    let mut map = (s.state().sorted_cols(), s.log_post());
    let mut audit_max: f64 = 0.0;
    let mut cur_cols = s.state().cols.clone();
    let mut cur_beta = s.state().beta_mean()?;
    let mut run = 0u64;
    for t in 0..cfg.draws {
        if s.step(data) {
            tally.record(&cur_cols, &cur_beta, run);
            run = 0;
            cur_cols.clone_from(&s.state().cols);
            cur_beta = s.state().beta_mean()?;
            if s.log_post() > map.1 {
                map = (s.state().sorted_cols(), s.log_post());
            }
        }
        if cfg.audit_every > 0 && (t + 1) % cfg.audit_every == 0 {
            audit_max = audit_max.max(s.audit(data)?);
        }
        if t >= cfg.burnin {
            run += 1;
        }
    }
    tally.record(&cur_cols, &cur_beta, run);

    let kept = cfg.draws - cfg.burnin;
    let kf = kept as f64;
    let mip: Vec<f64> = tally.counts.iter().map(|&c| c as f64 / kf).collect();
    let mpm: Vec<bool> = mip.iter().map(|&m| m >= 0.5).collect();
    let beta_bma = tally.beta.iter().map(|b| b / kf).collect();
    let mpm_cols: Vec<usize> = (0..p).filter(|&j| j == 0 || mpm[j]).collect();
    let mpm_state = ModelState::from_scratch(data, &mpm_cols, hp)?;
    let mut beta_mpm = vec![0.0; p];
    for (&c, b) in mpm_cols.iter().zip(mpm_state.beta_mean()?) {
        beta_mpm[c] = b;
    }
    let mut pmp_top: Vec<(Vec<usize>, f64)> = tally.models.into_iter().map(|(m, c)| (m, c as f64 / kf)).collect();
    pmp_top.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ChainSummary {
        p,
        kept,
        mip,
        mpm,
        map: map.0,
        map_log_post: map.1,
        pmp_top,
        beta_bma,
        beta_mpm,
        acceptance_rate: s.accepted as f64 / s.proposed as f64,
        audit_max_error: audit_max,
        breakdowns: s.breakdowns,
    })
}
