//! Hidden Markov models whose per-state output is a product of independent
//! per-feature distributions: categorical for discrete features, Gaussian for
//! linear ones and von Mises for angles.
//!
//! Training is Baum-Welch. Every M-step update is checked against the
//! expected complete-data log-likelihood of the parameters it replaces, so
//! the floors, caps, pseudo-counts and resets never lower the training
//! likelihood.

mod io;
pub mod vonmises;

use rayon::prelude::*;

pub use io::{parse_hmm, render_hmm};
pub use vonmises::{estimate_kappa, mean_resultant_length, von_mises_logpdf};

use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureSeries, FeatureSpec};
use crate::stats::log_sum_exp;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, PartialEq)]
pub enum OutputDist {
    Categorical(Vec<f64>),
    Gaussian { mean: f64, var: f64 },
    VonMises { mu: f64, kappa: f64 },
}

impl OutputDist {
    pub fn log_density(&self, x: f64) -> f64 {
        match self {
            OutputDist::Categorical(p) => {
                if x < 0.0 || x.fract() != 0.0 {
                    return f64::NEG_INFINITY;
                }
                p.get(x as usize).map_or(f64::NEG_INFINITY, |&p| p.ln())
            }
            OutputDist::Gaussian { mean, var } => {
                let d = x - mean;
                -0.5 * (LN_2PI + var.ln()) - d * d / (2.0 * var)
            }
            OutputDist::VonMises { mu, kappa } => von_mises_logpdf(*mu, *kappa, x),
        }
    }

    fn matches(&self, kind: FeatureKind) -> bool {
        match (self, kind) {
            (OutputDist::Categorical(p), FeatureKind::Discrete { cardinality }) => p.len() == cardinality,
            (OutputDist::Gaussian { .. }, FeatureKind::Linear) => true,
            (OutputDist::VonMises { .. }, FeatureKind::Angular) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub n_states: usize,
    pub max_iters: usize,
    /// Stop once an iteration gains less total log-likelihood than this.
    pub tol: f64,
    pub var_floor: f64,
    pub kappa_cap: f64,
    /// Added to every categorical expected count.
    pub pseudo_count: f64,
    /// Uniform mass mixed into the initial left-to-right transitions.
    pub transition_smoothing: f64,
    /// States with less posterior mass than this are reset to global moments.
    pub starvation_mass: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            n_states: 10,
            max_iters: 30,
            tol: 1e-4,
            var_floor: 1e-4,
            kappa_cap: 500.0,
            pseudo_count: 0.01,
            transition_smoothing: 0.01,
            starvation_mass: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hmm {
    pub schema: Vec<FeatureSpec>,
    pub initial: Vec<f64>,
    /// Row-stochastic, `transitions[from][to]`.
    pub transitions: Vec<Vec<f64>>,
    /// `outputs[state][feature]`.
    pub outputs: Vec<Vec<OutputDist>>,
}

impl Hmm {
    pub fn n_states(&self) -> usize {
        self.initial.len()
    }

    /// Checks dimensions, stochasticity and per-feature distribution kinds.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_states();
        let stochastic = |p: &[f64]| p.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)) && (p.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        if n == 0 || !stochastic(&self.initial) {
            return Err(Error::invalid("initial distribution is not stochastic"));
        }
        if self.transitions.len() != n || self.transitions.iter().any(|r| r.len() != n || !stochastic(r)) {
            return Err(Error::invalid("transition matrix is not row-stochastic"));
        }
        if self.outputs.len() != n {
            return Err(Error::invalid("one output list per state required"));
        }
        for (s, outs) in self.outputs.iter().enumerate() {
            if outs.len() != self.schema.len() {
                return Err(Error::Schema(format!("state {s} has {} outputs for {} features", outs.len(), self.schema.len())));
            }
            for (o, f) in outs.iter().zip(&self.schema) {
                if !o.matches(f.kind) {
                    return Err(Error::Schema(format!("state {s}: output for {} does not match {}", f.name, f.kind)));
                }
                if let OutputDist::Categorical(p) = o {
                    if !stochastic(p) {
                        return Err(Error::invalid(format!("state {s}: categorical for {} is not stochastic", f.name)));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_schema(&self, series: &FeatureSeries) -> Result<()> {
        if series.schema != self.schema {
            return Err(Error::Schema(format!("series has {} features, model expects {}", series.schema.len(), self.schema.len())));
        }
        Ok(())
    }

    /// `emissions[t][s]`: log-density of frame `t` under state `s`.
    fn emissions(&self, series: &FeatureSeries) -> Vec<Vec<f64>> {
        series
            .frames
            .iter()
            .map(|row| self.outputs.iter().map(|outs| outs.iter().zip(row).map(|(o, &x)| o.log_density(x)).sum()).collect())
            .collect()
    }

    fn log_transitions(&self) -> Vec<Vec<f64>> {
        self.transitions.iter().map(|r| r.iter().map(|p| p.ln()).collect()).collect()
    }
}

fn forward_pass(hmm: &Hmm, emis: &[Vec<f64>], log_a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = hmm.n_states();
    let mut alpha = Vec::with_capacity(emis.len());
    if emis.is_empty() {
        return alpha;
    }
    alpha.push((0..n).map(|s| hmm.initial[s].ln() + emis[0][s]).collect::<Vec<_>>());
    let mut buf = vec![0.0; n];
    for e in &emis[1..] {
        let prev = alpha.last().expect("non-empty");
        let row = (0..n)
            .map(|s| {
                for j in 0..n {
                    buf[j] = prev[j] + log_a[j][s];
                }
                log_sum_exp(&buf) + e[s]
            })
            .collect();
        alpha.push(row);
    }
    alpha
}

fn backward_pass(n: usize, emis: &[Vec<f64>], log_a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t_len = emis.len();
    let mut beta = vec![vec![0.0; n]; t_len];
    let mut buf = vec![0.0; n];
    for t in (0..t_len.saturating_sub(1)).rev() {
        for i in 0..n {
            for j in 0..n {
                buf[j] = log_a[i][j] + emis[t + 1][j] + beta[t + 1][j];
            }
            beta[t][i] = log_sum_exp(&buf);
        }
    }
    beta
}

/// `log P(series | hmm)`; `-inf` when the series is impossible under the model.
pub fn log_forward(hmm: &Hmm, series: &FeatureSeries) -> Result<f64> {
    hmm.check_schema(series)?;
    if series.is_empty() {
        return Ok(0.0);
    }
    let alpha = forward_pass(hmm, &hmm.emissions(series), &hmm.log_transitions());
    Ok(log_sum_exp(alpha.last().expect("non-empty")))
}

/// Most probable state path and its joint log-probability.
pub fn viterbi_decode(hmm: &Hmm, series: &FeatureSeries) -> Result<(Vec<usize>, f64)> {
    hmm.check_schema(series)?;
    if series.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let n = hmm.n_states();
    let emis = hmm.emissions(series);
    let log_a = hmm.log_transitions();
    let mut delta: Vec<f64> = (0..n).map(|s| hmm.initial[s].ln() + emis[0][s]).collect();
    let mut back = Vec::with_capacity(emis.len());
    for e in &emis[1..] {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut ptr = vec![0usize; n];
        for s in 0..n {
            for j in 0..n {
                let v = delta[j] + log_a[j][s];
                if v > next[s] || (j == 0 && v == next[s]) {
                    next[s] = v;
                    ptr[s] = j;
                }
            }
            next[s] += e[s];
        }
        delta = next;
        back.push(ptr);
    }
    let (mut state, best) =
        delta.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut path = vec![state; emis.len()];
    for (t, ptr) in back.iter().enumerate().rev() {
        state = ptr[state];
        path[t] = state;
    }
    Ok((path, best))
}

/// Posterior quantities for one training sequence.
struct Posterior {
    log_likelihood: f64,
    /// `gamma[t][s]`
    gamma: Vec<Vec<f64>>,
    /// Expected transition counts summed over time.
    xi: Vec<Vec<f64>>,
}

fn posterior(hmm: &Hmm, series: &FeatureSeries, log_a: &[Vec<f64>]) -> Posterior {
    let n = hmm.n_states();
    let emis = hmm.emissions(series);
    let alpha = forward_pass(hmm, &emis, log_a);
    let beta = backward_pass(n, &emis, log_a);
    let ll = log_sum_exp(alpha.last().expect("non-empty"));
    let gamma = alpha.iter().zip(&beta).map(|(a, b)| (0..n).map(|s| (a[s] + b[s] - ll).exp()).collect()).collect();
    let mut xi = vec![vec![0.0; n]; n];
    for t in 0..emis.len().saturating_sub(1) {
        for i in 0..n {
            for j in 0..n {
                let v = alpha[t][i] + log_a[i][j] + emis[t + 1][j] + beta[t + 1][j] - ll;
                xi[i][j] += v.exp();
            }
        }
    }
    Posterior { log_likelihood: ll, gamma, xi }
}

/// Weighted observations of one feature pooled over all sequences.
struct Column<'a> {
    sets: &'a [FeatureSeries],
    feature: usize,
}

impl Column<'_> {
    fn iter<'w>(&'w self, weights: &'w [Vec<Vec<f64>>], state: usize) -> impl Iterator<Item = (f64, f64)> + 'w {
        self.sets.iter().zip(weights).flat_map(move |(s, g)| s.frames.iter().zip(g).map(move |(row, gs)| (gs[state], row[self.feature])))
    }
}

fn expected_log(dist: &OutputDist, obs: &[(f64, f64)]) -> f64 {
    obs.iter().filter(|(w, _)| *w > 0.0).map(|&(w, x)| w * dist.log_density(x)).sum()
}

/// M-step for one state/feature. `old` is `None` during initialization, when
/// no safeguard applies.
fn update_output(kind: FeatureKind, obs: &[(f64, f64)], old: Option<&OutputDist>, prior: &OutputDist, params: &TrainParams) -> OutputDist {
    let mass: f64 = obs.iter().map(|(w, _)| w).sum();
    let keep_better = |candidate: OutputDist| -> OutputDist {
        match old {
            Some(o) if expected_log(o, obs) > expected_log(&candidate, obs) => o.clone(),
            _ => candidate,
        }
    };
    if mass < params.starvation_mass {
        return keep_better(prior.clone());
    }
    match kind {
        FeatureKind::Linear => {
            let mean = obs.iter().map(|(w, x)| w * x).sum::<f64>() / mass;
            let var = obs.iter().map(|(w, x)| w * (x - mean) * (x - mean)).sum::<f64>() / mass;
            // The floored variance is the exact constrained maximizer.
            OutputDist::Gaussian { mean, var: var.max(params.var_floor) }
        }
        FeatureKind::Angular => {
            let c = obs.iter().map(|(w, x)| w * x.cos()).sum::<f64>();
            let s = obs.iter().map(|(w, x)| w * x.sin()).sum::<f64>();
            let mu = crate::geometry::wrap_angle(s.atan2(c));
            let r_bar = (c.hypot(s) / mass).min(1.0);
            let kappa = estimate_kappa(r_bar, params.kappa_cap);
            let candidate = OutputDist::VonMises { mu, kappa };
            // The concentration estimate is approximate; fall back to the old
            // concentration around the new mean if that scores higher.
            match old {
                Some(OutputDist::VonMises { kappa: old_kappa, .. }) => {
                    let alt = OutputDist::VonMises { mu, kappa: *old_kappa };
                    if expected_log(&alt, obs) > expected_log(&candidate, obs) {
                        alt
                    } else {
                        candidate
                    }
                }
                _ => candidate,
            }
        }
        FeatureKind::Discrete { cardinality } => {
            let mut counts = vec![0.0; cardinality];
            for &(w, x) in obs {
                if let Some(c) = counts.get_mut(x as usize) {
                    *c += w;
                }
            }
            let total: f64 = counts.iter().sum();
            let ml: Vec<f64> = counts.iter().map(|c| c / total).collect();
            let eps = params.pseudo_count;
            let smooth_total = total + eps * cardinality as f64;
            let smoothed: Vec<f64> = counts.iter().map(|c| (c + eps) / smooth_total).collect();
            let q = |p: &[f64]| -> f64 { counts.iter().zip(p).filter(|(c, _)| **c > 0.0).map(|(c, p)| c * p.ln()).sum() };
            let floor = match old {
                Some(OutputDist::Categorical(p)) => q(p),
                _ => f64::NEG_INFINITY,
            };
            if q(&smoothed) >= floor {
                return OutputDist::Categorical(smoothed);
            }
            // Largest mix toward the smoothed estimate that still improves on
            // the old parameters; the pure count estimate always does.
            let mix = |t: f64| -> Vec<f64> { ml.iter().zip(&smoothed).map(|(a, b)| (1.0 - t) * a + t * b).collect() };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if q(&mix(mid)) >= floor {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let p = mix(lo);
            let sum: f64 = p.iter().sum();
            OutputDist::Categorical(p.iter().map(|x| x / sum).collect())
        }
    }
}

/// Per-feature fallback distributions from unweighted global moments.
fn global_priors(schema: &[FeatureSpec], sets: &[FeatureSeries], params: &TrainParams) -> Vec<OutputDist> {
    schema
        .iter()
        .enumerate()
        .map(|(f, spec)| {
            let obs: Vec<(f64, f64)> = sets.iter().flat_map(|s| s.frames.iter().map(move |r| (1.0, r[f]))).collect();
            match spec.kind {
                FeatureKind::Discrete { cardinality } => OutputDist::Categorical(vec![1.0 / cardinality as f64; cardinality]),
                FeatureKind::Angular => OutputDist::VonMises { mu: 0.0, kappa: 0.0 },
                kind => update_output(kind, &obs, None, &OutputDist::Gaussian { mean: 0.0, var: 1.0 }, params),
            }
        })
        .collect()
}

fn update_outputs(
    schema: &[FeatureSpec],
    sets: &[FeatureSeries],
    gammas: &[Vec<Vec<f64>>],
    n_states: usize,
    old: Option<&Hmm>,
    priors: &[OutputDist],
    params: &TrainParams,
) -> Vec<Vec<OutputDist>> {
    (0..n_states)
        .map(|s| {
            schema
                .iter()
                .enumerate()
                .map(|(f, spec)| {
                    let col = Column { sets, feature: f };
                    let obs: Vec<(f64, f64)> = col.iter(gammas, s).collect();
                    update_output(spec.kind, &obs, old.map(|h| &h.outputs[s][f]), &priors[f], params)
                })
                .collect()
        })
        .collect()
}

fn check_training_set(sets: &[FeatureSeries]) -> Result<&[FeatureSpec]> {
    let first = sets.first().ok_or_else(|| Error::invalid("empty training set"))?;
    if sets.iter().any(|s| s.schema != first.schema) {
        return Err(Error::Schema("training series differ in schema".into()));
    }
    if sets.iter().all(FeatureSeries::is_empty) {
        return Err(Error::invalid("training series are all empty"));
    }
    Ok(&first.schema)
}

/// Left-to-right initial model: each sequence is cut into `n_states` equal
/// segments whose moments seed the outputs; each state stays with probability
/// `1 - n_states / mean_length` (clamped to [0.5, 0.95]) and otherwise
/// advances, then a little uniform mass is mixed into every row.
pub fn init_left_to_right(sets: &[FeatureSeries], params: &TrainParams) -> Result<Hmm> {
    let schema = check_training_set(sets)?.to_vec();
    let n = params.n_states.max(1);
    let gammas: Vec<Vec<Vec<f64>>> = sets
        .iter()
        .map(|s| {
            let t_len = s.len();
            (0..t_len)
                .map(|t| {
                    let state = (t * n / t_len.max(1)).min(n - 1);
                    (0..n).map(|j| if j == state { 1.0 } else { 0.0 }).collect()
                })
                .collect()
        })
        .collect();
    let priors = global_priors(&schema, sets, params);
    let outputs = update_outputs(&schema, sets, &gammas, n, None, &priors, params);
    let mean_len = sets.iter().map(FeatureSeries::len).sum::<usize>() as f64 / sets.len() as f64;
    let stay = (1.0 - n as f64 / mean_len.max(1.0)).clamp(0.5, 0.95);
    let eps = params.transition_smoothing;
    let transitions = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let base = if i == n - 1 {
                        if j == i {
                            1.0
                        } else {
                            0.0
                        }
                    } else if j == i {
                        stay
                    } else if j == i + 1 {
                        1.0 - stay
                    } else {
                        0.0
                    };
                    (1.0 - eps) * base + eps / n as f64
                })
                .collect()
        })
        .collect();
    let initial = (0..n).map(|j| (1.0 - eps) * if j == 0 { 1.0 } else { 0.0 } + eps / n as f64).collect();
    Ok(Hmm { schema, initial, transitions, outputs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Total training log-likelihood before each M-step and after the last.
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
}

/// Baum-Welch from `init`. Stops when an iteration gains less than `tol` or
/// after `max_iters` M-steps.
pub fn baum_welch(init: &Hmm, sets: &[FeatureSeries], params: &TrainParams) -> Result<(Hmm, TrainReport)> {
    let schema = check_training_set(sets)?;
    if schema != init.schema.as_slice() {
        return Err(Error::Schema("training series do not match the model schema".into()));
    }
    init.validate()?;
    let sets: Vec<FeatureSeries> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
    let priors = global_priors(schema, &sets, params);
    let n = init.n_states();
    let mut hmm = init.clone();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let log_a = hmm.log_transitions();
        let posts: Vec<Posterior> = sets.par_iter().map(|s| posterior(&hmm, s, &log_a)).collect();
        let total: f64 = posts.iter().map(|p| p.log_likelihood).sum();
        let converged = history.last().is_some_and(|&prev: &f64| total - prev < params.tol);
        history.push(total);
        if converged || iterations >= params.max_iters || !total.is_finite() {
            break;
        }
        iterations += 1;

        let mut initial = vec![0.0; n];
        let mut trans = vec![vec![0.0; n]; n];
        for p in &posts {
            for (s, g) in p.gamma[0].iter().enumerate() {
                initial[s] += g;
            }
            for (row, xr) in trans.iter_mut().zip(&p.xi) {
                for (a, x) in row.iter_mut().zip(xr) {
                    *a += x;
                }
            }
        }
        let init_sum: f64 = initial.iter().sum();
        let new_initial = initial.iter().map(|c| c / init_sum).collect();
        let new_trans = trans
            .iter()
            .zip(&hmm.transitions)
            .map(|(row, old)| {
                let sum: f64 = row.iter().sum();
                if sum > 0.0 {
                    row.iter().map(|c| c / sum).collect()
                } else {
                    old.clone()
                }
            })
            .collect();
        let gammas: Vec<Vec<Vec<f64>>> = posts.into_iter().map(|p| p.gamma).collect();
        let outputs = update_outputs(schema, &sets, &gammas, n, Some(&hmm), &priors, params);
        hmm = Hmm { schema: schema.to_vec(), initial: new_initial, transitions: new_trans, outputs };
    }
    Ok((hmm, TrainReport { log_likelihoods: history, iterations }))
}

/// Initializes left-to-right and runs Baum-Welch.
pub fn train(sets: &[FeatureSeries], params: &TrainParams) -> Result<(Hmm, TrainReport)> {
    let init = init_left_to_right(sets, params)?;
    baum_welch(&init, sets, params)
}

#[cfg(test)]
mod tests;
