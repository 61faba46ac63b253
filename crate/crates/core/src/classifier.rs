//! Per-verb model bank: training, role assignment, ranking and ROC.
//!
//! Every verb gets up to two models, one over a single participant and one
//! over an ordered agent/patient pair. Scenes with two or more tracks are
//! scored only by pair models, single-track scenes only by single models.
//! Scores compared across verbs are log-likelihoods divided by frame count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{
    single_track_features, single_track_schema, two_track_features, two_track_schema, Ablation, FeatureConfig, FeatureSeries,
};
use crate::hmm::{self, log_forward, parse_hmm, render_hmm, Hmm, TrainParams};
use crate::posture::{build_codebook, parse_codebook, pose_vector, render_codebook, Codebook, PoseVector};
use crate::scene::ObjectClassTable;
use crate::stats::{mean, quantile};
use crate::tracker::Track;

/// The 48 verbs, alphabetically.
pub const VERBS: [&str; 48] = [
    "approached",
    "arrived",
    "attached",
    "bounced",
    "buried",
    "carried",
    "caught",
    "chased",
    "closed",
    "collided",
    "digging",
    "dropped",
    "entered",
    "exchanged",
    "exited",
    "fell",
    "fled",
    "flew",
    "followed",
    "gave",
    "got",
    "had",
    "handed",
    "hauled",
    "held",
    "hit",
    "jumped",
    "kicked",
    "left",
    "lifted",
    "moved",
    "opened",
    "passed",
    "picked",
    "pushed",
    "put",
    "raised",
    "ran",
    "received",
    "replaced",
    "snatched",
    "stopped",
    "threw",
    "took",
    "touched",
    "turned",
    "walked",
    "went",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    pub role_search_cap: usize,
    pub min_clips: usize,
    /// Upper bound on v1 in pixels/second.
    pub stationary_speed: f64,
    /// Quantile of training scores used as a model's presence threshold.
    pub threshold_quantile: f64,
    pub codebook_size: usize,
    pub codebook_seed: u64,
    pub train: TrainParams,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            role_search_cap: 6,
            min_clips: 2,
            stationary_speed: 15.0,
            threshold_quantile: 0.05,
            codebook_size: crate::posture::DEFAULT_CODEBOOK_SIZE,
            codebook_seed: 7,
            train: TrainParams::default(),
        }
    }
}

/// One training example. `agent` and `patient` index into `tracks`.
#[derive(Debug, Clone)]
pub struct LabeledClip {
    pub verb: String,
    pub tracks: Vec<Track>,
    pub agent: usize,
    pub patient: Option<usize>,
}

/// Subject speed cutoffs in pixels/second, `v1 <= v3 <= v2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedThresholds {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionModel {
    pub verb: String,
    pub one_track: Option<Hmm>,
    pub two_track: Option<Hmm>,
    pub speeds: SpeedThresholds,
    /// Presence thresholds on per-frame log-likelihood.
    pub threshold_one: Option<f64>,
    pub threshold_two: Option<f64>,
}

/// Per-object-class size and shape statistics from training tracks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectStats {
    pub mean_area: f64,
    pub mean_aspect: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelBank {
    pub features: FeatureConfig,
    pub codebook: Option<Codebook>,
    pub models: BTreeMap<String, ActionModel>,
    pub objects: BTreeMap<String, ObjectStats>,
    pub role_search_cap: usize,
}

impl ModelBank {
    pub fn empty(features: FeatureConfig) -> Self {
        ModelBank { features, codebook: None, models: BTreeMap::new(), objects: BTreeMap::new(), role_search_cap: 6 }
    }

    fn codebook_len(&self) -> usize {
        self.codebook.as_ref().map_or(0, Codebook::len)
    }

    pub fn single_schema(&self) -> Vec<crate::features::FeatureSpec> {
        single_track_schema(&self.features, self.codebook_len())
    }

    pub fn pair_schema(&self) -> Vec<crate::features::FeatureSpec> {
        two_track_schema(&self.features, self.codebook_len())
    }

    pub fn single_features(&self, track: &Track) -> Result<FeatureSeries> {
        single_track_features(track, self.codebook.as_ref(), &self.features)
    }

    pub fn pair_features(&self, agent: &Track, patient: &Track) -> Result<FeatureSeries> {
        two_track_features(agent, patient, self.codebook.as_ref(), &self.features)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub bank: ModelBank,
    pub warnings: Vec<String>,
}

/// Mean per-frame speed of a track's smoothed center, pixels/second.
pub fn mean_speed(track: &Track, fps: f64) -> f64 {
    let (vx, vy) = crate::features::center_velocity(track, fps);
    mean(&vx.iter().zip(&vy).map(|(x, y)| x.hypot(*y)).collect::<Vec<_>>())
}

/// Splits subject speeds into thirds. `v1` is additionally capped by
/// `stationary`.
pub fn speed_thresholds(speeds: &[f64], stationary: f64) -> SpeedThresholds {
    if speeds.is_empty() {
        return SpeedThresholds { v1: stationary, v2: stationary, v3: stationary };
    }
    let v3 = quantile(speeds, 1.0 / 3.0);
    let v2 = quantile(speeds, 2.0 / 3.0);
    SpeedThresholds { v1: stationary.min(v3), v2, v3 }
}

/// Size and shape statistics from per-track mean areas and aspects.
pub fn object_stats(areas: &[f64], aspects: &[f64]) -> ObjectStats {
    let mean_area = mean(areas);
    ObjectStats {
        mean_area,
        mean_aspect: mean(aspects),
        alpha: quantile(areas, 1.0 / 3.0) / mean_area,
        beta: quantile(areas, 2.0 / 3.0) / mean_area,
    }
}

fn pooled_poses(clips: &[LabeledClip], dim: usize) -> Vec<PoseVector> {
    let table = ObjectClassTable::standard();
    clips
        .iter()
        .flat_map(|c| c.tracks.iter())
        .flat_map(|t| t.selections.iter())
        .filter(|d| table.is_person(&d.class) && !d.parts.is_empty())
        .filter_map(|d| pose_vector(d).ok().map(|p| p.fit_to(dim)))
        .collect()
}

fn train_codebook(clips: &[LabeledClip], features: &FeatureConfig, params: &ClassifierParams) -> Result<Codebook> {
    let dim = 2 * features.n_parts;
    let poses = pooled_poses(clips, dim);
    if poses.is_empty() {
        return Ok(Codebook { dim, centroids: vec![vec![0.0; dim]], tree: Vec::new() });
    }
    build_codebook(&poses, params.codebook_size.min(poses.len()), params.codebook_seed)
}

fn presence_threshold(hmm: &Hmm, sets: &[FeatureSeries], q: f64) -> Result<f64> {
    let scores = sets.iter().map(|s| Ok(log_forward(hmm, s)? / s.len() as f64)).collect::<Result<Vec<f64>>>()?;
    Ok(quantile(&scores, q))
}

fn check_clip(clip: &LabeledClip) -> Result<()> {
    let n = clip.tracks.len();
    if clip.agent >= n || clip.patient.is_some_and(|p| p >= n || p == clip.agent) {
        return Err(Error::invalid(format!("clip labeled {} has bad role indices", clip.verb)));
    }
    Ok(())
}

/// Trains a model bank from labeled clips.
pub fn train_bank(clips: &[LabeledClip], features: &FeatureConfig, params: &ClassifierParams) -> Result<TrainOutcome> {
    if clips.is_empty() {
        return Err(Error::invalid("no labeled clips"));
    }
    for c in clips {
        check_clip(c)?;
    }
    let codebook = if features.ablation.discrete() { Some(train_codebook(clips, features, params)?) } else { None };
    let mut bank = ModelBank {
        features: features.clone(),
        codebook,
        models: BTreeMap::new(),
        objects: BTreeMap::new(),
        role_search_cap: params.role_search_cap,
    };

    let mut by_class: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for t in clips.iter().flat_map(|c| c.tracks.iter()).filter(|t| !t.is_empty()) {
        let e = by_class.entry(t.class.as_str()).or_default();
        e.0.push(t.mean_area());
        e.1.push(t.mean_aspect());
    }
    bank.objects = by_class.into_iter().map(|(k, (a, r))| (k.to_string(), object_stats(&a, &r))).collect();

    let mut by_verb: BTreeMap<&str, Vec<&LabeledClip>> = BTreeMap::new();
    for c in clips {
        by_verb.entry(c.verb.as_str()).or_default().push(c);
    }

    let results: Vec<Result<(ActionModel, Vec<String>)>> = by_verb
        .par_iter()
        .map(|(verb, clips)| {
            let mut warnings = Vec::new();
            let singles = clips.iter().map(|c| bank.single_features(&c.tracks[c.agent])).collect::<Result<Vec<_>>>()?;
            let pairs = clips
                .iter()
                .filter_map(|c| c.patient.map(|p| bank.pair_features(&c.tracks[c.agent], &c.tracks[p])))
                .collect::<Result<Vec<_>>>()?;
            let fit = |sets: &[FeatureSeries], arity: u8, warnings: &mut Vec<String>| -> Result<Option<(Hmm, f64)>> {
                if sets.len() < params.min_clips {
                    warnings.push(format!("{verb}: {} clips for the {arity}-track model; omitted", sets.len()));
                    return Ok(None);
                }
                let (hmm, _) = hmm::train(sets, &params.train)?;
                let thr = presence_threshold(&hmm, sets, params.threshold_quantile)?;
                Ok(Some((hmm, thr)))
            };
            let one = fit(&singles, 1, &mut warnings)?;
            let two = fit(&pairs, 2, &mut warnings)?;
            let speeds: Vec<f64> = clips.iter().map(|c| mean_speed(&c.tracks[c.agent], features.fps)).collect();
            let (one_track, threshold_one) = one.map_or((None, None), |(h, t)| (Some(h), Some(t)));
            let (two_track, threshold_two) = two.map_or((None, None), |(h, t)| (Some(h), Some(t)));
            let model = ActionModel {
                verb: verb.to_string(),
                one_track,
                two_track,
                speeds: speed_thresholds(&speeds, params.stationary_speed),
                threshold_one,
                threshold_two,
            };
            Ok((model, warnings))
        })
        .collect();

    let mut warnings = Vec::new();
    for r in results {
        let (model, w) = r?;
        warnings.extend(w);
        if model.one_track.is_some() || model.two_track.is_some() {
            bank.models.insert(model.verb.clone(), model);
        }
    }
    Ok(TrainOutcome { bank, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleAssignment {
    /// Track ids.
    pub agent: usize,
    pub patient: Option<usize>,
    pub log_likelihood: f64,
    /// Log-likelihood per frame.
    pub score: f64,
}

/// Exhaustive search over ordered pairs of distinct ids. `score` returns the
/// log-likelihood and frame count of a pair, or `None` when the pair cannot be
/// scored. The best per-frame score wins; ties keep the lexicographically
/// smaller `(agent, patient)`.
pub fn best_pair<F>(ids: &[usize], mut score: F) -> Option<RoleAssignment>
where
    F: FnMut(usize, usize) -> Option<(f64, usize)>,
{
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    let mut best: Option<RoleAssignment> = None;
    for &a in &sorted {
        for &p in &sorted {
            if a == p {
                continue;
            }
            let Some((ll, frames)) = score(a, p) else { continue };
            let s = ll / frames.max(1) as f64;
            if best.is_none_or(|b| s > b.score) {
                best = Some(RoleAssignment { agent: a, patient: Some(p), log_likelihood: ll, score: s });
            }
        }
    }
    best
}

fn cap_tracks(tracks: &[Track], cap: usize) -> Vec<&Track> {
    let mut v: Vec<&Track> = tracks.iter().collect();
    if v.len() > cap {
        v.sort_by(|a, b| b.len().cmp(&a.len()).then(a.id.cmp(&b.id)));
        v.truncate(cap);
    }
    v.sort_by_key(|t| t.id);
    v
}

/// Series for every ordered pair that overlaps long enough to score.
fn pair_series(bank: &ModelBank, tracks: &[&Track]) -> BTreeMap<(usize, usize), FeatureSeries> {
    let pairs: Vec<(&Track, &Track)> =
        tracks.iter().flat_map(|a| tracks.iter().filter(move |p| p.id != a.id).map(move |p| (*a, *p))).collect();
    pairs
        .par_iter()
        .filter_map(|(a, p)| bank.pair_features(a, p).ok().filter(|s| !s.is_empty()).map(|s| ((a.id, p.id), s)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn assign_from(hmm: &Hmm, ids: &[usize], series: &BTreeMap<(usize, usize), FeatureSeries>) -> Result<Option<RoleAssignment>> {
    let mut err = None;
    let best = best_pair(ids, |a, p| {
        let s = series.get(&(a, p))?;
        match log_forward(hmm, s) {
            Ok(ll) => Some((ll, s.len())),
            Err(e) => {
                err.get_or_insert(e);
                None
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Maximum-likelihood agent/patient mapping for one pair model.
pub fn assign_roles(bank: &ModelBank, hmm: &Hmm, tracks: &[Track]) -> Result<RoleAssignment> {
    if tracks.len() < 2 {
        return Err(Error::invalid("role assignment needs at least two tracks"));
    }
    let kept = cap_tracks(tracks, bank.role_search_cap);
    let ids: Vec<usize> = kept.iter().map(|t| t.id).collect();
    let series = pair_series(bank, &kept);
    assign_from(hmm, &ids, &series)?.ok_or_else(|| Error::invalid("no track pair overlaps long enough to score"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub verb: String,
    /// 1 or 2.
    pub arity: u8,
    pub roles: RoleAssignment,
    /// Whether the score clears the model's presence threshold.
    pub present: bool,
}

/// Ranks every applicable model by per-frame log-likelihood, best first.
pub fn classify_scene(bank: &ModelBank, tracks: &[Track]) -> Result<Vec<Ranked>> {
    let kept = cap_tracks(tracks, bank.role_search_cap);
    let mut out = Vec::new();
    match kept.len() {
        0 => {}
        1 => {
            let t = kept[0];
            let s = bank.single_features(t)?;
            for m in bank.models.values() {
                let Some(hmm) = &m.one_track else { continue };
                let ll = log_forward(hmm, &s)?;
                let score = ll / s.len() as f64;
                out.push(Ranked {
                    verb: m.verb.clone(),
                    arity: 1,
                    roles: RoleAssignment { agent: t.id, patient: None, log_likelihood: ll, score },
                    present: m.threshold_one.is_some_and(|thr| score >= thr),
                });
            }
        }
        _ => {
            let ids: Vec<usize> = kept.iter().map(|t| t.id).collect();
            let series = pair_series(bank, &kept);
            let scored: Vec<Result<Option<Ranked>>> = bank
                .models
                .values()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|m| {
                    let Some(hmm) = &m.two_track else { return Ok(None) };
                    Ok(assign_from(hmm, &ids, &series)?.map(|roles| Ranked {
                        verb: m.verb.clone(),
                        arity: 2,
                        roles,
                        present: m.threshold_two.is_some_and(|thr| roles.score >= thr),
                    }))
                })
                .collect();
            for r in scored {
                out.extend(r?);
            }
        }
    }
    out.sort_by(|a, b| b.roles.score.total_cmp(&a.roles.score).then_with(|| a.verb.cmp(&b.verb)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Roc {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Threshold sweep over the distinct scores, highest first; trapezoidal area.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<Roc> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::invalid("ROC needs both positive and negative labels"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]].total_cmp(&s).is_eq() {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auc = points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
    Ok(Roc { points, auc })
}

/// One ROC per bank verb over scenes labeled with their true verb. A scene
/// not scored by a verb's model gets `-inf` for it. Verbs whose labels are all
/// positive or all negative are skipped; if every verb is, that is an error.
pub fn evaluate(bank: &ModelBank, scenes: &[(Vec<Track>, String)]) -> Result<Vec<(String, Roc)>> {
    let rankings = scenes.par_iter().map(|(t, _)| classify_scene(bank, t)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for verb in bank.models.keys() {
        let scores: Vec<f64> =
            rankings.iter().map(|r| r.iter().find(|x| &x.verb == verb).map_or(f64::NEG_INFINITY, |x| x.roles.score)).collect();
        let labels: Vec<bool> = scenes.iter().map(|(_, l)| l == verb).collect();
        if let Ok(roc) = roc_curve(&scores, &labels) {
            out.push((verb.clone(), roc));
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("labels never separate into positives and negatives for any model"));
    }
    Ok(out)
}

/// `class,fpr,tpr` rows followed by `class,auc` rows.
pub fn render_eval_csv(rocs: &[(String, Roc)]) -> String {
    let mut out = String::from("class,fpr,tpr\n");
    for (verb, roc) in rocs {
        for (f, t) in &roc.points {
            let _ = writeln!(out, "{verb},{f},{t}");
        }
    }
    out.push_str("class,auc\n");
    for (verb, roc) in rocs {
        let _ = writeln!(out, "{verb},{}", roc.auc);
    }
    out
}

fn opt_f64(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:?}"))
}

pub fn render_bank_meta(bank: &ModelBank) -> String {
    let mut out = String::from("bank 1\n");
    let f = &bank.features;
    let _ = writeln!(out, "fps {:?}", f.fps);
    let _ = writeln!(out, "n_parts {}", f.n_parts);
    let _ = writeln!(out, "root_cardinality {}", f.root_cardinality);
    let _ = writeln!(out, "ablation {}", f.ablation.name());
    let _ = writeln!(out, "role_search_cap {}", bank.role_search_cap);
    for m in bank.models.values() {
        let s = m.speeds;
        let _ =
            writeln!(out, "class {} {:?} {:?} {:?} {} {}", m.verb, s.v1, s.v2, s.v3, opt_f64(m.threshold_one), opt_f64(m.threshold_two));
    }
    for (c, o) in &bank.objects {
        let _ = writeln!(out, "object {c} {:?} {:?} {:?} {:?}", o.mean_area, o.mean_aspect, o.alpha, o.beta);
    }
    out
}

struct Meta {
    features: FeatureConfig,
    role_search_cap: usize,
    classes: Vec<(String, SpeedThresholds, Option<f64>, Option<f64>)>,
    objects: BTreeMap<String, ObjectStats>,
}

fn parse_bank_meta(text: &str) -> Result<Meta> {
    let mut features = FeatureConfig::default();
    let mut role_search_cap = 6;
    let mut classes = Vec::new();
    let mut objects = BTreeMap::new();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "bank 1" => {}
        _ => return Err(Error::parse(1, "expected `bank 1` header")),
    }
    for (i, line) in lines {
        let ln = i + 1;
        let t: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::parse(ln, format!("bad number {s:?}"))) };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s == "-" {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        let int = |s: &str| -> Result<usize> { s.parse().map_err(|_| Error::parse(ln, format!("bad integer {s:?}"))) };
        match t.as_slice() {
            ["fps", v] => features.fps = num(v)?,
            ["n_parts", v] => features.n_parts = int(v)?,
            ["root_cardinality", v] => features.root_cardinality = int(v)?,
            ["ablation", v] => features.ablation = Ablation::parse(v).ok_or_else(|| Error::parse(ln, "unknown ablation"))?,
            ["role_search_cap", v] => role_search_cap = int(v)?,
            ["class", verb, v1, v2, v3, t1, t2] => {
                let speeds = SpeedThresholds { v1: num(v1)?, v2: num(v2)?, v3: num(v3)? };
                classes.push((verb.to_string(), speeds, opt(t1)?, opt(t2)?));
            }
            ["object", c, a, r, al, be] => {
                objects.insert(c.to_string(), ObjectStats { mean_area: num(a)?, mean_aspect: num(r)?, alpha: num(al)?, beta: num(be)? });
            }
            _ => return Err(Error::parse(ln, format!("unexpected line {line:?}"))),
        }
    }
    Ok(Meta { features, role_search_cap, classes, objects })
}

fn model_path(dir: &Path, verb: &str, arity: u8) -> std::path::PathBuf {
    dir.join(format!("{verb}.{arity}.hmm"))
}

pub fn save_bank(bank: &ModelBank, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("bank.meta"), render_bank_meta(bank))?;
    if let Some(cb) = &bank.codebook {
        fs::write(dir.join("codebook.txt"), render_codebook(cb))?;
    }
    for m in bank.models.values() {
        for (arity, hmm) in [(1, &m.one_track), (2, &m.two_track)] {
            if let Some(h) = hmm {
                fs::write(model_path(dir, &m.verb, arity), render_hmm(h))?;
            }
        }
    }
    Ok(())
}

pub fn load_bank(dir: &Path) -> Result<ModelBank> {
    let meta = parse_bank_meta(&fs::read_to_string(dir.join("bank.meta"))?)?;
    let codebook =
        if meta.features.ablation.discrete() { Some(parse_codebook(&fs::read_to_string(dir.join("codebook.txt"))?)?) } else { None };
    let mut bank = ModelBank {
        features: meta.features,
        codebook,
        models: BTreeMap::new(),
        objects: meta.objects,
        role_search_cap: meta.role_search_cap,
    };
    if let Some(cb) = &bank.codebook {
        if cb.dim != 2 * bank.features.n_parts {
            return Err(Error::Schema(format!("codebook dimension {} for {} parts", cb.dim, bank.features.n_parts)));
        }
    }
    let (single, pair) = (bank.single_schema(), bank.pair_schema());
    for (verb, speeds, t1, t2) in meta.classes {
        let load = |arity: u8, present: bool, schema: &[crate::features::FeatureSpec]| -> Result<Option<Hmm>> {
            if !present {
                return Ok(None);
            }
            let path = model_path(dir, &verb, arity);
            let hmm = parse_hmm(&fs::read_to_string(&path)?)?;
            if hmm.schema != schema {
                return Err(Error::Schema(format!("{} does not match the bank feature schema", path.display())));
            }
            Ok(Some(hmm))
        };
        let one_track = load(1, t1.is_some(), &single)?;
        let two_track = load(2, t2.is_some(), &pair)?;
        bank.models.insert(verb.clone(), ActionModel { verb, one_track, two_track, speeds, threshold_one: t1, threshold_two: t2 });
    }
    Ok(bank)
}
