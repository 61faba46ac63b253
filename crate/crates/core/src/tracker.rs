//! Detection-based tracking.
//!
//! Candidates for one tracking group (pooled person models count as one group)
//! are augmented by projecting every detection a few frames forward along its
//! flow hint. Scores are normalized by a per-model offset derived from an Otsu
//! split of the per-frame top scores, and a Viterbi pass picks one candidate
//! per frame that maximizes normalized score plus flow coherence. Tracks with
//! unstable score distributions are pruned; survivors are smoothed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scene::{cap_candidates, write_det_extras, BoundingBox, Detection, ObjectClassTable, Scene};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerParams {
    /// Frames each detection is projected forward.
    pub projection_depth: usize,
    /// Score decay per projected frame.
    pub projection_decay: f64,
    pub max_per_frame: usize,
    pub lambda_motion: f64,
    pub min_track_len: usize,
    pub otsu_bins: usize,
    /// Added to the trained threshold before taking the minimum with Otsu.
    pub otsu_margin: f64,
    /// Tracks whose normalized-score variance exceeds this are pruned.
    pub var_max: f64,
    pub modality_bins: usize,
    pub max_modes: usize,
    /// Modes lower than this fraction of the tallest smoothed bin are ignored.
    pub mode_min_height: f64,
    pub smooth_window: usize,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            projection_depth: 5,
            projection_decay: 0.9,
            max_per_frame: 12,
            lambda_motion: 1.0,
            min_track_len: 10,
            otsu_bins: 50,
            otsu_margin: 0.4,
            var_max: 1.0,
            modality_bins: 20,
            max_modes: 2,
            mode_min_height: 0.4,
            smooth_window: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreStats {
    pub mean: f64,
    pub variance: f64,
    pub histogram: Vec<usize>,
}

impl ScoreStats {
    pub fn from_scores(scores: &[f64], bins: usize) -> Self {
        ScoreStats { mean: stats::mean(scores), variance: stats::variance(scores), histogram: histogram(scores, bins) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: usize,
    /// Tracking group, e.g. `person` for all pooled person models.
    pub class: String,
    pub start_frame: usize,
    pub selections: Vec<Detection>,
    /// Offset-normalized score of each selection.
    pub norm_scores: Vec<f64>,
    pub smoothed: Vec<BoundingBox>,
    pub score_stats: ScoreStats,
}

impl Track {
    /// Builds a track from a selection run; `smoothed` starts as the raw boxes.
    pub fn from_selections(id: usize, class: &str, selections: Vec<Detection>, norm_scores: Vec<f64>, bins: usize) -> Self {
        let start_frame = selections.first().map_or(0, |d| d.frame);
        let smoothed = selections.iter().map(|d| d.bbox).collect();
        let score_stats = ScoreStats::from_scores(&norm_scores, bins);
        Track { id, class: class.to_string(), start_frame, selections, norm_scores, smoothed, score_stats }
    }

    pub fn len(&self) -> usize {
        self.selections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    pub fn end_frame(&self) -> usize {
        self.start_frame + self.len().saturating_sub(1)
    }

    /// Smoothed box at an absolute frame, if the track covers it.
    pub fn box_at(&self, frame: usize) -> Option<&BoundingBox> {
        frame.checked_sub(self.start_frame).and_then(|i| self.smoothed.get(i))
    }

    pub fn mean_area(&self) -> f64 {
        stats::mean(&self.smoothed.iter().map(BoundingBox::area).collect::<Vec<_>>())
    }

    pub fn mean_aspect(&self) -> f64 {
        stats::mean(&self.smoothed.iter().map(BoundingBox::aspect).collect::<Vec<_>>())
    }

    pub fn aspect_variance(&self) -> f64 {
        stats::variance(&self.selections.iter().map(|d| d.bbox.aspect()).collect::<Vec<_>>())
    }

    /// The most frequent detector model among the selections (ties: first seen).
    pub fn dominant_model(&self) -> &str {
        let mut counts: Vec<(&str, usize)> = Vec::new();
        for d in &self.selections {
            match counts.iter_mut().find(|(c, _)| *c == d.class) {
                Some((_, n)) => *n += 1,
                None => counts.push((&d.class, 1)),
            }
        }
        let mut best = (self.class.as_str(), 0);
        for (c, n) in counts {
            if n > best.1 {
                best = (c, n);
            }
        }
        best.0
    }
}

/// Equal-width histogram over `[min, max]` of the data; all mass lands in the
/// first bin when the data are constant.
pub fn histogram(xs: &[f64], bins: usize) -> Vec<usize> {
    let mut h = vec![0usize; bins.max(1)];
    if xs.is_empty() {
        return h;
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = h.len();
    for &x in xs {
        h[bin_of(x, lo, hi, n)] += 1;
    }
    h
}

fn bin_of(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    let b = ((x - lo) / (hi - lo) * bins as f64).floor();
    (b.max(0.0) as usize).min(bins - 1)
}

/// Returns, for each frame, this group's candidates plus forward projections.
///
/// A detection at frame `t` is copied into frames `t+1..=t+depth` with its
/// center moved by `k * flow` and its score decayed by `decay^k`. The
/// per-frame cap is re-applied afterwards.
pub fn augment_detections(scene: &Scene, group: &str, params: &TrackerParams) -> Vec<Vec<Detection>> {
    let table = ObjectClassTable::standard();
    let mut frames: Vec<Vec<Detection>> = scene
        .frames
        .iter()
        .map(|f| f.iter().filter(|(class, _)| table.tracking_group(class) == group).flat_map(|(_, dets)| dets.iter().cloned()).collect())
        .collect();
    if params.projection_depth == 0 {
        return frames;
    }
    let originals = frames.clone();
    for (t, dets) in originals.iter().enumerate() {
        for d in dets {
            let (vx, vy) = d.flow.unwrap_or((0.0, 0.0));
            for k in 1..=params.projection_depth {
                let target = t + k;
                if target >= scene.frame_count {
                    break;
                }
                let mut copy = d.clone();
                copy.frame = target;
                copy.bbox.cx += k as f64 * vx;
                copy.bbox.cy += k as f64 * vy;
                copy.score = decay_score(d.score, params.projection_decay, k);
                copy.synthetic = true;
                frames[target].push(copy);
            }
        }
    }
    for dets in &mut frames {
        cap_candidates(dets, params.max_per_frame);
    }
    frames
}

/// Multiplies the magnitude of a positive score by `decay^k`; negative scores
/// are divided instead so that a projection always scores below its source.
fn decay_score(score: f64, decay: f64, k: usize) -> f64 {
    let f = decay.powi(k as i32);
    if score >= 0.0 {
        score * f
    } else {
        score / f
    }
}

/// Otsu split of a 50-bin histogram (by default) of scores.
///
/// Returns the upper edge of the bin that ends the lower class, or `None` when
/// there are fewer than two scores or all are identical.
pub fn otsu_threshold(scores: &[f64], bins: usize) -> Option<f64> {
    if scores.len() < 2 {
        return None;
    }
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return None;
    }
    let cut = otsu_cut(&histogram(scores, bins));
    let width = (hi - lo) / bins as f64;
    Some(lo + (cut + 1) as f64 * width)
}

/// Index of the last bin of the lower class maximizing between-class variance.
/// Bins are valued by their index; the first maximum wins.
pub fn otsu_cut(hist: &[usize]) -> usize {
    let total: f64 = hist.iter().map(|&c| c as f64).sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &c) in hist.iter().enumerate() {
        w0 += c as f64;
        sum0 += i as f64 * c as f64;
        let w1 = total - w0;
        let var = if w0 > 0.0 && w1 > 0.0 {
            let m0 = sum0 / w0;
            let m1 = (sum_all - sum0) / w1;
            w0 * w1 * (m0 - m1) * (m0 - m1) / (total * total)
        } else {
            0.0
        };
        if var > best.1 {
            best = (i, var);
        }
    }
    best.0
}

/// Score offset for one detector model: the smaller of the Otsu threshold and
/// `trained + margin`. Degenerate histograms fall back to `trained + margin`.
pub fn otsu_offset(top_scores: &[f64], trained: f64, bins: usize, margin: f64) -> f64 {
    let fallback = trained + margin;
    match otsu_threshold(top_scores, bins) {
        Some(t) => t.min(fallback),
        None => fallback,
    }
}

/// Per-model offsets from the top detection of each model in each frame.
pub fn model_offsets(scene: &Scene, group: &str, params: &TrackerParams) -> BTreeMap<String, f64> {
    let table = ObjectClassTable::standard();
    let mut tops: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for frame in &scene.frames {
        for (class, dets) in frame {
            if table.tracking_group(class) != group {
                continue;
            }
            if let Some(best) = dets.iter().map(|d| d.score).reduce(f64::max) {
                tops.entry(class.clone()).or_default().push(best);
            }
        }
    }
    tops.into_iter()
        .map(|(class, scores)| {
            let off = otsu_offset(&scores, scene.threshold(&class), params.otsu_bins, params.otsu_margin);
            (class, off)
        })
        .collect()
}

/// Pairwise coherence: negative distance between the flow-predicted center of
/// `prev` and the center of `next`, in units of the scene diagonal.
pub fn coherence(prev: &Detection, next: &Detection, lambda_motion: f64, diag: f64) -> f64 {
    let (vx, vy) = prev.flow.unwrap_or((0.0, 0.0));
    let px = prev.bbox.cx + vx;
    let py = prev.bbox.cy + vy;
    -lambda_motion * (px - next.bbox.cx).hypot(py - next.bbox.cy) / diag
}

/// Exact maximizer of `sum_t norm(d_t) + sum_t coherence(d_t, d_{t+1})` over one
/// candidate per frame. Returns the chosen indices and the objective value.
/// Ties prefer lower candidate indices.
pub fn viterbi_select<F>(candidates: &[Vec<Detection>], norm: F, lambda_motion: f64, diag: f64) -> Result<(Vec<usize>, f64)>
where
    F: Fn(&Detection) -> f64,
{
    if candidates.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    if let Some(t) = candidates.iter().position(Vec::is_empty) {
        return Err(Error::invalid(format!("frame {t} of the span has no candidates")));
    }
    let mut score: Vec<f64> = candidates[0].iter().map(&norm).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(candidates.len());
    back.push(vec![0; score.len()]);
    for t in 1..candidates.len() {
        let mut next = Vec::with_capacity(candidates[t].len());
        let mut ptr = Vec::with_capacity(candidates[t].len());
        for d in &candidates[t] {
            let mut best = (0usize, f64::NEG_INFINITY);
            for (j, p) in candidates[t - 1].iter().enumerate() {
                let v = score[j] + coherence(p, d, lambda_motion, diag);
                if v > best.1 {
                    best = (j, v);
                }
            }
            next.push(best.1 + norm(d));
            ptr.push(best.0);
        }
        score = next;
        back.push(ptr);
    }
    let (mut idx, total) =
        score.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut path = vec![0; candidates.len()];
    for t in (0..candidates.len()).rev() {
        path[t] = idx;
        idx = back[t][idx];
    }
    Ok((path, total))
}

/// Maximal runs of consecutive frames that all have candidates.
pub fn candidate_spans(frames: &[Vec<Detection>]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (t, f) in frames.iter().enumerate() {
        match (f.is_empty(), start) {
            (false, None) => start = Some(t),
            (true, Some(s)) => {
                spans.push((s, t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, frames.len()));
    }
    spans
}

/// The sub-range left after dropping leading and trailing frames whose
/// normalized score is negative. Viterbi must pick something in every frame,
/// so a span that starts before the object is first seen opens on clutter.
pub fn trimmed_range(norm_scores: &[f64]) -> (usize, usize) {
    let lo = norm_scores.iter().position(|s| *s >= 0.0).unwrap_or(norm_scores.len());
    let hi = norm_scores.iter().rposition(|s| *s >= 0.0).map_or(lo, |i| i + 1);
    (lo, hi)
}

/// Tracks one group: augmentation, normalization, Viterbi per span, end
/// trimming and the minimum-length filter. Tracks are returned unsmoothed and
/// unpruned.
pub fn track_group(scene: &Scene, group: &str, params: &TrackerParams) -> Vec<Track> {
    let offsets = model_offsets(scene, group, params);
    let norm = |d: &Detection| d.score - offsets.get(&d.class).copied().unwrap_or(0.0);
    let frames = augment_detections(scene, group, params);
    let diag = scene.diagonal();
    let mut out = Vec::new();
    for (a, b) in candidate_spans(&frames) {
        if b - a < params.min_track_len {
            continue;
        }
        let span = &frames[a..b];
        let (path, _) = viterbi_select(span, norm, params.lambda_motion, diag).expect("spans contain no empty frames");
        let selections: Vec<Detection> = path.iter().zip(span).map(|(&i, f)| f[i].clone()).collect();
        let norm_scores: Vec<f64> = selections.iter().map(norm).collect();
        let (lo, hi) = trimmed_range(&norm_scores);
        if hi - lo < params.min_track_len {
            continue;
        }
        let selections = selections[lo..hi].to_vec();
        let norm_scores = norm_scores[lo..hi].to_vec();
        out.push(Track::from_selections(0, group, selections, norm_scores, params.modality_bins));
    }
    out
}

/// Runs the whole tracker over every group present in the scene and numbers
/// the surviving tracks from 0 in group order.
pub fn track_scene(scene: &Scene, params: &TrackerParams) -> Vec<Track> {
    let table = ObjectClassTable::standard();
    let mut groups: Vec<String> = scene.classes().iter().map(|c| table.tracking_group(c).to_string()).collect();
    groups.sort();
    groups.dedup();
    let mut tracks: Vec<Track> = groups.iter().flat_map(|g| track_group(scene, g, params)).collect();
    tracks = prune_tracks(tracks, params);
    for (i, t) in tracks.iter_mut().enumerate() {
        t.id = i;
        smooth_track(t, params.smooth_window);
    }
    tracks
}

/// Number of modes of a histogram after a 3-tap moving average. A mode is a
/// plateau strictly higher than its neighbours whose prominence (height above
/// the higher of the lowest points separating it from taller ground on either
/// side, with zero beyond the edges) is at least `min_height` times the
/// tallest smoothed bin. Prominence keeps sampling ripple from counting.
pub fn count_modes(hist: &[usize], min_height: f64) -> usize {
    let n = hist.len();
    if n == 0 {
        return 0;
    }
    let s: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            hist[lo..=hi].iter().map(|&c| c as f64).sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    let peak = s.iter().copied().fold(0.0, f64::max);
    // Lowest point between a peak and the first taller bin, or zero if the
    // walk runs off the edge. Walking right an equal bin counts as taller, so
    // of two equal summits only the rightmost keeps full prominence.
    let base = |mut it: Box<dyn Iterator<Item = usize>>, h: f64, rightward: bool| {
        let mut low = h;
        for k in it.by_ref() {
            if s[k] > h || (rightward && s[k] == h) {
                return low;
            }
            low = low.min(s[k]);
        }
        0.0
    };
    let mut modes = 0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && s[j + 1] == s[i] {
            j += 1;
        }
        let left_ok = i == 0 || s[i - 1] < s[i];
        let right_ok = j == n - 1 || s[j + 1] < s[i];
        if left_ok && right_ok && s[i] > 0.0 {
            let h = s[i];
            let col = base(Box::new((0..i).rev()), h, false).max(base(Box::new(j + 1..n), h, true));
            if h - col >= min_height * peak {
                modes += 1;
            }
        }
        i = j + 1;
    }
    modes
}

/// Drops tracks with score variance above `var_max` or more than `max_modes`
/// score modes.
pub fn prune_tracks(tracks: Vec<Track>, params: &TrackerParams) -> Vec<Track> {
    tracks
        .into_iter()
        .filter(|t| {
            t.score_stats.variance <= params.var_max && count_modes(&t.score_stats.histogram, params.mode_min_height) <= params.max_modes
        })
        .collect()
}

/// Centered moving average over center and size with truncated windows at the
/// span edges. An even window is widened by one.
pub fn smooth_track(track: &mut Track, window: usize) {
    let half = window.max(1) / 2;
    let raw: Vec<BoundingBox> = track.selections.iter().map(|d| d.bbox).collect();
    let n = raw.len();
    track.smoothed = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let k = (hi - lo + 1) as f64;
            let slice = &raw[lo..=hi];
            BoundingBox::new(
                slice.iter().map(|b| b.cx).sum::<f64>() / k,
                slice.iter().map(|b| b.cy).sum::<f64>() / k,
                slice.iter().map(|b| b.w).sum::<f64>() / k,
                slice.iter().map(|b| b.h).sum::<f64>() / k,
            )
        })
        .collect();
}

/// Track file: a `track <id> <class>` header per track followed by one
/// `sel <frame> <cx> <cy> <w> <h> <score>` line per frame carrying the
/// smoothed box and normalized score. Detection metadata follows as the same
/// keyword groups scene files use, tagged with `model <class>` and
/// `rawscore <s>`. With `emit_raw`, `raw <frame> <cx> <cy> <w> <h> <score>`
/// lines give the unsmoothed selections.
pub fn render_tracks(tracks: &[Track], emit_raw: bool) -> String {
    let mut out = String::new();
    for t in tracks {
        let _ = writeln!(out, "track {} {}", t.id, t.class);
        for ((d, b), s) in t.selections.iter().zip(&t.smoothed).zip(&t.norm_scores) {
            let _ = write!(out, "sel {} {} {} {} {} {} model {} rawscore {}", d.frame, b.cx, b.cy, b.w, b.h, s, d.class, d.score);
            write_det_extras(&mut out, d);
            out.push('\n');
        }
        if emit_raw {
            for (d, s) in t.selections.iter().zip(&t.norm_scores) {
                let b = &d.bbox;
                let _ = writeln!(out, "raw {} {} {} {} {} {}", d.frame, b.cx, b.cy, b.w, b.h, s);
            }
        }
    }
    out
}

/// Reads a track file. Raw boxes come from `raw` lines when present and
/// otherwise equal the smoothed boxes.
pub fn parse_tracks(input: &str, bins: usize) -> Result<Vec<Track>> {
    struct Partial {
        id: usize,
        class: String,
        sels: Vec<Detection>,
        smoothed: Vec<BoundingBox>,
        scores: Vec<f64>,
        raw: Vec<BoundingBox>,
    }
    let mut parts: Vec<Partial> = Vec::new();
    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| -> Result<f64> {
            toks.get(i)
                .ok_or_else(|| Error::parse(line_no, "missing field"))?
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("bad number '{}'", toks[i])))
        };
        match toks[0] {
            "track" => {
                let id = num(1)? as usize;
                let class = toks.get(2).ok_or_else(|| Error::parse(line_no, "track needs class"))?.to_string();
                parts.push(Partial { id, class, sels: vec![], smoothed: vec![], scores: vec![], raw: vec![] });
            }
            "sel" | "raw" => {
                let p = parts.last_mut().ok_or_else(|| Error::parse(line_no, "record before track header"))?;
                let frame = num(1)? as usize;
                let b = BoundingBox::new(num(2)?, num(3)?, num(4)?, num(5)?);
                let score = num(6)?;
                if toks[0] == "raw" {
                    p.raw.push(b);
                    continue;
                }
                if let Some(prev) = p.sels.last() {
                    if frame != prev.frame + 1 {
                        return Err(Error::Structure(format!("line {line_no}: track frames must be consecutive")));
                    }
                }
                // Reuse the scene-line parser for the trailing keyword groups.
                let mut model = p.class.clone();
                let mut rawscore = score;
                let mut rest = Vec::new();
                let mut i = 7;
                while i < toks.len() {
                    match toks[i] {
                        "model" => {
                            model = toks.get(i + 1).ok_or_else(|| Error::parse(line_no, "model needs class"))?.to_string();
                            i += 2;
                        }
                        "rawscore" => {
                            rawscore = num(i + 1)?;
                            i += 2;
                        }
                        t => {
                            rest.push(t);
                            i += 1;
                        }
                    }
                }
                let det_line = format!("det {frame} {model} {rawscore} {} {} {} {} {}", b.cx, b.cy, b.w, b.h, rest.join(" "));
                let header = format!("scene {} 1 1 1\n", frame + 1);
                let scene = crate::scene::parse_scene_with_cap(&(header + &det_line), usize::MAX)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                let det = scene.frames[frame].values().next().and_then(|v| v.first()).cloned().expect("one detection");
                p.sels.push(det);
                p.smoothed.push(b);
                p.scores.push(score);
            }
            _ => {}
        }
    }
    parts
        .into_iter()
        .map(|p| {
            if !p.raw.is_empty() && p.raw.len() != p.sels.len() {
                return Err(Error::Structure(format!("track {}: raw and sel counts differ", p.id)));
            }
            let mut sels = p.sels;
            for (d, r) in sels.iter_mut().zip(&p.raw) {
                d.bbox = *r;
            }
            let mut t = Track::from_selections(p.id, &p.class, sels, p.scores, bins);
            t.smoothed = p.smoothed;
            Ok(t)
        })
        .collect()
}
