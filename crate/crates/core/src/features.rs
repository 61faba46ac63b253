//! Per-frame feature series for one track or an ordered agent/patient pair.
//!
//! Every track gets the same schema regardless of its object class so that one
//! model can score any track. Non-person tracks carry zero part displacements
//! and a dedicated "no pose" codebook symbol.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::geometry::{screen_angle, wrap_angle};
use crate::posture::{pose_vector, Codebook, PoseVector};
use crate::scene::ObjectClassTable;
use crate::tracker::Track;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Linear,
    /// Radians in `[-π, π)`.
    Angular,
    Discrete {
        cardinality: usize,
    },
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKind::Linear => write!(f, "linear"),
            FeatureKind::Angular => write!(f, "angular"),
            FeatureKind::Discrete { cardinality } => write!(f, "discrete:{cardinality}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn new(name: impl Into<String>, kind: FeatureKind) -> Self {
        FeatureSpec { name: name.into(), kind }
    }
}

/// Which feature groups to drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ablation {
    #[default]
    Full,
    /// No discrete features and no pose features of either kind.
    NoDiscreteNoPose,
    /// No discrete features.
    NoDiscrete,
    /// No continuous pose features (part displacements).
    NoContinuousPose,
}

impl Ablation {
    pub fn name(&self) -> &'static str {
        match self {
            Ablation::Full => "full",
            Ablation::NoDiscreteNoPose => "exp1",
            Ablation::NoDiscrete => "exp2",
            Ablation::NoContinuousPose => "exp3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(Ablation::Full),
            "exp1" => Some(Ablation::NoDiscreteNoPose),
            "exp2" => Some(Ablation::NoDiscrete),
            "exp3" => Some(Ablation::NoContinuousPose),
            _ => None,
        }
    }

    pub fn discrete(&self) -> bool {
        matches!(self, Ablation::Full | Ablation::NoContinuousPose)
    }

    pub fn part_displacements(&self) -> bool {
        matches!(self, Ablation::Full | Ablation::NoDiscrete)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    pub fps: f64,
    /// Parts per pose vector; shorter part lists are zero padded.
    pub n_parts: usize,
    pub root_cardinality: usize,
    pub ablation: Ablation,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { fps: 30.0, n_parts: 8, root_cardinality: 8, ablation: Ablation::Full }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    pub schema: Vec<FeatureSpec>,
    /// Absolute frame index of `frames[0]`.
    pub start_frame: usize,
    pub frames: Vec<Vec<f64>>,
}

impl FeatureSeries {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Checks shape, angle range, category range and finiteness.
    pub fn validate(&self) -> Result<()> {
        for (t, row) in self.frames.iter().enumerate() {
            if row.len() != self.schema.len() {
                return Err(Error::Schema(format!("frame {t} has {} values for {} features", row.len(), self.schema.len())));
            }
            for (v, spec) in row.iter().zip(&self.schema) {
                let ok = v.is_finite()
                    && match spec.kind {
                        FeatureKind::Linear => true,
                        FeatureKind::Angular => (-std::f64::consts::PI..std::f64::consts::PI).contains(v),
                        FeatureKind::Discrete { cardinality } => v.fract() == 0.0 && *v >= 0.0 && (*v as usize) < cardinality,
                    };
                if !ok {
                    return Err(Error::Schema(format!("frame {t}: bad value {v} for {}", spec.name)));
                }
            }
        }
        Ok(())
    }

    /// Frames `[from, to)` relative to the series start.
    fn slice(&self, from: usize, to: usize) -> Vec<Vec<f64>> {
        self.frames[from..to].to_vec()
    }
}

/// Centered finite differences in units per second; one-sided at the ends.
pub fn derivative(xs: &[f64], fps: f64) -> Vec<f64> {
    let n = xs.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                xs[1] - xs[0]
            } else if i == n - 1 {
                xs[n - 1] - xs[n - 2]
            } else {
                (xs[i + 1] - xs[i - 1]) / 2.0
            };
            d * fps
        })
        .collect()
}

/// Per-frame velocity `(vx, vy)` of the smoothed box center, pixels/second.
pub fn center_velocity(track: &Track, fps: f64) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = track.smoothed.iter().map(|b| b.cx).collect();
    let ys: Vec<f64> = track.smoothed.iter().map(|b| b.cy).collect();
    (derivative(&xs, fps), derivative(&ys, fps))
}

pub fn single_track_schema(cfg: &FeatureConfig, codebook_len: usize) -> Vec<FeatureSpec> {
    use FeatureKind::*;
    let mut s = vec![
        FeatureSpec::new("cx", Linear),
        FeatureSpec::new("cy", Linear),
        FeatureSpec::new("aspect", Linear),
        FeatureSpec::new("aspect_rate", Linear),
        FeatureSpec::new("speed", Linear),
        FeatureSpec::new("heading", Angular),
        FeatureSpec::new("accel", Linear),
        FeatureSpec::new("accel_heading", Angular),
    ];
    if cfg.ablation.part_displacements() {
        for suffix in ["", "_rate"] {
            for p in 0..cfg.n_parts {
                s.push(FeatureSpec::new(format!("part{p}_dx{suffix}"), Linear));
                s.push(FeatureSpec::new(format!("part{p}_dy{suffix}"), Linear));
            }
        }
    }
    if cfg.ablation.discrete() {
        s.push(FeatureSpec::new("class", Discrete { cardinality: ObjectClassTable::standard().cardinality() }));
        s.push(FeatureSpec::new("root", Discrete { cardinality: cfg.root_cardinality }));
        s.push(FeatureSpec::new("pose", Discrete { cardinality: codebook_len + 1 }));
    }
    s
}

pub fn pair_schema() -> Vec<FeatureSpec> {
    vec![
        FeatureSpec::new("distance", FeatureKind::Linear),
        FeatureSpec::new("distance_rate", FeatureKind::Linear),
        FeatureSpec::new("orientation", FeatureKind::Angular),
    ]
}

pub fn two_track_schema(cfg: &FeatureConfig, codebook_len: usize) -> Vec<FeatureSpec> {
    let single = single_track_schema(cfg, codebook_len);
    let prefixed = |p: &str| single.iter().map(move |f| FeatureSpec::new(format!("{p}.{}", f.name), f.kind)).collect::<Vec<_>>();
    let mut s = prefixed("agent");
    s.extend(prefixed("patient"));
    s.extend(pair_schema().into_iter().map(|f| FeatureSpec::new(format!("pair.{}", f.name), f.kind)));
    s
}

pub fn single_track_features(track: &Track, codebook: Option<&Codebook>, cfg: &FeatureConfig) -> Result<FeatureSeries> {
    let n = track.len();
    if n < 3 {
        return Err(Error::invalid(format!("track {} has {n} frames; at least 3 needed", track.id)));
    }
    if cfg.ablation.discrete() && codebook.is_none() {
        return Err(Error::invalid("pose codebook required for discrete pose features"));
    }
    let table = ObjectClassTable::standard();
    let fps = cfg.fps;
    let (vx, vy) = center_velocity(track, fps);
    let (ax, ay) = (derivative(&vx, fps), derivative(&vy, fps));
    let aspect: Vec<f64> = track.smoothed.iter().map(|b| b.aspect()).collect();
    let aspect_rate = derivative(&aspect, fps);

    let dim = 2 * cfg.n_parts;
    let poses: Vec<Option<PoseVector>> = track
        .selections
        .iter()
        .map(|d| if table.is_person(&d.class) && !d.parts.is_empty() { pose_vector(d).ok().map(|p| p.fit_to(dim)) } else { None })
        .collect();
    let pose_values: Vec<Vec<f64>> = poses.iter().map(|p| p.as_ref().map_or_else(|| vec![0.0; dim], |p| p.values.clone())).collect();
    let pose_rates: Vec<Vec<f64>> = {
        let cols: Vec<Vec<f64>> = (0..dim).map(|k| derivative(&pose_values.iter().map(|v| v[k]).collect::<Vec<_>>(), fps)).collect();
        (0..n).map(|t| cols.iter().map(|c| c[t]).collect()).collect()
    };

    let cb_len = codebook.map_or(0, Codebook::len);
    let mut frames = Vec::with_capacity(n);
    for t in 0..n {
        let b = &track.smoothed[t];
        let mut row = vec![
            b.cx,
            b.cy,
            aspect[t],
            aspect_rate[t],
            vx[t].hypot(vy[t]),
            screen_angle(vx[t], vy[t]),
            ax[t].hypot(ay[t]),
            screen_angle(ax[t], ay[t]),
        ];
        if cfg.ablation.part_displacements() {
            row.extend_from_slice(&pose_values[t]);
            row.extend_from_slice(&pose_rates[t]);
        }
        if cfg.ablation.discrete() {
            let det = &track.selections[t];
            row.push(table.index(&det.class) as f64);
            row.push(det.root.min(cfg.root_cardinality as u32 - 1) as f64);
            let pose = match (&poses[t], codebook) {
                (Some(p), Some(cb)) if cb.dim == dim => cb.index(p),
                (Some(_), Some(cb)) => return Err(Error::Schema(format!("codebook dimension {} vs {dim} pose coordinates", cb.dim))),
                _ => cb_len,
            };
            row.push(pose as f64);
        }
        frames.push(row);
    }
    let series = FeatureSeries { schema: single_track_schema(cfg, cb_len), start_frame: track.start_frame, frames };
    debug_assert!(series.validate().is_ok());
    Ok(series)
}

/// Frames covered by both tracks, as an absolute half-open range.
pub fn overlap(a: &Track, b: &Track) -> Option<(usize, usize)> {
    let start = a.start_frame.max(b.start_frame);
    let end = (a.end_frame()).min(b.end_frame()) + 1;
    (start < end && !a.is_empty() && !b.is_empty()).then_some((start, end))
}

pub fn track_pair_features(agent: &Track, patient: &Track, cfg: &FeatureConfig) -> Result<FeatureSeries> {
    let (start, end) = overlap(agent, patient).ok_or_else(|| Error::invalid("tracks do not overlap"))?;
    let centers = |t: &Track| -> Vec<(f64, f64)> { (start..end).map(|f| t.box_at(f).expect("inside overlap").center()).collect() };
    let (ca, cp) = (centers(agent), centers(patient));
    let dist: Vec<f64> = ca.iter().zip(&cp).map(|(a, p)| (p.0 - a.0).hypot(p.1 - a.1)).collect();
    let rate = derivative(&dist, cfg.fps);
    let frames = (0..dist.len()).map(|i| vec![dist[i], rate[i], screen_angle(cp[i].0 - ca[i].0, cp[i].1 - ca[i].1)]).collect();
    Ok(FeatureSeries { schema: pair_schema(), start_frame: start, frames })
}

/// Agent features, patient features and pair features over the overlap.
pub fn two_track_features(agent: &Track, patient: &Track, codebook: Option<&Codebook>, cfg: &FeatureConfig) -> Result<FeatureSeries> {
    let pair = track_pair_features(agent, patient, cfg)?;
    let (start, end) = (pair.start_frame, pair.start_frame + pair.len());
    let a = single_track_features(agent, codebook, cfg)?;
    let p = single_track_features(patient, codebook, cfg)?;
    let a_rows = a.slice(start - a.start_frame, end - a.start_frame);
    let p_rows = p.slice(start - p.start_frame, end - p.start_frame);
    let frames = a_rows
        .into_iter()
        .zip(p_rows)
        .zip(pair.frames)
        .map(|((mut row, prow), pairrow)| {
            row.extend(prow);
            row.extend(pairrow);
            row
        })
        .collect();
    let cb_len = codebook.map_or(0, Codebook::len);
    Ok(FeatureSeries { schema: two_track_schema(cfg, cb_len), start_frame: start, frames })
}

/// Debug dump: a `# frame name:kind ...` header and one line per frame.
pub fn render_series(series: &FeatureSeries) -> String {
    let mut out = String::from("# frame");
    for f in &series.schema {
        let _ = write!(out, " {}:{}", f.name, f.kind);
    }
    out.push('\n');
    for (i, row) in series.frames.iter().enumerate() {
        let _ = write!(out, "{}", series.start_frame + i);
        for v in row {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Wraps the angular columns of a series in place.
pub fn normalize_angles(series: &mut FeatureSeries) {
    for row in &mut series.frames {
        for (v, spec) in row.iter_mut().zip(&series.schema) {
            if spec.kind == FeatureKind::Angular {
                *v = wrap_angle(*v);
            }
        }
    }
}
