//! Flat `key = value` configuration covering every tunable in the pipeline.
//!
//! Lines starting with `#` are comments. Later assignments win, so a config
//! file can be layered under command-line `--set key=value` overrides.

use std::fmt::Write as _;

use crate::classifier::ClassifierParams;
use crate::error::{Error, Result};
use crate::features::{Ablation, FeatureConfig};
use crate::hmm::TrainParams;
use crate::nlg::NlgParams;
use crate::tracker::TrackerParams;

trait ConfigValue: Sized {
    fn parse_value(s: &str) -> Option<Self>;
    fn show(&self) -> String;
}

impl ConfigValue for usize {
    fn parse_value(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for u64 {
    fn parse_value(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn show(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for f64 {
    fn parse_value(s: &str) -> Option<Self> {
        s.parse().ok().filter(|v: &f64| v.is_finite())
    }
    fn show(&self) -> String {
        format!("{self:?}")
    }
}

impl ConfigValue for Ablation {
    fn parse_value(s: &str) -> Option<Self> {
        Ablation::parse(s)
    }
    fn show(&self) -> String {
        self.name().to_string()
    }
}

macro_rules! config {
    ($($key:literal => $field:ident : $ty:ty = $default:expr, $doc:literal;)*) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct Config {
            $(#[doc = $doc] pub $field: $ty,)*
        }

        impl Default for Config {
            fn default() -> Self {
                Config { $($field: $default,)* }
            }
        }

        impl Config {
            /// Every key with its current value and description, in file order.
            pub fn entries(&self) -> Vec<(&'static str, String, &'static str)> {
                vec![$(($key, self.$field.show(), $doc),)*]
            }

            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $($key => {
                        self.$field = <$ty as ConfigValue>::parse_value(value)
                            .ok_or_else(|| Error::invalid(format!("bad value {value:?} for {key}")))?;
                    })*
                    _ => return Err(Error::invalid(format!("unknown config key {key:?}"))),
                }
                Ok(())
            }
        }
    };
}

config! {
    "seed" => seed: u64 = 1, "Master seed for synthetic data.";
    "tracker.max_per_frame" => max_per_frame: usize = 12, "Detections kept per class per frame.";
    "tracker.projection_depth" => projection_depth: usize = 5, "Frames each detection is projected forward along its flow.";
    "tracker.projection_decay" => projection_decay: f64 = 0.9, "Score decay per projected frame.";
    "tracker.lambda_motion" => lambda_motion: f64 = 1.0, "Weight of flow coherence against detection score.";
    "tracker.min_track_len" => min_track_len: usize = 10, "Shortest track kept, in frames.";
    "tracker.otsu_bins" => otsu_bins: usize = 50, "Histogram bins for the score offset.";
    "tracker.otsu_margin" => otsu_margin: f64 = 0.4, "Margin added to the trained threshold before taking the minimum.";
    "tracker.var_max" => var_max: f64 = 1.0, "Tracks with larger normalized-score variance are pruned.";
    "tracker.modality_bins" => modality_bins: usize = 20, "Histogram bins for the modality test.";
    "tracker.max_modes" => max_modes: usize = 2, "Tracks with more score modes are pruned.";
    "tracker.mode_min_height" => mode_min_height: f64 = 0.4, "Ignore modes whose prominence is below this fraction of the tallest bin.";
    "tracker.smooth_window" => smooth_window: usize = 5, "Moving-average window for box smoothing.";
    "codebook.size" => codebook_size: usize = 49, "Number of pose clusters.";
    "codebook.seed" => codebook_seed: u64 = 7, "Seed for codebook construction.";
    "features.n_parts" => n_parts: usize = 8, "Parts per pose vector.";
    "features.root_cardinality" => root_cardinality: usize = 8, "Distinct root-filter indices.";
    "features.ablation" => ablation: Ablation = Ablation::Full, "Feature set: full, exp1, exp2 or exp3.";
    "hmm.n_states" => n_states: usize = 10, "States per model.";
    "hmm.max_iters" => max_iters: usize = 30, "Baum-Welch iteration limit.";
    "hmm.tol" => tol: f64 = 1e-4, "Stop when an iteration gains less log-likelihood than this.";
    "hmm.var_floor" => var_floor: f64 = 1e-4, "Smallest Gaussian variance.";
    "hmm.kappa_cap" => kappa_cap: f64 = 500.0, "Largest von Mises concentration.";
    "hmm.pseudo_count" => pseudo_count: f64 = 0.01, "Pseudo-count added to categorical outputs.";
    "hmm.transition_smoothing" => transition_smoothing: f64 = 0.01, "Uniform mass mixed into initial transitions.";
    "classifier.role_search_cap" => role_search_cap: usize = 6, "Most tracks considered for role assignment.";
    "classifier.min_clips" => min_clips: usize = 2, "Fewest training clips for a model.";
    "classifier.stationary_speed" => stationary_speed: f64 = 15.0, "Upper bound on v1, pixels/second.";
    "classifier.threshold_quantile" => threshold_quantile: f64 = 0.05, "Training-score quantile used as the presence threshold.";
    "nlg.black_max_value" => black_max_value: f64 = 0.2, "Largest V called black.";
    "nlg.white_min_value" => white_min_value: f64 = 0.8, "Smallest V called white.";
    "nlg.color_min_saturation" => color_min_saturation: f64 = 0.7, "Smallest S given a hue name.";
    "nlg.hue_offset" => hue_offset: f64 = -30.0, "Start of the red hue bin in degrees; bins are 60 degrees wide.";
    "nlg.narrow_factor" => narrow_factor: f64 = 0.7, "Aspect ratio factor for tall and narrow.";
    "nlg.wide_factor" => wide_factor: f64 = 1.3, "Aspect ratio factor for short and wide.";
    "nlg.score_var_max" => score_var_max: f64 = 0.5, "Score variance above which size and shape are omitted.";
    "nlg.aspect_var_max" => aspect_var_max: f64 = 0.05, "Aspect variance above which size and shape are omitted.";
    "nlg.quadrant_half_width" => quadrant_half_width: f64 = 45.0, "Half width in degrees of the horizontal direction bins.";
    "describe.top_k" => top_k: usize = 3, "Sentences per scene.";
}

impl Config {
    /// Applies `key = value` lines on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, "expected key = value"))?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::default();
        c.merge_text(text)?;
        Ok(c)
    }

    /// A complete config file with every key documented.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v, doc) in self.entries() {
            let _ = writeln!(out, "# {doc}\n{k} = {v}");
        }
        out
    }

    pub fn tracker(&self) -> TrackerParams {
        TrackerParams {
            projection_depth: self.projection_depth,
            projection_decay: self.projection_decay,
            max_per_frame: self.max_per_frame,
            lambda_motion: self.lambda_motion,
            min_track_len: self.min_track_len,
            otsu_bins: self.otsu_bins,
            otsu_margin: self.otsu_margin,
            var_max: self.var_max,
            modality_bins: self.modality_bins,
            max_modes: self.max_modes,
            mode_min_height: self.mode_min_height,
            smooth_window: self.smooth_window,
        }
    }

    pub fn features(&self, fps: f64) -> FeatureConfig {
        FeatureConfig { fps, n_parts: self.n_parts, root_cardinality: self.root_cardinality, ablation: self.ablation }
    }

    pub fn train(&self) -> TrainParams {
        TrainParams {
            n_states: self.n_states,
            max_iters: self.max_iters,
            tol: self.tol,
            var_floor: self.var_floor,
            kappa_cap: self.kappa_cap,
            pseudo_count: self.pseudo_count,
            transition_smoothing: self.transition_smoothing,
            ..TrainParams::default()
        }
    }

    pub fn classifier(&self) -> ClassifierParams {
        ClassifierParams {
            role_search_cap: self.role_search_cap,
            min_clips: self.min_clips,
            stationary_speed: self.stationary_speed,
            threshold_quantile: self.threshold_quantile,
            codebook_size: self.codebook_size,
            codebook_seed: self.codebook_seed,
            train: self.train(),
        }
    }

    pub fn nlg(&self) -> NlgParams {
        NlgParams {
            black_max_value: self.black_max_value,
            white_min_value: self.white_min_value,
            color_min_saturation: self.color_min_saturation,
            hue_offset: self.hue_offset,
            narrow_factor: self.narrow_factor,
            wide_factor: self.wide_factor,
            score_var_max: self.score_var_max,
            aspect_var_max: self.aspect_var_max,
            quadrant_half_width: self.quadrant_half_width,
        }
    }
}
