//! Detection streams in, sentences out.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`scene`]: the detection-stream data model and its line format.
//! * [`tracker`]: forward projection, score normalization, Viterbi track
//!   selection, pruning and smoothing.
//! * [`posture`]: part-displacement pose vectors and a hierarchical k-means
//!   codebook.
//! * [`features`]: per-frame feature series for one track or a track pair.
//! * [`hmm`]: HMMs with independent categorical, Gaussian and von Mises
//!   outputs.
//! * [`classifier`]: the per-verb model bank, role assignment and ROC.
//! * [`nlg`]: template-driven sentence generation.
//! * [`synth`]: a scripted generator of labeled detection streams.
//! * [`pipeline`]: glue that runs the stages end to end.

pub mod classifier;
pub mod config;
pub mod error;
pub mod features;
pub mod geometry;
pub mod hmm;
pub mod nlg;
pub mod pipeline;
pub mod posture;
pub mod scene;
pub mod stats;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
