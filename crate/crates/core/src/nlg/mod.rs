//! Sentence generation from a recognized verb and its role-assigned tracks.
//!
//! Each verb has one template. The subject's motion picks the adverb and the
//! direction adjunct; noun phrases get just enough adjectives to single out
//! their referent among the scene's tracks.

pub mod grammar;
pub mod lexicon;
pub mod np;
pub mod templates;

use std::collections::BTreeMap;

use crate::classifier::{mean_speed, ModelBank, ObjectStats, Ranked, SpeedThresholds};
use crate::error::{Error, Result};
use crate::features::center_velocity;
use crate::geometry::{quadrant_split, screen_angle, Quadrant};
use crate::tracker::Track;

pub use grammar::{parse_sentence, within_vocabulary};
pub use np::{Attributes, Determiner, NounPhrase};
pub use templates::{template, Part, Template};

#[derive(Debug, Clone, PartialEq)]
pub struct NlgParams {
    pub black_max_value: f64,
    pub white_min_value: f64,
    pub color_min_saturation: f64,
    /// Start of the red hue bin, degrees.
    pub hue_offset: f64,
    pub narrow_factor: f64,
    pub wide_factor: f64,
    pub score_var_max: f64,
    pub aspect_var_max: f64,
    /// Half width of the horizontal direction bins, degrees.
    pub quadrant_half_width: f64,
}

impl Default for NlgParams {
    fn default() -> Self {
        NlgParams {
            black_max_value: 0.2,
            white_min_value: 0.8,
            color_min_saturation: 0.7,
            hue_offset: -30.0,
            narrow_factor: 0.7,
            wide_factor: 1.3,
            score_var_max: 0.5,
            aspect_var_max: 0.05,
            quadrant_half_width: 45.0,
        }
    }
}

const HUES: [&str; 6] = ["red", "yellow", "green", "teal", "blue", "pink"];

/// Color adjective for a mean HSV, if any. Hue in degrees.
pub fn color_name(h: f64, s: f64, v: f64, params: &NlgParams) -> Option<&'static str> {
    if v <= params.black_max_value {
        Some("black")
    } else if v >= params.white_min_value {
        Some("white")
    } else if s >= params.color_min_saturation {
        let bin = ((h - params.hue_offset).rem_euclid(360.0) / 60.0).floor() as usize;
        Some(HUES[bin.min(5)])
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion {
    /// Magnitude of the mean velocity over the moving frames, pixels/second.
    pub speed: f64,
    pub orientation: f64,
    /// Frames faster than `v1`.
    pub moving_frames: usize,
}

/// Mean velocity over the frames where the track moves faster than `v1`.
pub fn subject_motion(track: &Track, v1: f64, fps: f64) -> Motion {
    let (vx, vy) = center_velocity(track, fps);
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for (x, y) in vx.iter().zip(&vy) {
        if x.hypot(*y) > v1 {
            sx += x;
            sy += y;
            n += 1;
        }
    }
    if n == 0 {
        return Motion { speed: 0.0, orientation: 0.0, moving_frames: 0 };
    }
    let (mx, my) = (sx / n as f64, sy / n as f64);
    Motion { speed: mx.hypot(my), orientation: screen_angle(mx, my), moving_frames: n }
}

pub fn choose_adverb(t: &Template, speeds: &SpeedThresholds, m: &Motion) -> Option<&'static str> {
    if !t.has_adverb() || m.moving_frames == 0 {
        return None;
    }
    if m.speed > speeds.v2 {
        Some("quickly")
    } else if speeds.v1 <= m.speed && m.speed <= speeds.v3 {
        Some("slowly")
    } else {
        None
    }
}

/// Direction adjunct in the template's preferred style.
pub fn choose_adjunct(t: &Template, speeds: &SpeedThresholds, m: &Motion, params: &NlgParams) -> Option<Vec<&'static str>> {
    if m.moving_frames == 0 || m.speed < speeds.v1 {
        return None;
    }
    let q = quadrant_split(m.orientation, params.quadrant_half_width);
    let flat = |p: &Part| -> Vec<Part> {
        match p {
            Part::Optional(inner) => inner.clone(),
            other => vec![other.clone()],
        }
    };
    let style = t.parts.iter().flat_map(flat).find(|p| matches!(p, Part::Endogenous | Part::Exogenous))?;
    Some(match (style, q) {
        (Part::Endogenous, Quadrant::Right) => vec!["rightward"],
        (Part::Endogenous, Quadrant::Up) => vec!["upward"],
        (Part::Endogenous, Quadrant::Left) => vec!["leftward"],
        (Part::Endogenous, Quadrant::Down) => vec!["downward"],
        (_, Quadrant::Right) => vec!["from", "the", "left"],
        (_, Quadrant::Up) => vec!["from", "below"],
        (_, Quadrant::Left) => vec!["from", "the", "right"],
        (_, Quadrant::Down) => vec!["from", "above"],
    })
}

fn mean_center(t: &Track, from: usize, to: usize) -> (f64, f64) {
    let boxes: Vec<_> = (from..to).filter_map(|f| t.box_at(f)).collect();
    let n = boxes.len().max(1) as f64;
    (boxes.iter().map(|b| b.cx).sum::<f64>() / n, boxes.iter().map(|b| b.cy).sum::<f64>() / n)
}

/// Viewer-relative relation of `subject` to `reference`, from their mean
/// centers over the frames both cover.
pub fn spatial_relation(subject: &Track, reference: &Track, params: &NlgParams) -> Option<&'static [&'static str]> {
    let (from, to) = crate::features::overlap(subject, reference)?;
    let (sx, sy) = mean_center(subject, from, to);
    let (rx, ry) = mean_center(reference, from, to);
    if sx == rx && sy == ry {
        return None;
    }
    Some(match quadrant_split(screen_angle(rx - sx, ry - sy), params.quadrant_half_width) {
        Quadrant::Right => &["to", "the", "left", "of"],
        Quadrant::Up => &["below"],
        Quadrant::Left => &["to", "the", "right", "of"],
        Quadrant::Down => &["above"],
    })
}

/// Pronoun standing in for a required object that has no track.
pub fn object_pronoun(verb: &str) -> &'static str {
    match verb {
        "attached" | "raised" => "themselves",
        "moved" => "itself",
        _ => "something",
    }
}

const ENTERABLE: [&str; 4] = ["car", "door", "suv", "truck"];

fn patient_is_enterable(patient: &Track) -> bool {
    ENTERABLE.contains(&patient.class.as_str()) || ENTERABLE.contains(&patient.dominant_model())
}

fn receives_from(patient: &Track) -> bool {
    let table = crate::scene::ObjectClassTable::standard();
    patient.class == "mailbox" || table.is_person(&patient.class) || table.is_person(patient.dominant_model())
}

/// Inputs for one sentence.
#[derive(Debug, Clone, Copy)]
pub struct Description<'a> {
    pub verb: &'a str,
    pub speeds: SpeedThresholds,
    pub agent: &'a Track,
    /// Present exactly for pair models.
    pub patient: Option<&'a Track>,
    /// Every track in the scene, participants included.
    pub scene: &'a [Track],
    pub objects: &'a BTreeMap<String, ObjectStats>,
    pub fps: f64,
}

enum ObjectNp {
    Pronoun(&'static str),
    Phrase(Vec<String>),
}

struct Realizer<'a> {
    verb: &'a str,
    subject: Vec<String>,
    object: Option<ObjectNp>,
    adverb: Option<&'static str>,
    adjunct: Option<Vec<&'static str>>,
    patient: Option<&'a Track>,
}

impl Realizer<'_> {
    fn emit(&self, parts: &[Part], two_track: bool, out: &mut Vec<String>) {
        for p in parts {
            match p {
                Part::Subject => out.extend(self.subject.iter().cloned()),
                Part::Object => match &self.object {
                    Some(ObjectNp::Pronoun(w)) => out.push(w.to_string()),
                    Some(ObjectNp::Phrase(t)) => out.extend(t.iter().cloned()),
                    None => out.push(object_pronoun(self.verb).to_string()),
                },
                Part::Adverb => out.extend(self.adverb.map(String::from)),
                Part::Endogenous | Part::Exogenous => {
                    if let Some(a) = &self.adjunct {
                        out.extend(a.iter().map(|w| w.to_string()));
                    }
                }
                Part::Word(w) => out.push(w.to_string()),
                Part::Optional(inner) => {
                    let include = if p.mentions_object() {
                        two_track && matches!(self.object, Some(ObjectNp::Phrase(_)))
                    } else if inner.iter().all(|q| matches!(q, Part::Word(_))) {
                        self.verb == "received" && self.patient.is_some_and(receives_from)
                    } else {
                        true
                    };
                    if include {
                        self.emit(inner, two_track, out);
                    }
                }
            }
        }
    }
}

pub fn generate_sentence(d: &Description, params: &NlgParams) -> Result<String> {
    let t = template(d.verb).ok_or_else(|| Error::invalid(format!("no template for {:?}", d.verb)))?;
    let (mut subject, mut object) = (d.agent, d.patient);
    if let Some(patient) = d.patient {
        if patient.id == d.agent.id {
            return Err(Error::invalid("agent and patient are the same track"));
        }
        let (sa, sp) = (mean_speed(d.agent, d.fps), mean_speed(patient, d.fps));
        if matches!(d.verb, "approached" | "fled") && sa < d.speeds.v1 && sp > sa {
            subject = patient;
            object = Some(d.agent);
        }
    }
    let two_track = object.is_some();

    let mut scene: Vec<Attributes> = d.scene.iter().map(|tr| np::attributes(tr, d.objects, params)).collect();
    for tr in [Some(subject), object].into_iter().flatten() {
        if !scene.iter().any(|a| a.id == tr.id) {
            scene.push(np::attributes(tr, d.objects, params));
        }
    }
    let attr = |id: usize| scene.iter().find(|a| a.id == id).expect("participant listed").clone();
    let subj_attr = attr(subject.id);

    let pronoun_object = object.is_some_and(|o| matches!(d.verb, "entered" | "exited") && !patient_is_enterable(o));
    let stationary = |tr: &Track| mean_speed(tr, d.fps) < d.speeds.v1;
    let relation = match object {
        Some(o) if !pronoun_object && stationary(subject) && stationary(o) => spatial_relation(subject, o, params),
        _ => None,
    };

    let subj_np = np::plan(&subj_attr, &scene, &[]);
    let mut subject_tokens = subj_np.tokens();
    let mut object_np = None;
    if let Some(o) = object {
        let o_attr = attr(o.id);
        let np = np::plan(&o_attr, &scene, &[&subj_attr]);
        if let Some(rel) = relation {
            subject_tokens.extend(rel.iter().map(|w| w.to_string()));
            subject_tokens.extend(np.tokens());
            let coref = NounPhrase { determiner: Determiner::That, ..np };
            object_np = Some(ObjectNp::Phrase(coref.tokens()));
        } else if pronoun_object {
            object_np = Some(ObjectNp::Pronoun("something"));
        } else {
            object_np = Some(ObjectNp::Phrase(np.tokens()));
        }
    }

    let motion = subject_motion(subject, d.speeds.v1, d.fps);
    let r = Realizer {
        verb: d.verb,
        subject: subject_tokens,
        object: object_np,
        adverb: choose_adverb(t, &d.speeds, &motion),
        adjunct: if t.has_adjunct() { choose_adjunct(t, &d.speeds, &motion, params) } else { None },
        patient: object,
    };
    let mut words = Vec::new();
    r.emit(&t.parts, two_track, &mut words);
    Ok(finish(&words))
}

fn finish(words: &[String]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get(0..1) {
        let upper = first.to_uppercase();
        s.replace_range(0..1, &upper);
    }
    s.push('.');
    s
}

/// Sentence for one ranked classification of a scene.
pub fn describe(bank: &ModelBank, ranked: &Ranked, tracks: &[Track], params: &NlgParams) -> Result<String> {
    let model = bank.models.get(&ranked.verb).ok_or_else(|| Error::invalid(format!("bank has no model for {}", ranked.verb)))?;
    let find = |id: usize| tracks.iter().find(|t| t.id == id).ok_or_else(|| Error::invalid(format!("no track with id {id}")));
    let agent = find(ranked.roles.agent)?;
    let patient = ranked.roles.patient.map(find).transpose()?;
    generate_sentence(
        &Description {
            verb: &ranked.verb,
            speeds: model.speeds,
            agent,
            patient,
            scene: tracks,
            objects: &bank.objects,
            fps: bank.features.fps,
        },
        params,
    )
}
