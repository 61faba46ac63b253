//! Referring expressions: which adjectives and which determiner a participant
//! needs to be told apart from everything else in the scene.

use std::collections::BTreeMap;

use super::{color_name, NlgParams};
use crate::classifier::ObjectStats;
use crate::scene::ObjectClassTable;
use crate::tracker::Track;

/// Everything that could be said about one track.
#[derive(Debug, Clone, PartialEq)]
pub struct Attributes {
    pub id: usize,
    pub class: String,
    pub noun: String,
    pub human: bool,
    pub size: Option<&'static str>,
    pub shape: Option<&'static str>,
    pub color: Option<&'static str>,
    /// Person-pose adjective.
    pub pose: Option<&'static str>,
    /// Class-derived restrictive adjective other than a pose.
    pub restrictive: Option<&'static str>,
}

fn mean_hsv(track: &Track) -> Option<(f64, f64, f64)> {
    let hsv: Vec<_> = track.selections.iter().filter_map(|d| d.hsv).collect();
    if hsv.is_empty() {
        return None;
    }
    let n = hsv.len() as f64;
    let (c, s) = hsv.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.h.to_radians().cos(), acc.1 + x.h.to_radians().sin()));
    let h = s.atan2(c).to_degrees().rem_euclid(360.0);
    let sat = hsv.iter().map(|x| x.s).sum::<f64>() / n;
    let val = hsv.iter().map(|x| x.v).sum::<f64>() / n;
    Some((h, sat, val))
}

fn size_and_shape(track: &Track, stats: &ObjectStats, params: &NlgParams) -> (Option<&'static str>, Option<&'static str>) {
    let a = track.mean_area();
    let r = track.mean_aspect();
    let big = a >= stats.beta * stats.mean_area;
    let small = a <= stats.alpha * stats.mean_area;
    let (big, small) = if big && small { (false, false) } else { (big, small) };
    let thin = r <= params.narrow_factor * stats.mean_aspect;
    let broad = r >= params.wide_factor * stats.mean_aspect;
    let size = if big {
        Some("big")
    } else if small {
        Some("small")
    } else {
        None
    };
    let shape = match (thin, broad, big, small) {
        (true, _, true, _) => Some("tall"),
        (_, true, _, true) => Some("short"),
        (true, _, _, true) => Some("narrow"),
        (_, true, true, _) => Some("wide"),
        _ => None,
    };
    (size, shape)
}

pub fn attributes(track: &Track, objects: &BTreeMap<String, ObjectStats>, params: &NlgParams) -> Attributes {
    let table = ObjectClassTable::standard();
    let model = track.dominant_model();
    let info = table.get(model).or_else(|| table.get(&track.class));
    let human = table.is_person(model) || table.is_person(&track.class);
    let noun = table.noun(info.map_or(track.class.as_str(), |i| i.name)).to_string();
    let stable = track.score_stats.variance <= params.score_var_max && track.aspect_variance() <= params.aspect_var_max;
    let (mut size, shape) = match objects.get(&track.class) {
        Some(stats) if stable => size_and_shape(track, stats, params),
        _ => (None, None),
    };
    if let Some(fixed) = info.and_then(|i| i.size) {
        size = Some(fixed);
    }
    let restrictive = info.and_then(|i| i.restrictive);
    let (pose, restrictive) = if human { (restrictive, None) } else { (None, restrictive) };
    let color = if human { None } else { mean_hsv(track).and_then(|(h, s, v)| color_name(h, s, v, params)) };
    Attributes { id: track.id, class: track.class.clone(), noun, human, size, shape, color, pose, restrictive }
}

/// The chosen adjectives, in surface order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Description {
    pub other: bool,
    pub size: Option<&'static str>,
    pub shape: Option<&'static str>,
    pub color: Option<&'static str>,
    pub restrictive: Option<&'static str>,
    pub pose: Option<&'static str>,
}

impl Description {
    /// Whether every chosen property also holds of `t`, given a head noun.
    fn fits(&self, noun: &str, t: &Attributes) -> bool {
        let same = |mine: Option<&str>, theirs: Option<&str>| mine.is_none() || mine == theirs;
        t.noun == noun
            && same(self.size, t.size)
            && same(self.shape, t.shape)
            && same(self.color, t.color)
            && same(self.restrictive, t.restrictive)
            && same(self.pose, t.pose)
    }

    pub fn adjectives(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.other {
            out.push("other");
        }
        out.extend(self.size);
        out.extend(self.shape);
        out.extend(self.color);
        out.extend(self.restrictive);
        out.extend(self.pose);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Determiner {
    The,
    That,
    Some,
}

impl Determiner {
    pub fn word(self) -> &'static str {
        match self {
            Determiner::The => "the",
            Determiner::That => "that",
            Determiner::Some => "some",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NounPhrase {
    pub referent: usize,
    pub determiner: Determiner,
    pub description: Description,
    pub noun: String,
}

impl NounPhrase {
    pub fn tokens(&self) -> Vec<String> {
        let mut v = vec![self.determiner.word().to_string()];
        v.extend(self.description.adjectives().into_iter().map(String::from));
        v.push(self.noun.clone());
        v
    }
}

/// Plans a noun phrase for `who` against every other track in `scene`.
/// `earlier` lists participants already mentioned in the sentence; a
/// description that still fits one of them gets `other`.
pub fn plan(who: &Attributes, scene: &[Attributes], earlier: &[&Attributes]) -> NounPhrase {
    let mut d = Description { size: who.size, shape: who.shape, restrictive: who.restrictive, ..Description::default() };
    let rivals = |d: &Description| scene.iter().filter(|t| t.id != who.id && d.fits(&who.noun, t)).count();
    let mut remaining = rivals(&d);
    if remaining > 0 && !who.human && who.color.is_some() {
        let with = Description { color: who.color, ..d.clone() };
        let n = rivals(&with);
        if n < remaining {
            d = with;
            remaining = n;
        }
    }
    if remaining > 0 && who.human && who.pose.is_some() {
        let with = Description { pose: who.pose, ..d.clone() };
        let n = rivals(&with);
        if n < remaining {
            d = with;
            remaining = n;
        }
    }
    d.other = earlier.iter().any(|e| e.id != who.id && d.fits(&who.noun, e));
    let determiner = if remaining == 0 && !d.other { Determiner::The } else { Determiner::Some };
    NounPhrase { referent: who.id, determiner, description: d, noun: who.noun.clone() }
}
