//! Detection streams: data model, object-class table and the line format.
//!
//! A scene file is line oriented:
//!
//! ```text
//! scene <frame_count> <fps> <width> <height>
//! threshold <class> <value>
//! det <frame> <class> <score> <cx> <cy> <w> <h> [parts dx1 dy1 ...] [hsv H S V] [flow vx vy] [root k]
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. Unknown record types
//! and unknown keyword groups inside a `det` record are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Per-frame, per-class candidate cap applied when parsing and after projection.
pub const DEFAULT_MAX_PER_FRAME: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        BoundingBox { cx, cy, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn aspect(&self) -> f64 {
        self.w / self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.cx, self.cy)
    }
}

/// Mean hue (degrees), saturation and value inside a detection box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub frame: usize,
    pub class: String,
    pub score: f64,
    pub bbox: BoundingBox,
    /// Part-center offsets from the box center, in pixels.
    pub parts: Vec<(f64, f64)>,
    pub root: u32,
    pub hsv: Option<Hsv>,
    /// Optical-flow displacement of the box center, pixels per frame.
    pub flow: Option<(f64, f64)>,
    /// Set on copies created by forward projection.
    pub synthetic: bool,
}

impl Detection {
    pub fn new(frame: usize, class: impl Into<String>, score: f64, bbox: BoundingBox) -> Self {
        Detection { frame, class: class.into(), score, bbox, parts: Vec::new(), root: 0, hsv: None, flow: None, synthetic: false }
    }

    fn check(&self) -> std::result::Result<(), String> {
        let b = &self.bbox;
        if ![self.score, b.cx, b.cy, b.w, b.h].iter().all(|v| v.is_finite()) {
            return Err("non-finite number".into());
        }
        if b.w <= 0.0 || b.h <= 0.0 {
            return Err(format!("box size must be positive, got {}x{}", b.w, b.h));
        }
        if self.parts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err("non-finite part offset".into());
        }
        if let Some(hsv) = self.hsv {
            if !(0.0..360.0).contains(&hsv.h) {
                return Err(format!("hue {} outside [0,360)", hsv.h));
            }
            if !(0.0..=1.0).contains(&hsv.s) || !(0.0..=1.0).contains(&hsv.v) {
                return Err(format!("saturation/value outside [0,1]: {} {}", hsv.s, hsv.v));
            }
        }
        if let Some((vx, vy)) = self.flow {
            if !vx.is_finite() || !vy.is_finite() {
                return Err("non-finite flow".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub frame_count: usize,
    pub fps: f64,
    pub width: f64,
    pub height: f64,
    /// Trained detector acceptance threshold per object class.
    pub thresholds: BTreeMap<String, f64>,
    /// `frames[t][class]` holds that frame's candidates, best score first.
    pub frames: Vec<BTreeMap<String, Vec<Detection>>>,
}

impl Scene {
    pub fn new(frame_count: usize, fps: f64, width: f64, height: f64) -> Self {
        Scene { frame_count, fps, width, height, thresholds: BTreeMap::new(), frames: vec![BTreeMap::new(); frame_count] }
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    /// Adds a detection, keeping the frame's class list sorted by descending
    /// score (stable) and capped at `cap`.
    pub fn push(&mut self, det: Detection, cap: usize) {
        let list = self.frames[det.frame].entry(det.class.clone()).or_default();
        list.push(det);
        cap_candidates(list, cap);
    }

    /// All object classes with at least one detection, sorted.
    pub fn classes(&self) -> Vec<String> {
        let mut out: Vec<String> = self.frames.iter().flat_map(|f| f.keys().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn threshold(&self, class: &str) -> f64 {
        self.thresholds.get(class).copied().unwrap_or(0.0)
    }

    pub fn detection_count(&self) -> usize {
        self.frames.iter().flat_map(|f| f.values()).map(Vec::len).sum()
    }
}

/// Stable sort by descending score, then truncate.
pub fn cap_candidates(list: &mut Vec<Detection>, cap: usize) {
    list.sort_by(|a, b| b.score.total_cmp(&a.score));
    list.truncate(cap);
}

pub fn parse_scene(input: &str) -> Result<Scene> {
    parse_scene_with_cap(input, DEFAULT_MAX_PER_FRAME)
}

pub fn parse_scene_with_cap(input: &str, cap: usize) -> Result<Scene> {
    let mut scene: Option<Scene> = None;
    let mut last_frame = 0usize;
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "scene" => {
                if scene.is_some() {
                    return Err(Error::parse(line_no, "duplicate scene header"));
                }
                if toks.len() < 5 {
                    return Err(Error::parse(line_no, "scene header needs 4 fields"));
                }
                let frame_count: usize = parse_num(toks[1], line_no)?;
                let fps: f64 = parse_num(toks[2], line_no)?;
                let width: f64 = parse_num(toks[3], line_no)?;
                let height: f64 = parse_num(toks[4], line_no)?;
                if fps <= 0.0 || width <= 0.0 || height <= 0.0 {
                    return Err(Error::parse(line_no, "fps and frame size must be positive"));
                }
                scene = Some(Scene::new(frame_count, fps, width, height));
            }
            "threshold" => {
                let s = scene.as_mut().ok_or_else(|| Error::parse(line_no, "threshold before scene header"))?;
                if toks.len() < 3 {
                    return Err(Error::parse(line_no, "threshold needs class and value"));
                }
                let v: f64 = parse_num(toks[2], line_no)?;
                s.thresholds.insert(toks[1].to_string(), v);
            }
            "det" => {
                let s = scene.as_mut().ok_or_else(|| Error::parse(line_no, "detection before scene header"))?;
                let det = parse_det(&toks, line_no)?;
                if det.frame >= s.frame_count {
                    return Err(Error::Structure(format!("line {line_no}: frame {} beyond frame count {}", det.frame, s.frame_count)));
                }
                if det.frame < last_frame {
                    return Err(Error::Structure(format!("line {line_no}: frame {} after frame {last_frame}", det.frame)));
                }
                last_frame = det.frame;
                s.push(det, cap);
            }
            _ => {}
        }
    }
    scene.ok_or_else(|| Error::parse(0, "missing scene header"))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad number '{tok}'")))
}

fn is_number(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

fn parse_det(toks: &[&str], line: usize) -> Result<Detection> {
    if toks.len() < 8 {
        return Err(Error::parse(line, "det needs frame, class, score and box"));
    }
    let frame: usize = parse_num(toks[1], line)?;
    let bbox = BoundingBox::new(parse_num(toks[4], line)?, parse_num(toks[5], line)?, parse_num(toks[6], line)?, parse_num(toks[7], line)?);
    let mut det = Detection::new(frame, toks[2], parse_num(toks[3], line)?, bbox);
    let mut i = 8;
    while i < toks.len() {
        let key = toks[i];
        i += 1;
        let start = i;
        while i < toks.len() && is_number(toks[i]) {
            i += 1;
        }
        let nums = toks[start..i].iter().map(|t| parse_num::<f64>(t, line)).collect::<Result<Vec<f64>>>()?;
        match key {
            "parts" => {
                if nums.len() % 2 != 0 {
                    return Err(Error::parse(line, "parts needs dx/dy pairs"));
                }
                det.parts = nums.chunks(2).map(|c| (c[0], c[1])).collect();
            }
            "hsv" => {
                if nums.len() != 3 {
                    return Err(Error::parse(line, "hsv needs 3 values"));
                }
                det.hsv = Some(Hsv { h: nums[0], s: nums[1], v: nums[2] });
            }
            "flow" => {
                if nums.len() != 2 {
                    return Err(Error::parse(line, "flow needs 2 values"));
                }
                det.flow = Some((nums[0], nums[1]));
            }
            "root" => {
                if nums.len() != 1 || nums[0] < 0.0 || nums[0].fract() != 0.0 {
                    return Err(Error::parse(line, "root needs one non-negative integer"));
                }
                det.root = nums[0] as u32;
            }
            "proj" => det.synthetic = true,
            _ => {}
        }
    }
    det.check().map_err(|msg| Error::parse(line, msg))?;
    Ok(det)
}

/// Writes the optional keyword groups of a detection (shared with track files).
pub(crate) fn write_det_extras(out: &mut String, d: &Detection) {
    if !d.parts.is_empty() {
        out.push_str(" parts");
        for (x, y) in &d.parts {
            let _ = write!(out, " {x} {y}");
        }
    }
    if let Some(hsv) = d.hsv {
        let _ = write!(out, " hsv {} {} {}", hsv.h, hsv.s, hsv.v);
    }
    if let Some((vx, vy)) = d.flow {
        let _ = write!(out, " flow {vx} {vy}");
    }
    if d.root != 0 {
        let _ = write!(out, " root {}", d.root);
    }
    if d.synthetic {
        out.push_str(" proj");
    }
}

/// Renders the canonical text form; `parse_scene` reads it back unchanged.
pub fn render_scene(scene: &Scene) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scene {} {} {} {}", scene.frame_count, scene.fps, scene.width, scene.height);
    for (class, v) in &scene.thresholds {
        let _ = writeln!(out, "threshold {class} {v}");
    }
    for frame in &scene.frames {
        for dets in frame.values() {
            for d in dets {
                let b = &d.bbox;
                let _ = write!(out, "det {} {} {} {} {} {} {}", d.frame, d.class, d.score, b.cx, b.cy, b.w, b.h);
                write_det_extras(&mut out, d);
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// Detections of a person-pose class without part offsets.
    MissingParts { class: String, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    pub class: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub classes: Vec<String>,
    /// Inclusive frame runs in which a present class has no candidate.
    pub gaps: Vec<Gap>,
    pub warnings: Vec<Warning>,
}

pub fn validate_scene(scene: &Scene) -> ValidationReport {
    let classes = scene.classes();
    let mut report = ValidationReport { classes: classes.clone(), ..Default::default() };
    for class in &classes {
        let mut run: Option<usize> = None;
        for (t, frame) in scene.frames.iter().enumerate() {
            let present = frame.get(class).is_some_and(|v| !v.is_empty());
            match (present, run) {
                (false, None) => run = Some(t),
                (true, Some(start)) => {
                    report.gaps.push(Gap { class: class.clone(), from: start, to: t - 1 });
                    run = None;
                }
                _ => {}
            }
        }
        if let Some(start) = run {
            report.gaps.push(Gap { class: class.clone(), from: start, to: scene.frame_count - 1 });
        }
        if ObjectClassTable::standard().is_person(class) {
            let count = scene.frames.iter().filter_map(|f| f.get(class)).flatten().filter(|d| d.parts.is_empty()).count();
            if count > 0 {
                report.warnings.push(Warning::MissingParts { class: class.clone(), count });
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectClassInfo {
    pub name: &'static str,
    pub noun: &'static str,
    pub restrictive: Option<&'static str>,
    pub size: Option<&'static str>,
    pub person_pose: bool,
}

const fn oc(
    name: &'static str,
    noun: &'static str,
    restrictive: Option<&'static str>,
    size: Option<&'static str>,
    person_pose: bool,
) -> ObjectClassInfo {
    ObjectClassInfo { name, noun, restrictive, size, person_pose }
}

static STANDARD_CLASSES: [ObjectClassInfo; 25] = [
    oc("bag", "bag", None, None, false),
    oc("bench", "bench", None, None, false),
    oc("bicycle", "bicycle", None, None, false),
    oc("big-ball", "ball", None, Some("big"), false),
    oc("cage", "cage", None, None, false),
    oc("car", "car", None, None, false),
    oc("cardboard-box", "box", Some("cardboard"), None, false),
    oc("cart", "cart", None, None, false),
    oc("chair", "chair", None, None, false),
    oc("dog", "dog", None, None, false),
    oc("door", "door", None, None, false),
    oc("ladder", "ladder", None, None, false),
    oc("mailbox", "mailbox", None, None, false),
    oc("microwave", "microwave", None, None, false),
    oc("motorcycle", "motorcycle", None, None, false),
    oc("person", "person", Some("upright"), None, true),
    oc("person-crouch", "person", Some("crouched"), None, true),
    oc("person-down", "person", Some("prone"), None, true),
    oc("skateboard", "skateboard", None, None, false),
    oc("small-ball", "ball", None, Some("small"), false),
    oc("suv", "SUV", None, None, false),
    oc("table", "table", None, None, false),
    oc("toy-truck", "truck", Some("toy"), None, false),
    oc("tripod", "tripod", None, None, false),
    oc("truck", "truck", None, None, false),
];

/// The 25 trained detector classes with their noun and adjective mappings.
#[derive(Debug, Clone, Copy)]
pub struct ObjectClassTable {
    rows: &'static [ObjectClassInfo],
}

impl ObjectClassTable {
    pub fn standard() -> Self {
        ObjectClassTable { rows: &STANDARD_CLASSES }
    }

    pub fn rows(&self) -> &'static [ObjectClassInfo] {
        self.rows
    }

    pub fn get(&self, class: &str) -> Option<&'static ObjectClassInfo> {
        self.rows.iter().find(|r| r.name == class)
    }

    /// Dense index for the discrete object-class feature. Unknown extension
    /// classes share the index one past the table.
    pub fn index(&self, class: &str) -> usize {
        self.rows.iter().position(|r| r.name == class).unwrap_or(self.rows.len())
    }

    pub fn cardinality(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn is_person(&self, class: &str) -> bool {
        self.get(class).is_some_and(|r| r.person_pose)
    }

    /// Head noun; extension classes use their own name.
    pub fn noun<'a>(&self, class: &'a str) -> &'a str {
        match self.get(class) {
            Some(r) => r.noun,
            None => class,
        }
    }

    /// Classes whose detections are pooled into one tracking stream.
    pub fn tracking_group<'a>(&self, class: &'a str) -> &'a str {
        if self.is_person(class) {
            "person"
        } else {
            class
        }
    }
}
