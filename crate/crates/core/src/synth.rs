//! Scripted generator of labeled detection streams.
//!
//! A script places an agent (always a person) and usually a patient on
//! piecewise-linear paths whose shape follows the verb, then renders noisy
//! detector output for them: jittered boxes, distractor candidates, dropouts,
//! flow hints and part offsets drawn from per-posture prototypes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scene::{BoundingBox, Detection, Hsv, Scene};

/// Verbs with a motion script, used for the end-to-end experiments.
pub const MOTION_VERBS: [&str; 8] = ["approached", "carried", "chased", "collided", "fled", "followed", "passed", "picked"];

/// Verbs with identical motion that differ only in posture.
pub const POSTURE_VERBS: [&str; 2] = ["kicked", "pushed"];

const PATIENT_CLASSES: [&str; 6] = ["bag", "big-ball", "cart", "chair", "dog", "small-ball"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub score_sigma: f64,
    pub center_sigma: f64,
    pub size_sigma: f64,
    pub part_sigma: f64,
    pub flow_sigma: f64,
    /// Expected distractor candidates per class per frame.
    pub distractor_rate: f64,
    pub dropout: f64,
}

impl NoiseSpec {
    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "clean" => NoiseSpec {
                score_sigma: 0.0,
                center_sigma: 0.0,
                size_sigma: 0.0,
                part_sigma: 0.0,
                flow_sigma: 0.0,
                distractor_rate: 0.0,
                dropout: 0.0,
            },
            "medium" => NoiseSpec {
                score_sigma: 0.15,
                center_sigma: 2.0,
                size_sigma: 1.5,
                part_sigma: 2.0,
                flow_sigma: 0.5,
                distractor_rate: 1.0,
                dropout: 0.03,
            },
            "hard" => NoiseSpec {
                score_sigma: 0.3,
                center_sigma: 5.0,
                size_sigma: 3.0,
                part_sigma: 4.0,
                flow_sigma: 1.5,
                distractor_rate: 3.0,
                dropout: 0.1,
            },
            _ => return None,
        })
    }

    fn check(&self) -> Result<()> {
        let sig = [self.score_sigma, self.center_sigma, self.size_sigma, self.part_sigma, self.flow_sigma, self.distractor_rate];
        if sig.iter().any(|s| !s.is_finite() || *s < 0.0) || !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::invalid("noise parameters must be non-negative and dropout a probability"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Posture {
    Walk,
    Stand,
    Crouch,
    Carry,
    Kick,
    Push,
}

impl Posture {
    fn detector(self) -> &'static str {
        match self {
            Posture::Crouch => "person-crouch",
            _ => "person",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Agent,
    Patient,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Agent => "agent",
            Role::Patient => "patient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantScript {
    pub role: Role,
    pub class: String,
    pub width: f64,
    pub height: f64,
    /// `(frame, cx, cy)` keyframes, interpolated linearly.
    pub path: Vec<(f64, f64, f64)>,
    /// `(first frame, posture)`; persons only.
    pub postures: Vec<(usize, Posture)>,
    /// Facing direction, +1 right or -1 left.
    pub facing: f64,
    pub color: Option<Hsv>,
}

impl ParticipantScript {
    pub fn center(&self, frame: usize) -> (f64, f64) {
        let f = frame as f64;
        let p = &self.path;
        if f <= p[0].0 {
            return (p[0].1, p[0].2);
        }
        for w in p.windows(2) {
            if f <= w[1].0 {
                let t = (f - w[0].0) / (w[1].0 - w[0].0);
                return (w[0].1 + t * (w[1].1 - w[0].1), w[0].2 + t * (w[1].2 - w[0].2));
            }
        }
        let last = p[p.len() - 1];
        (last.1, last.2)
    }

    pub fn posture(&self, frame: usize) -> Option<Posture> {
        self.postures.iter().rev().find(|(f, _)| *f <= frame).map(|(_, p)| *p)
    }

    pub fn bbox(&self, frame: usize) -> BoundingBox {
        let (cx, cy) = self.center(frame);
        match self.posture(frame) {
            // A crouching person's box is shorter and sits lower.
            Some(Posture::Crouch) => BoundingBox::new(cx, cy + self.height * 0.2, self.width * 1.1, self.height * 0.6),
            _ => BoundingBox::new(cx, cy, self.width, self.height),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventScript {
    pub verb: String,
    pub participants: Vec<ParticipantScript>,
    pub frames: usize,
    pub fps: f64,
    pub width: f64,
    pub height: f64,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl EventScript {
    /// Reflects the event about the vertical center line.
    pub fn mirror(&mut self) {
        for p in &mut self.participants {
            for k in &mut p.path {
                k.1 = self.width - k.1;
            }
            p.facing = -p.facing;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthParticipant {
    pub role: Role,
    pub class: String,
    /// True box in every frame.
    pub boxes: Vec<BoundingBox>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub verb: String,
    pub participants: Vec<TruthParticipant>,
}

impl GroundTruth {
    pub fn role(&self, role: Role) -> Option<&TruthParticipant> {
        self.participants.iter().find(|p| p.role == role)
    }
}

fn gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Part offsets for a posture, as fractions of box height, facing right.
fn prototype(p: Posture, phase: f64) -> [(f64, f64); 8] {
    let swing = 0.08 * phase.sin();
    match p {
        Posture::Walk => [
            (0.0, -0.4),
            (0.0, -0.15),
            (-0.1, -0.2),
            (0.1, -0.2),
            (-0.05 - swing, 0.05),
            (0.05 + swing, 0.05),
            (-swing, 0.45),
            (swing, 0.45),
        ],
        Posture::Stand => [(0.0, -0.4), (0.0, -0.15), (-0.1, -0.2), (0.1, -0.2), (-0.12, 0.05), (0.12, 0.05), (-0.06, 0.45), (0.06, 0.45)],
        Posture::Crouch => [(0.05, -0.35), (0.0, -0.1), (-0.05, -0.15), (0.12, -0.1), (0.15, 0.3), (0.2, 0.3), (-0.1, 0.4), (0.1, 0.4)],
        Posture::Carry => {
            [(0.0, -0.4), (0.0, -0.15), (-0.05, -0.2), (0.12, -0.2), (0.2, -0.05), (0.22, -0.02), (-swing, 0.45), (swing, 0.45)]
        }
        Posture::Kick => {
            [(-0.05, -0.4), (-0.02, -0.15), (-0.15, -0.25), (0.1, -0.25), (-0.2, 0.0), (0.15, 0.0), (-0.08, 0.45), (0.35, 0.3)]
        }
        Posture::Push => {
            [(0.05, -0.4), (0.03, -0.15), (0.1, -0.22), (0.15, -0.22), (0.35, -0.18), (0.37, -0.12), (-0.12, 0.45), (0.05, 0.45)]
        }
    }
}

/// Where the path starts, chosen so the whole path fits inside the frame.
struct Layout {
    x0: f64,
    y: f64,
}

fn layout(rng: &mut ChaCha8Rng, span: (f64, f64), width: f64, height: f64, margin: f64) -> Result<Layout> {
    let (lo, hi) = span;
    let room = width - 2.0 * margin - (hi - lo);
    if room < 0.0 {
        return Err(Error::invalid("scripted path does not fit in the frame"));
    }
    let shift = rng.gen_range(0.0..=room);
    Ok(Layout { x0: margin + shift - lo, y: rng.gen_range(height * 0.4..height * 0.65) })
}

/// A random script for `verb`, staged left to right. Parameters vary with the
/// seed; the shape of the motion is fixed per verb. See [`EventScript::mirror`]
/// for the other direction.
pub fn script_for(verb: &str, noise: NoiseSpec, seed: u64) -> Result<EventScript> {
    noise.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = rng.gen_range(54..=66);
    let t = frames as f64 - 1.0;
    let fps = 30.0;
    let (width, height) = (1280.0, 720.0);
    let k = rng.gen_range(0.85..1.15);
    let (pw, ph) = (60.0 * k, 150.0 * k);
    let patient_class = PATIENT_CLASSES[rng.gen_range(0..PATIENT_CLASSES.len())];
    let (ow, oh) = match patient_class {
        "bag" => (40.0, 50.0),
        "big-ball" => (55.0, 55.0),
        "cart" => (90.0, 70.0),
        "chair" => (60.0, 80.0),
        "dog" => (80.0, 55.0),
        _ => (30.0, 30.0),
    };
    let (ow, oh) = (ow * k, oh * k);
    let walk = rng.gen_range(110.0..170.0) / fps;
    let run = rng.gen_range(280.0..360.0) / fps;
    let gap = (pw + ow) / 2.0 + rng.gen_range(20.0..40.0);
    let contact = (pw + ow) / 2.0 - 5.0;
    let ground = ph / 2.0 - oh / 2.0;
    let hand = (0.25 * pw + ow / 2.0, -0.05 * ph);

    // Paths in travel coordinates: u along the direction of travel, v down.
    type Path = Vec<(f64, f64, f64)>;
    let still = |u: f64, v: f64| -> Path { vec![(0.0, u, v), (t, u, v)] };
    let mut agent_postures = vec![(0usize, Posture::Walk)];
    let at = |frac: f64| (frac * t).round();
    let (agent, patient): (Path, Option<Path>) = match verb {
        "approached" => {
            let stop = at(rng.gen_range(0.6..0.75));
            let p = walk * stop + gap;
            agent_postures.push((stop as usize, Posture::Stand));
            (vec![(0.0, 0.0, 0.0), (stop, walk * stop, 0.0), (t, walk * stop, 0.0)], Some(still(p, ground)))
        }
        "fled" => {
            let go = at(rng.gen_range(0.2..0.35));
            agent_postures = vec![(0, Posture::Stand), (go as usize, Posture::Walk)];
            (vec![(0.0, gap, 0.0), (go, gap, 0.0), (t, gap + run * (t - go), 0.0)], Some(still(0.0, ground)))
        }
        "chased" => {
            let lead = rng.gen_range(180.0..220.0);
            let close = rng.gen_range(60.0..90.0);
            (vec![(0.0, 0.0, 0.0), (t, run * t + close, 0.0)], Some(vec![(0.0, lead, ground), (t, lead + run * t, ground)]))
        }
        "followed" => {
            let lead = rng.gen_range(170.0..210.0);
            (vec![(0.0, 0.0, 0.0), (t, walk * t, 0.0)], Some(vec![(0.0, lead, ground), (t, lead + walk * t, ground)]))
        }
        "carried" => {
            agent_postures = vec![(0, Posture::Carry)];
            (vec![(0.0, 0.0, 0.0), (t, walk * t, 0.0)], Some(vec![(0.0, hand.0, hand.1), (t, hand.0 + walk * t, hand.1)]))
        }
        "picked" => {
            let reach = at(rng.gen_range(0.35..0.45));
            let up = reach + at(0.2);
            let u = walk * reach;
            agent_postures = vec![(0, Posture::Walk), (reach as usize, Posture::Crouch), (up as usize, Posture::Carry)];
            let p =
                vec![(0.0, u + gap, ground), (reach, u + gap, ground), (up, u + hand.0, hand.1), (t, u + hand.0 + walk * (t - up), hand.1)];
            (vec![(0.0, 0.0, 0.0), (reach, u + gap - hand.0, 0.0), (up, u, 0.0), (t, u + walk * (t - up), 0.0)], Some(p))
        }
        "collided" => {
            let hit = at(rng.gen_range(0.5..0.65));
            let p0 = run * hit + contact;
            agent_postures.push((hit as usize, Posture::Stand));
            let after = 0.5 * run * (t - hit);
            (
                vec![(0.0, 0.0, 0.0), (hit, run * hit, 0.0), (t, run * hit, 0.0)],
                Some(vec![(0.0, p0, ground), (hit, p0, ground), (t, p0 + after, ground)]),
            )
        }
        "passed" => {
            let offset = rng.gen_range(30.0..60.0);
            let p = walk * t * rng.gen_range(0.4..0.6);
            (vec![(0.0, 0.0, 0.0), (t, walk * t, 0.0)], Some(still(p, ground + offset)))
        }
        "kicked" | "pushed" => {
            let stop = at(rng.gen_range(0.4..0.5));
            let touch = stop + at(0.2);
            let u = walk * stop;
            let p0 = u + contact;
            let pose = if verb == "kicked" { Posture::Kick } else { Posture::Push };
            agent_postures = vec![(0, Posture::Walk), (stop as usize, pose), (touch as usize, Posture::Stand)];
            let speed = rng.gen_range(150.0..220.0) / fps;
            (
                vec![(0.0, 0.0, 0.0), (stop, u, 0.0), (t, u, 0.0)],
                Some(vec![(0.0, p0, ground), (touch, p0, ground), (t, p0 + speed * (t - touch), ground)]),
            )
        }
        _ => return Err(Error::invalid(format!("no motion script for {verb:?}"))),
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, u, _) in agent.iter().chain(patient.iter().flatten()) {
        lo = lo.min(*u);
        hi = hi.max(*u);
    }
    let margin = pw.max(ow) + 10.0;
    let lay = layout(&mut rng, (lo, hi), width, height, margin)?;
    let place = |path: &Path| -> Path { path.iter().map(|(f, u, v)| (*f, lay.x0 + u, lay.y + v)).collect() };

    let mut participants = vec![ParticipantScript {
        role: Role::Agent,
        class: "person".into(),
        width: pw,
        height: ph,
        path: place(&agent),
        postures: agent_postures,
        facing: 1.0,
        color: None,
    }];
    if let Some(p) = patient {
        let color = Hsv { h: rng.gen_range(0.0..360.0), s: rng.gen_range(0.75..0.95), v: rng.gen_range(0.35..0.7) };
        participants.push(ParticipantScript {
            role: Role::Patient,
            class: patient_class.into(),
            width: ow,
            height: oh,
            path: place(&p),
            postures: Vec::new(),
            facing: 1.0,
            color: Some(color),
        });
    }
    Ok(EventScript { verb: verb.into(), participants, frames, fps, width, height, noise, seed })
}

fn check_feasible(script: &EventScript) -> Result<()> {
    if script.frames < 3 {
        return Err(Error::invalid("script needs at least 3 frames"));
    }
    for p in &script.participants {
        if p.path.is_empty() {
            return Err(Error::invalid("participant without a path"));
        }
        for f in 0..script.frames {
            let b = p.bbox(f);
            if b.cx - b.w / 2.0 < 0.0 || b.cx + b.w / 2.0 > script.width || b.cy - b.h / 2.0 < 0.0 || b.cy + b.h / 2.0 > script.height {
                return Err(Error::invalid(format!("{} leaves the frame at frame {f}", p.role.name())));
            }
        }
    }
    Ok(())
}

/// Renders the detector output for a script. Deterministic in `script.seed`.
pub fn generate_scene(script: &EventScript) -> Result<(Scene, GroundTruth)> {
    script.noise.check()?;
    check_feasible(script)?;
    let n = script.noise;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed ^ 0x05ee_d0f5_ce4e);
    let mut scene = Scene::new(script.frames, script.fps, script.width, script.height);
    let mut truth = GroundTruth { verb: script.verb.clone(), participants: Vec::new() };
    let clamp01 = |x: f64| x.clamp(0.0, 1.0);

    for p in &script.participants {
        let human = p.posture(0).is_some();
        if human {
            for c in ["person", "person-crouch"] {
                scene.thresholds.insert(c.into(), 0.0);
            }
        } else {
            scene.thresholds.insert(p.class.clone(), 0.0);
        }
        let boxes: Vec<BoundingBox> = (0..script.frames).map(|f| p.bbox(f)).collect();
        for f in 0..script.frames {
            if n.dropout > 0.0 && rng.gen_bool(n.dropout) {
                continue;
            }
            let b = boxes[f];
            let jb = BoundingBox::new(
                b.cx + gauss(&mut rng, n.center_sigma),
                b.cy + gauss(&mut rng, n.center_sigma),
                (b.w + gauss(&mut rng, n.size_sigma)).max(1.0),
                (b.h + gauss(&mut rng, n.size_sigma)).max(1.0),
            );
            let class: &str = match p.posture(f) {
                Some(pose) => pose.detector(),
                None => &p.class,
            };
            let mut d = Detection::new(f, class, 1.0 + gauss(&mut rng, n.score_sigma), jb);
            let next = if f + 1 < script.frames { boxes[f + 1] } else { b };
            let prev = if f + 1 < script.frames { b } else { boxes[f.saturating_sub(1)] };
            d.flow = Some((next.cx - prev.cx + gauss(&mut rng, n.flow_sigma), next.cy - prev.cy + gauss(&mut rng, n.flow_sigma)));
            if let Some(pose) = p.posture(f) {
                let phase = f as f64 * 0.6;
                d.parts = prototype(pose, phase)
                    .iter()
                    .map(|(x, y)| (x * p.height * p.facing + gauss(&mut rng, n.part_sigma), y * p.height + gauss(&mut rng, n.part_sigma)))
                    .collect();
                d.root = u32::from(pose == Posture::Crouch);
            }
            if let Some(c) = p.color {
                d.hsv = Some(Hsv {
                    h: (c.h + gauss(&mut rng, 4.0 * n.score_sigma)).rem_euclid(360.0) % 360.0,
                    s: clamp01(c.s + gauss(&mut rng, 0.1 * n.score_sigma)),
                    v: clamp01(c.v + gauss(&mut rng, 0.1 * n.score_sigma)),
                });
            }
            scene.push(d, usize::MAX);
        }
        truth.participants.push(TruthParticipant { role: p.role, class: p.class.clone(), boxes });
    }

    if n.distractor_rate > 0.0 {
        let classes: Vec<(String, f64, f64, bool)> =
            script.participants.iter().map(|p| (p.class.clone(), p.width, p.height, p.posture(0).is_some())).collect();
        for f in 0..script.frames {
            for (class, w, h, human) in &classes {
                let whole = n.distractor_rate.floor() as usize;
                let count = whole + usize::from(rng.gen_bool(n.distractor_rate - whole as f64));
                for _ in 0..count {
                    let (dw, dh) = (w * rng.gen_range(0.7..1.3), h * rng.gen_range(0.7..1.3));
                    let b = BoundingBox::new(
                        rng.gen_range(dw / 2.0..script.width - dw / 2.0),
                        rng.gen_range(dh / 2.0..script.height - dh / 2.0),
                        dw,
                        dh,
                    );
                    let mut d = Detection::new(f, class.as_str(), rng.gen_range(-0.6..0.4), b);
                    if *human {
                        d.parts = (0..8).map(|_| (rng.gen_range(-0.3..0.3) * dh, rng.gen_range(-0.5..0.5) * dh)).collect();
                    } else {
                        d.hsv = Some(Hsv { h: rng.gen_range(0.0..360.0), s: rng.gen(), v: rng.gen() });
                    }
                    scene.push(d, usize::MAX);
                }
            }
        }
    }
    // Detector output is capped the same way real streams are.
    for frame in &mut scene.frames {
        for list in frame.values_mut() {
            crate::scene::cap_candidates(list, 12);
        }
    }
    Ok((scene, truth))
}

pub fn render_truth(truth: &GroundTruth) -> String {
    let mut out = format!("truth {}\n", truth.verb);
    for p in &truth.participants {
        let _ = writeln!(out, "role {} {}", p.role.name(), p.class);
    }
    for p in &truth.participants {
        for (f, b) in p.boxes.iter().enumerate() {
            let _ = writeln!(out, "box {} {f} {} {} {} {}", p.role.name(), b.cx, b.cy, b.w, b.h);
        }
    }
    out
}

pub fn parse_truth(input: &str) -> Result<GroundTruth> {
    let mut verb = None;
    let mut participants: Vec<TruthParticipant> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let ln = i + 1;
        let t: Vec<&str> = raw.split_whitespace().collect();
        let role = |s: &str| match s {
            "agent" => Ok(Role::Agent),
            "patient" => Ok(Role::Patient),
            _ => Err(Error::parse(ln, format!("unknown role {s:?}"))),
        };
        match t.as_slice() {
            [] => {}
            ["truth", v] => verb = Some(v.to_string()),
            ["role", r, class] => participants.push(TruthParticipant { role: role(r)?, class: class.to_string(), boxes: Vec::new() }),
            ["box", r, f, nums @ ..] if nums.len() == 4 => {
                let r = role(r)?;
                let f: usize = f.parse().map_err(|_| Error::parse(ln, "bad frame"))?;
                let v = nums
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::parse(ln, "bad number"))?;
                let p = participants.iter_mut().find(|p| p.role == r).ok_or_else(|| Error::parse(ln, "box for undeclared role"))?;
                if f != p.boxes.len() {
                    return Err(Error::parse(ln, "boxes must be listed frame by frame"));
                }
                p.boxes.push(BoundingBox::new(v[0], v[1], v[2], v[3]));
            }
            _ => return Err(Error::parse(ln, format!("unexpected line {raw:?}"))),
        }
    }
    let verb = verb.ok_or_else(|| Error::Structure("truth file has no `truth` line".into()))?;
    Ok(GroundTruth { verb, participants })
}
