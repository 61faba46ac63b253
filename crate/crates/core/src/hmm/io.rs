//! Text model files. Floats are written with the shortest representation
//! that parses back to the same bits.

use std::fmt::Write as _;

use super::{Hmm, OutputDist};
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureSpec};

const VERSION: &str = "1";

pub fn render_hmm(hmm: &Hmm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "hmm {VERSION}");
    let _ = writeln!(out, "states {}", hmm.n_states());
    for f in &hmm.schema {
        match f.kind {
            FeatureKind::Linear => {
                let _ = writeln!(out, "feature {} linear", f.name);
            }
            FeatureKind::Angular => {
                let _ = writeln!(out, "feature {} angular", f.name);
            }
            FeatureKind::Discrete { cardinality } => {
                let _ = writeln!(out, "feature {} discrete {cardinality}", f.name);
            }
        }
    }
    let _ = writeln!(out, "initial{}", floats(&hmm.initial));
    for (i, row) in hmm.transitions.iter().enumerate() {
        let _ = writeln!(out, "transition {i}{}", floats(row));
    }
    for (s, outs) in hmm.outputs.iter().enumerate() {
        for (f, o) in outs.iter().enumerate() {
            let _ = match o {
                OutputDist::Gaussian { mean, var } => writeln!(out, "output {s} {f} gaussian {mean:?} {var:?}"),
                OutputDist::VonMises { mu, kappa } => writeln!(out, "output {s} {f} vonmises {mu:?} {kappa:?}"),
                OutputDist::Categorical(p) => writeln!(out, "output {s} {f} categorical{}", floats(p)),
            };
        }
    }
    out
}

fn floats(xs: &[f64]) -> String {
    xs.iter().map(|x| format!(" {x:?}")).collect()
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad number {tok:?}")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(line, format!("bad integer {tok:?}")))
}

pub fn parse_hmm(input: &str) -> Result<Hmm> {
    let mut n_states = None;
    let mut schema = Vec::new();
    let mut initial = None;
    let mut transitions: Vec<Option<Vec<f64>>> = Vec::new();
    let mut outputs: Vec<Vec<Option<OutputDist>>> = Vec::new();
    let mut seen_header = false;

    for (idx, raw) in input.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !seen_header {
            if toks != ["hmm", VERSION] {
                return Err(Error::parse(ln, "expected `hmm 1` header"));
            }
            seen_header = true;
            continue;
        }
        match toks[0] {
            "states" if toks.len() == 2 => {
                let n = parse_usize(toks[1], ln)?;
                if n == 0 {
                    return Err(Error::parse(ln, "zero states"));
                }
                n_states = Some(n);
                transitions = vec![None; n];
            }
            "feature" => {
                let kind = match toks.get(2..) {
                    Some(["linear"]) => FeatureKind::Linear,
                    Some(["angular"]) => FeatureKind::Angular,
                    Some(["discrete", c]) => FeatureKind::Discrete { cardinality: parse_usize(c, ln)? },
                    _ => return Err(Error::parse(ln, "bad feature line")),
                };
                schema.push(FeatureSpec { name: toks[1].to_string(), kind });
            }
            "initial" => {
                initial = Some(toks[1..].iter().map(|t| parse_f64(t, ln)).collect::<Result<Vec<_>>>()?);
            }
            "transition" if toks.len() >= 2 => {
                let i = parse_usize(toks[1], ln)?;
                let row = toks[2..].iter().map(|t| parse_f64(t, ln)).collect::<Result<Vec<_>>>()?;
                let slot = transitions.get_mut(i).ok_or_else(|| Error::parse(ln, "transition row out of range"))?;
                *slot = Some(row);
            }
            "output" if toks.len() >= 4 => {
                let n = n_states.ok_or_else(|| Error::parse(ln, "output before states"))?;
                if outputs.is_empty() {
                    outputs = vec![vec![None; schema.len()]; n];
                }
                let s = parse_usize(toks[1], ln)?;
                let f = parse_usize(toks[2], ln)?;
                let nums = toks[4..].iter().map(|t| parse_f64(t, ln)).collect::<Result<Vec<_>>>()?;
                let dist = match (toks[3], nums.as_slice()) {
                    ("gaussian", [mean, var]) => OutputDist::Gaussian { mean: *mean, var: *var },
                    ("vonmises", [mu, kappa]) => OutputDist::VonMises { mu: *mu, kappa: *kappa },
                    ("categorical", p) if !p.is_empty() => OutputDist::Categorical(p.to_vec()),
                    _ => return Err(Error::parse(ln, "bad output line")),
                };
                let slot = outputs.get_mut(s).and_then(|o| o.get_mut(f)).ok_or_else(|| Error::parse(ln, "output index out of range"))?;
                *slot = Some(dist);
            }
            _ => return Err(Error::parse(ln, format!("unexpected line {line:?}"))),
        }
    }

    let missing = |what: &str| Error::Structure(format!("model file is missing {what}"));
    let n = n_states.ok_or_else(|| missing("states"))?;
    let initial = initial.ok_or_else(|| missing("initial"))?;
    let transitions = transitions.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| missing("a transition row"))?;
    if outputs.is_empty() {
        outputs = vec![vec![None; schema.len()]; n];
    }
    let outputs = outputs
        .into_iter()
        .map(|o| o.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("an output distribution"))?;
    let hmm = Hmm { schema, initial, transitions, outputs };
    hmm.validate()?;
    Ok(hmm)
}
