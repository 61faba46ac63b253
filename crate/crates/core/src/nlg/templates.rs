//! Verb-phrase templates, one per verb.
//!
//! A template is written as a word sequence where `X` and `Y` are the subject
//! and object noun phrases, `Adv` an adverb, `PPendo`/`PPexo` a motion adjunct
//! and brackets mark optional material.

use std::collections::BTreeMap;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Part {
    Subject,
    Object,
    Adverb,
    Endogenous,
    Exogenous,
    Word(&'static str),
    Optional(Vec<Part>),
}

impl Part {
    pub fn mentions_object(&self) -> bool {
        match self {
            Part::Object => true,
            Part::Optional(inner) => inner.iter().any(Part::mentions_object),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub verb: &'static str,
    pub parts: Vec<Part>,
}

impl Template {
    /// Whether the object appears outside any optional group.
    pub fn requires_object(&self) -> bool {
        self.parts.contains(&Part::Object)
    }

    pub fn has_adverb(&self) -> bool {
        self.walk().any(|p| *p == Part::Adverb)
    }

    pub fn has_adjunct(&self) -> bool {
        self.walk().any(|p| matches!(p, Part::Endogenous | Part::Exogenous))
    }

    fn walk(&self) -> impl Iterator<Item = &Part> {
        fn flat<'a>(parts: &'a [Part], out: &mut Vec<&'a Part>) {
            for p in parts {
                out.push(p);
                if let Part::Optional(inner) = p {
                    flat(inner, out);
                }
            }
        }
        let mut v = Vec::new();
        flat(&self.parts, &mut v);
        v.into_iter()
    }
}

const SOURCES: [&str; 48] = [
    "X [Adv] approached Y [PPexo]",
    "X arrived [Adv] [PPexo]",
    "X [Adv] attached an object to Y",
    "X bounced [Adv] [PPendo]",
    "X buried Y",
    "X [Adv] carried Y [PPendo]",
    "X caught Y [PPexo]",
    "X [Adv] chased Y [PPendo]",
    "X closed Y",
    "X [Adv] collided with Y [PPexo]",
    "X was digging [with Y]",
    "X dropped Y",
    "X [Adv] entered Y [PPendo]",
    "X [Adv] exchanged an object with Y",
    "X [Adv] exited Y [PPendo]",
    "X fell [Adv] [because of Y] [PPendo]",
    "X fled [Adv] [from Y] [PPendo]",
    "X flew [Adv] [PPendo]",
    "X [Adv] followed Y [PPendo]",
    "X gave an object to Y",
    "X got an object from Y",
    "X had Y",
    "X handed Y an object",
    "X [Adv] hauled Y [PPendo]",
    "X held Y",
    "X hit [something with] Y",
    "X jumped [Adv] [over Y] [PPendo]",
    "X [Adv] kicked Y [PPendo]",
    "X left [Adv] [PPendo]",
    "X [Adv] lifted Y",
    "X [Adv] moved Y [PPendo]",
    "X opened Y",
    "X [Adv] passed Y [PPexo]",
    "X picked Y up",
    "X [Adv] pushed Y [PPendo]",
    "X put Y down",
    "X raised Y",
    "X ran [Adv] [to Y] [PPendo]",
    "X received [an object from] Y",
    "X [Adv] replaced Y",
    "X [Adv] snatched an object from Y",
    "X [Adv] stopped [Y]",
    "X [Adv] threw Y [PPendo]",
    "X [Adv] took an object from Y",
    "X touched Y",
    "X turned [PPendo]",
    "X walked [Adv] [to Y] [PPendo]",
    "X went [Adv] away [PPendo]",
];

fn atom(tok: &'static str) -> Part {
    match tok {
        "X" => Part::Subject,
        "Y" => Part::Object,
        "Adv" => Part::Adverb,
        "PPendo" => Part::Endogenous,
        "PPexo" => Part::Exogenous,
        w => Part::Word(w),
    }
}

fn parse(src: &'static str) -> Template {
    let mut parts = Vec::new();
    let mut group: Option<Vec<Part>> = None;
    let mut verb = None;
    for raw in src.split_whitespace() {
        let open = raw.starts_with('[');
        let close = raw.ends_with(']');
        let tok = raw.trim_start_matches('[').trim_end_matches(']');
        let part = atom(tok);
        if verb.is_none() && matches!(part, Part::Word(w) if crate::classifier::VERBS.contains(&w)) {
            verb = Some(tok);
        }
        if open {
            group = Some(Vec::new());
        }
        match group.as_mut() {
            Some(g) => g.push(part),
            None => parts.push(part),
        }
        if close {
            parts.push(Part::Optional(group.take().expect("balanced brackets")));
        }
    }
    Template { verb: verb.expect("template names its verb"), parts }
}

pub fn templates() -> &'static BTreeMap<&'static str, Template> {
    static TABLE: OnceLock<BTreeMap<&'static str, Template>> = OnceLock::new();
    TABLE.get_or_init(|| SOURCES.iter().map(|s| parse(s)).map(|t| (t.verb, t)).collect())
}

pub fn template(verb: &str) -> Option<&'static Template> {
    templates().get(verb)
}
