//! A recognizer for the sentences the generator can produce, built from the
//! same template and vocabulary tables. Used to check generator output.

use super::lexicon::{in_category, is_vocabulary, Category};
use super::templates::{templates, Part};

const MAX_NP_DEPTH: usize = 3;

fn adjective_rank(word: &str) -> Option<u8> {
    Some(match word {
        "other" => 0,
        "big" | "small" => 1,
        "tall" | "short" | "narrow" | "wide" => 2,
        "black" | "white" | "red" | "yellow" | "green" | "teal" | "blue" | "pink" => 3,
        "cardboard" | "toy" | "upright" | "crouched" | "prone" => 4,
        _ => return None,
    })
}

/// End positions of every way to read a noun phrase starting at `pos`.
fn noun_phrase(toks: &[&str], pos: usize, depth: usize) -> Vec<usize> {
    let mut ends = Vec::new();
    let Some(&first) = toks.get(pos) else { return ends };
    if matches!(first, "themselves" | "itself" | "something") {
        ends.push(pos + 1);
        return ends;
    }
    if !matches!(first, "the" | "that" | "some") {
        return ends;
    }
    let mut i = pos + 1;
    let mut last_rank = None;
    while let Some(rank) = toks.get(i).and_then(|w| adjective_rank(w)) {
        if last_rank.is_some_and(|r| rank <= r) {
            return ends;
        }
        last_rank = Some(rank);
        i += 1;
    }
    if !toks.get(i).is_some_and(|w| in_category(w, Category::Noun)) {
        return ends;
    }
    i += 1;
    ends.push(i);
    if depth < MAX_NP_DEPTH {
        for rel in [&["to", "the", "left", "of"][..], &["to", "the", "right", "of"], &["above"], &["below"]] {
            if toks[i..].starts_with(rel) {
                ends.extend(noun_phrase(toks, i + rel.len(), depth + 1));
            }
        }
    }
    ends
}

fn part(p: &Part, toks: &[&str], pos: usize) -> Vec<usize> {
    match p {
        Part::Subject | Part::Object => noun_phrase(toks, pos, 0),
        Part::Adverb => toks.get(pos).filter(|w| in_category(w, Category::Adverb)).map(|_| vec![pos + 1]).unwrap_or_default(),
        Part::Endogenous => toks.get(pos).filter(|w| in_category(w, Category::LexicalPp)).map(|_| vec![pos + 1]).unwrap_or_default(),
        Part::Exogenous => {
            let mut ends = Vec::new();
            for alt in [&["from", "the", "left"][..], &["from", "the", "right"], &["from", "above"], &["from", "below"]] {
                if toks[pos.min(toks.len())..].starts_with(alt) {
                    ends.push(pos + alt.len());
                }
            }
            ends
        }
        Part::Word(w) => (toks.get(pos) == Some(w)).then_some(pos + 1).into_iter().collect(),
        Part::Optional(inner) => {
            let mut ends = vec![pos];
            ends.extend(sequence(inner, toks, pos));
            ends
        }
    }
}

fn sequence(parts: &[Part], toks: &[&str], pos: usize) -> Vec<usize> {
    let mut frontier = vec![pos];
    for p in parts {
        let mut next: Vec<usize> = frontier.iter().flat_map(|&s| part(p, toks, s)).collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            return next;
        }
        frontier = next;
    }
    frontier
}

/// Splits a generated sentence into words, undoing the capital and period.
pub fn tokenize(sentence: &str) -> Option<Vec<String>> {
    let body = sentence.strip_suffix('.')?;
    let mut toks: Vec<String> = body.split(' ').map(String::from).collect();
    let first = toks.first_mut()?;
    let mut chars = first.chars();
    let head = chars.next()?;
    if !head.is_uppercase() {
        return None;
    }
    if *first != "SUV" {
        *first = head.to_lowercase().chain(chars).collect();
    }
    Some(toks)
}

/// Verbs whose template accepts the sentence.
pub fn parse_sentence(sentence: &str) -> Vec<&'static str> {
    let Some(toks) = tokenize(sentence) else { return Vec::new() };
    let toks: Vec<&str> = toks.iter().map(String::as_str).collect();
    templates().values().filter(|t| sequence(&t.parts, &toks, 0).contains(&toks.len())).map(|t| t.verb).collect()
}

/// Whether every word is in the vocabulary.
pub fn within_vocabulary(sentence: &str) -> bool {
    tokenize(sentence).is_some_and(|t| t.iter().all(|w| is_vocabulary(w)))
}
