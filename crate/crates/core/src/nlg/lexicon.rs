//! The closed vocabulary every generated sentence draws from.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Coordination,
    Verb,
    Noun,
    Adjective,
    Preposition,
    LexicalPp,
    Determiner,
    Particle,
    Pronoun,
    Adverb,
    Auxiliary,
}

pub const LEXICON: &[(Category, &[&str])] = &[
    (Category::Coordination, &["and"]),
    (Category::Verb, &crate::classifier::VERBS),
    (
        Category::Noun,
        &[
            "bag",
            "ball",
            "bench",
            "bicycle",
            "box",
            "cage",
            "car",
            "cart",
            "chair",
            "dog",
            "door",
            "ladder",
            "left",
            "mailbox",
            "microwave",
            "motorcycle",
            "object",
            "person",
            "right",
            "skateboard",
            "SUV",
            "table",
            "tripod",
            "truck",
        ],
    ),
    (
        Category::Adjective,
        &[
            "big",
            "black",
            "blue",
            "cardboard",
            "crouched",
            "green",
            "narrow",
            "other",
            "pink",
            "prone",
            "red",
            "short",
            "small",
            "tall",
            "teal",
            "toy",
            "upright",
            "white",
            "wide",
            "yellow",
        ],
    ),
    (Category::Preposition, &["above", "because", "below", "from", "of", "over", "to", "with"]),
    (Category::LexicalPp, &["downward", "leftward", "rightward", "upward"]),
    (Category::Determiner, &["an", "some", "that", "the"]),
    (Category::Particle, &["away", "down", "up"]),
    (Category::Pronoun, &["itself", "something", "themselves"]),
    (Category::Adverb, &["quickly", "slowly"]),
    (Category::Auxiliary, &["was"]),
];

pub fn words(cat: Category) -> &'static [&'static str] {
    LEXICON.iter().find(|(c, _)| *c == cat).map_or(&[], |(_, w)| w)
}

pub fn in_category(word: &str, cat: Category) -> bool {
    words(cat).contains(&word)
}

pub fn is_vocabulary(word: &str) -> bool {
    LEXICON.iter().any(|(_, ws)| ws.contains(&word))
}
