//! Penn Treebank tagset and the coarse tag classes used by the pattern grammar.

/// Name written to (and required in) corpus file headers.
pub const PENN_TREEBANK: &str = "penn-treebank";

const PENN_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP",
    "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD",
    "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "#", "$", "''", "``", "(", ")", ",",
    ".", ":", "-LRB-", "-RRB-", "-NONE-",
];

/// A declared tagset. Only the Penn Treebank tagset is supported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tagset {
    name: String,
}

impl Tagset {
    pub fn penn() -> Self {
        Tagset {
            name: PENN_TREEBANK.to_string(),
        }
    }

    /// Looks up a tagset by its header name.
    pub fn by_name(name: &str) -> Option<Self> {
        (name == PENN_TREEBANK).then(Self::penn)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, tag: &str) -> bool {
        PENN_TAGS.contains(&tag)
    }
}

impl Default for Tagset {
    fn default() -> Self {
        Self::penn()
    }
}

pub fn is_verb(tag: &str) -> bool {
    tag.starts_with('V')
}

pub fn is_modal(tag: &str) -> bool {
    tag == "MD"
}

pub fn is_adverb(tag: &str) -> bool {
    matches!(tag, "RB" | "RBR" | "RBS")
}

/// Nouns plus personal pronouns, which fill noun slots.
pub fn is_noun(tag: &str) -> bool {
    tag.starts_with('N') || tag == "PRP"
}

pub fn is_adjective(tag: &str) -> bool {
    tag.starts_with('J')
}

pub fn is_determiner(tag: &str) -> bool {
    matches!(tag, "DT" | "PDT" | "PRP$")
}

pub fn is_preposition(tag: &str) -> bool {
    tag == "IN"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penn_membership() {
        let t = Tagset::penn();
        for tag in ["NN", "VBZ", "PRP$", "``", "-LRB-", "MD"] {
            assert!(t.contains(tag), "{tag}");
        }
        for tag in ["NOUN", "vb", "", "XX"] {
            assert!(!t.contains(tag), "{tag}");
        }
        assert!(Tagset::by_name("universal").is_none());
    }

    #[test]
    fn coarse_classes() {
        assert!(is_verb("VBG") && !is_verb("MD"));
        assert!(is_noun("NNPS") && is_noun("PRP") && !is_noun("PRP$"));
        assert!(is_determiner("PRP$"));
        assert!(is_adjective("JJR"));
        assert!(is_adverb("RBS") && !is_adverb("RP"));
    }
}
