//! Shallow noun-phrase approximation.
//!
//! ```text
//! short  = det* adj* noun+ adj*
//! phrase = short | short prep phrase
//! ```
//!
//! Personal pronouns fill the noun slot. The four token classes are disjoint,
//! so greedy consumption of each segment yields the longest match.

use super::tagset::{is_adjective, is_determiner, is_noun, is_preposition};
use super::{Span, Token};

fn skip_while(tokens: &[Token], mut i: usize, pred: fn(&str) -> bool) -> usize {
    while i < tokens.len() && pred(&tokens[i].pos) {
        i += 1;
    }
    i
}

fn match_short(tokens: &[Token], start: usize) -> Option<usize> {
    let i = skip_while(tokens, start, is_determiner);
    let i = skip_while(tokens, i, is_adjective);
    let after_nouns = skip_while(tokens, i, is_noun);
    if after_nouns == i {
        return None;
    }
    Some(skip_while(tokens, after_nouns, is_adjective))
}

/// Longest approximate noun phrase beginning at `start`, if any.
pub fn match_np_approx(tokens: &[Token], start: usize) -> Option<Span> {
    if start >= tokens.len() {
        return None;
    }
    let mut end = match_short(tokens, start)?;
    while end < tokens.len() && is_preposition(&tokens[end].pos) {
        match match_short(tokens, end + 1) {
            Some(next) => end = next,
            None => break,
        }
    }
    Some(Span::new(start, end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(spec: &[(&str, &str)]) -> Vec<Token> {
        spec.iter().map(|(s, p)| Token::new(s, p, &s.to_lowercase())).collect()
    }

    #[test]
    fn bare_noun() {
        assert_eq!(match_np_approx(&toks(&[("car", "NN")]), 0), Some(Span::new(0, 1)));
    }

    #[test]
    fn determiner_adjectives_noun() {
        let t = toks(&[("the", "DT"), ("big", "JJ"), ("red", "JJ"), ("car", "NN")]);
        assert_eq!(match_np_approx(&t, 0), Some(Span::new(0, 4)));
        assert_eq!(match_np_approx(&t, 1), Some(Span::new(1, 4)));
    }

    #[test]
    fn prepositional_chain() {
        let t = toks(&[("the", "DT"), ("car", "NN"), ("of", "IN"), ("the", "DT"), ("boss", "NN")]);
        assert_eq!(match_np_approx(&t, 0), Some(Span::new(0, 5)));
    }

    #[test]
    fn dangling_preposition_is_not_consumed() {
        let t = toks(&[("the", "DT"), ("car", "NN"), ("of", "IN"), ("quickly", "RB")]);
        assert_eq!(match_np_approx(&t, 0), Some(Span::new(0, 2)));
    }

    #[test]
    fn pronoun_fills_noun_slot() {
        let t = toks(&[("her", "PRP"), ("jump", "VB")]);
        assert_eq!(match_np_approx(&t, 0), Some(Span::new(0, 1)));
    }

    #[test]
    fn no_noun_no_match() {
        let t = toks(&[("the", "DT"), ("big", "JJ"), ("ran", "VBD")]);
        assert_eq!(match_np_approx(&t, 0), None);
        assert_eq!(match_np_approx(&t, 3), None);
    }
}
