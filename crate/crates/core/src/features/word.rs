use std::sync::OnceLock;

use regex::Regex;

use crate::scalar::Scalar;

pub const WORD_FEATURE_DIM: usize = 10;

/// The 32 ASCII punctuation characters.
pub const PUNCTUATION: &str = r##"!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~"##;

/// Scheme-or-www prefix.
pub const URL_PATTERN: &str = r"(?i)^(https?://|www\.)\S*$";

fn url_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(URL_PATTERN).expect("static url pattern"))
}

/// Ten binary surface indicators for one token; at most one is set, the
/// first matching rule in this order:
///
/// 1. starts with `@`, longer than one character
/// 2. starts with `#`, longer than one character
/// 3. lowercases to `rt`
/// 4. URL
/// 5. digits only
/// 6. contains `$`
/// 7. is `:`
/// 8. is an ellipsis (`...` or `…`)
/// 9. a single punctuation character other than `:` and `$`
/// 10. all punctuation, longer than one character, not `...`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WordFeatureVector {
    bits: [bool; WORD_FEATURE_DIM],
}

impl WordFeatureVector {
    /// 1-based index of the set rule, if any.
    pub fn rule(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b).map(|i| i + 1)
    }

    pub fn bits(&self) -> [bool; WORD_FEATURE_DIM] {
        self.bits
    }

    pub fn to_vec<S: Scalar>(&self) -> Vec<S> {
        self.bits.iter().map(|&b| if b { S::one() } else { S::zero() }).collect()
    }

    pub fn write_into<S: Scalar>(&self, out: &mut Vec<S>) {
        out.extend(self.bits.iter().map(|&b| if b { S::one() } else { S::zero() }));
    }
}

fn is_punct(c: char) -> bool {
    PUNCTUATION.contains(c)
}

fn first_rule(x: &str) -> Option<usize> {
    let len = x.chars().count();
    let all_punct = len > 0 && x.chars().all(is_punct);
    if x.starts_with('@') && len > 1 {
        Some(1)
    } else if x.starts_with('#') && len > 1 {
        Some(2)
    } else if x.to_lowercase() == "rt" {
        Some(3)
    } else if url_regex().is_match(x) {
        Some(4)
    } else if len > 0 && x.chars().all(|c| c.is_ascii_digit()) {
        Some(5)
    } else if x.contains('$') {
        Some(6)
    } else if x == ":" {
        Some(7)
    } else if x == "..." || x == "\u{2026}" {
        Some(8)
    } else if all_punct && len == 1 {
        Some(9)
    } else if all_punct && len > 1 {
        Some(10)
    } else {
        None
    }
}

pub fn word_features(x: &str) -> WordFeatureVector {
    let mut v = WordFeatureVector::default();
    if let Some(r) = first_rule(x) {
        v.bits[r - 1] = true;
    }
    v
}

/// True when the first character is uppercase.
pub fn starts_with_capital(x: &str) -> bool {
    x.chars().next().is_some_and(char::is_uppercase)
}
