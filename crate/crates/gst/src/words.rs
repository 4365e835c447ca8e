//! Letters, alphabets and words.  Letters are dense `u8` indices into a
//! named alphabet; the word order used throughout is shortlex with the
//! fixed alphabet order.

use std::cmp::Ordering;

use thiserror::Error;

pub type Letter = u8;
pub type Word = Vec<Letter>;

#[derive(Debug, Error)]
pub enum WordError {
    #[error("cannot tokenize {0:?} over this alphabet")]
    BadToken(String),
    #[error("alphabet has duplicate letter {0:?}")]
    DuplicateLetter(String),
    #[error("alphabet too large ({0} letters)")]
    TooLarge(usize),
}

/// A finite ordered alphabet of named letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self, WordError> {
        if names.len() > u8::MAX as usize {
            return Err(WordError::TooLarge(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(WordError::DuplicateLetter(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn of_strs(names: &[&str]) -> Self {
        Alphabet::new(names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    /// The first `k` lowercase letters.
    pub fn latin(k: usize) -> Self {
        let names = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        Alphabet::new(names).unwrap()
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| i as Letter)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.names.len() as u8).map(|l| l as Letter)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.name(l)).collect()
    }

    /// Tokenizes a string into letters by greedy longest match.
    pub fn parse_word(&self, s: &str) -> Result<Word, WordError> {
        let mut word = Vec::new();
        let mut rest = s;
        'outer: while !rest.is_empty() {
            let mut best: Option<(usize, Letter)> = None;
            for (i, n) in self.names.iter().enumerate() {
                if rest.starts_with(n.as_str()) {
                    match best {
                        Some((len, _)) if len >= n.len() => {}
                        _ => best = Some((n.len(), i as Letter)),
                    }
                }
            }
            if let Some((len, l)) = best {
                word.push(l);
                rest = &rest[len..];
                continue 'outer;
            }
            return Err(WordError::BadToken(rest.to_string()));
        }
        Ok(word)
    }
}

/// Shortlex: by length, then lexicographically in the alphabet order.
pub fn shortlex(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// All non-empty words of length at most `bound`, in shortlex order.
pub fn words_up_to(alphabet_size: usize, bound: usize) -> impl Iterator<Item = Word> {
    let k = alphabet_size;
    (1..=bound).flat_map(move |len| WordsOfLen { k, word: None, len })
}

struct WordsOfLen {
    k: usize,
    word: Option<Word>,
    len: usize,
}

impl Iterator for WordsOfLen {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.k == 0 {
            return None;
        }
        match &mut self.word {
            None => {
                self.word = Some(vec![0; self.len]);
                self.word.clone()
            }
            Some(w) => {
                let mut i = self.len;
                loop {
                    if i == 0 {
                        return None;
                    }
                    i -= 1;
                    if (w[i] as usize) + 1 < self.k {
                        w[i] += 1;
                        for x in &mut w[i + 1..] {
                            *x = 0;
                        }
                        return Some(w.clone());
                    }
                }
            }
        }
    }
}

/// Number of non-empty words of length at most `bound`.
pub fn num_words_up_to(alphabet_size: usize, bound: usize) -> usize {
    let mut total = 0usize;
    let mut pow = 1usize;
    for _ in 0..bound {
        pow *= alphabet_size;
        total += pow;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_formats_round_trip() {
        let a = Alphabet::of_strs(&["Δ", "α₁", "α₂", "a", "b"]);
        for s in ["Δα₁α₂", "aΔb", "α₂α₂"] {
            let w = a.parse_word(s).unwrap();
            assert_eq!(a.format_word(&w), s);
        }
        assert!(a.parse_word("xyz").is_err());
    }

    #[test]
    fn greedy_match_prefers_long_names() {
        let a = Alphabet::of_strs(&["x", "x1"]);
        assert_eq!(a.parse_word("x1x").unwrap(), vec![1, 0]);
    }

    #[test]
    fn shortlex_enumeration_is_sorted() {
        let all: Vec<Word> = words_up_to(3, 3).collect();
        assert_eq!(all.len(), num_words_up_to(3, 3));
        for pair in all.windows(2) {
            assert_eq!(shortlex(&pair[0], &pair[1]), Ordering::Less);
        }
    }

    #[test]
    fn empty_alphabet_has_no_words() {
        assert_eq!(words_up_to(0, 4).count(), 0);
    }
}
