//! Words over a finite ordered alphabet: lexicographic order, Lyndon words,
//! and the Chen-Fox-Lyndon factorization.
//!
//! Letters are dense indices `0..m`; display names ('a', 'b', ...) belong to
//! [`Alphabet`] and matter only for parsing and rendering. The order on words
//! is plain lexicographic order on index sequences, with a proper prefix
//! smaller than its extensions, which is exactly what `Ord` on `&[u8]` does.

use crate::{Error, Result};
use std::fmt;

const DEFAULT_NAMES: &str = "abcdefghijklmnopqrstuvwxyz";

/// Finite ordered alphabet with single-character display names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    /// Alphabet of the given size with default names a, b, c, ...
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > DEFAULT_NAMES.len() {
            return Err(Error::BadAlphabet(format!(
                "size must be in 1..={}, got {size}",
                DEFAULT_NAMES.len()
            )));
        }
        Ok(Alphabet {
            letters: DEFAULT_NAMES.chars().take(size).collect(),
        })
    }

    /// Alphabet from an explicit letter list such as `"xy"`. Order of the
    /// list is the order of the alphabet.
    pub fn from_letters(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.chars().collect();
        if letters.is_empty() || letters.len() > 255 {
            return Err(Error::BadAlphabet("need 1..=255 letters".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if !c.is_ascii_alphabetic() {
                return Err(Error::BadAlphabet(format!("letter {c:?} is not ASCII alphabetic")));
            }
            if letters[..i].contains(c) {
                return Err(Error::BadAlphabet(format!("duplicate letter {c:?}")));
            }
        }
        Ok(Alphabet { letters })
    }

    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn name(&self, letter: u8) -> char {
        self.letters[letter as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.letters.iter().position(|&l| l == c).map(|i| i as u8)
    }

    /// Parse a word literal like `"aab"`. The empty string is the empty word.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            match self.index_of(c) {
                Some(i) => letters.push(i),
                None => {
                    return Err(Error::Parse {
                        what: "word",
                        detail: format!("{c:?} is not a letter of the alphabet"),
                    })
                }
            }
        }
        Ok(Word(letters))
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.letters().iter().map(|&l| self.name(l)).collect()
    }

    /// All words of length `s` in lexicographic order (base-m counting).
    pub fn words_of_length(&self, s: usize) -> Vec<Word> {
        let m = self.size();
        let mut out = Vec::with_capacity(m.pow(s as u32));
        let mut cur = vec![0u8; s];
        loop {
            out.push(Word(cur.clone()));
            let mut i = s;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] as usize + 1 < m {
                    cur[i] += 1;
                    cur[i + 1..].fill(0);
                    break;
                }
            }
        }
    }
}

impl std::str::FromStr for Alphabet {
    type Err = Error;

    /// A decimal integer is a size, anything else a letter list.
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<usize>() {
            Ok(n) => Alphabet::new(n),
            Err(_) => Alphabet::from_letters(s),
        }
    }
}

/// Word over an indexed alphabet. Derived `Ord` is lexicographic with the
/// prefix rule, the order everything downstream assumes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Build from raw letter indices, checking them against the alphabet.
    pub fn new(letters: Vec<u8>, alphabet: &Alphabet) -> Result<Self> {
        if let Some(&l) = letters.iter().find(|&&l| l as usize >= alphabet.size()) {
            return Err(Error::Parse {
                what: "word",
                detail: format!("letter index {l} out of range for alphabet of size {}", alphabet.size()),
            });
        }
        Ok(Word(letters))
    }

    #[cfg(test)]
    pub(crate) fn from_raw(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn single(letter: u8) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn subword(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    /// Raw display as digit string; use [`Alphabet::render_word`] for names.
    pub fn indices_string(&self) -> String {
        self.0.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            let c = if (l as usize) < DEFAULT_NAMES.len() {
                DEFAULT_NAMES.as_bytes()[l as usize] as char
            } else {
                '?'
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Total lexicographic order on words; exposed for symmetry with the tests,
/// identical to `u.cmp(v)`.
pub fn compare_lex(u: &Word, v: &Word) -> std::cmp::Ordering {
    u.cmp(v)
}

/// A word is Lyndon when it is nonempty and strictly smaller than every one
/// of its proper nonempty suffixes.
pub fn is_lyndon(w: &Word) -> bool {
    if w.is_empty() {
        return false;
    }
    let s = w.letters();
    (1..s.len()).all(|i| s < &s[i..])
}

/// All Lyndon words of length exactly `s`, in lexicographic order, by
/// Duval's successor algorithm (visit every Lyndon word of length <= s,
/// keep the ones of full length).
pub fn lyndon_words(alphabet: &Alphabet, s: usize) -> Vec<Word> {
    assert!(s >= 1, "degree must be positive");
    let m = alphabet.size() as u8;
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == s {
            out.push(Word(w.clone()));
        }
        // extend periodically to length s, then increment the last
        // non-maximal letter
        let period = w.len();
        for i in period..s {
            let c = w[i % period];
            w.push(c);
        }
        while w.last() == Some(&(m - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => return out,
        }
    }
}

/// Chen-Fox-Lyndon factorization `w = u_1^{i_1} ... u_k^{i_k}` with the
/// `u_j` Lyndon and strictly decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CflFactorization {
    pub factors: Vec<(Word, u32)>,
}

impl CflFactorization {
    /// Concatenate the factors back; equals the input word by construction.
    pub fn reconstruct(&self) -> Word {
        let mut letters = Vec::new();
        for (u, i) in &self.factors {
            for _ in 0..*i {
                letters.extend_from_slice(u.letters());
            }
        }
        Word(letters)
    }

    pub fn multiplicity_factorial_product(&self) -> num_bigint::BigInt {
        let mut acc = num_bigint::BigInt::from(1);
        for (_, i) in &self.factors {
            acc *= crate::arith::factorial(*i as u64);
        }
        acc
    }
}

/// Duval's factorization algorithm, grouping equal adjacent factors.
pub fn cfl_factorize(w: &Word) -> Result<CflFactorization> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let s = w.letters();
    let n = s.len();
    let mut flat: Vec<Word> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        let period = j - k;
        while i <= k {
            flat.push(Word(s[i..i + period].to_vec()));
            i += period;
        }
    }
    let mut factors: Vec<(Word, u32)> = Vec::new();
    for u in flat {
        match factors.last_mut() {
            Some((prev, count)) if *prev == u => *count += 1,
            _ => factors.push((u, 1)),
        }
    }
    Ok(CflFactorization { factors })
}
