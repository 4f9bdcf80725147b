//! Integer word polynomials: the free Z-module on words with concatenation,
//! shuffle, and infiltration products, plus Radford's triangular basis.
//!
//! Coefficients are exact `BigInt`s. Terms live in a `BTreeMap` keyed by the
//! lexicographic word order, so iteration, rendering, and JSON output are
//! deterministic. Zero coefficients are never stored.

use crate::words::{cfl_factorize, Alphabet, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WordPoly {
    terms: BTreeMap<Word, BigInt>,
}

impl WordPoly {
    pub fn zero() -> Self {
        WordPoly::default()
    }

    /// The unit of both products: the empty word with coefficient one.
    pub fn one() -> Self {
        WordPoly::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, BigInt::one());
        WordPoly { terms }
    }

    pub fn from_terms<I>(iter: I) -> Self
    where
        I: IntoIterator<Item = (Word, BigInt)>,
    {
        let mut poly = WordPoly::zero();
        for (w, c) in iter {
            poly.add_term(w, c);
        }
        poly
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &WordPoly) -> WordPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> WordPoly {
        if k.is_zero() {
            return WordPoly::zero();
        }
        WordPoly {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    /// Sum of all coefficients (the counit composed with augmentation).
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Degree of a homogeneous polynomial, None when lengths are mixed.
    /// The zero polynomial is homogeneous in every degree; reported as 0.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(w) => w.len(),
            None => return Some(0),
        };
        it.all(|w| w.len() == first).then_some(first)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Concatenation product, extended bilinearly.
    pub fn concat_mul(&self, other: &WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                out.add_term(u.concat(v), cu * cv);
            }
        }
        out
    }

    /// Shuffle product, extended bilinearly.
    pub fn shuffle(&self, other: &WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let c = cu * cv;
                for (w, k) in shuffle_words(u, v).terms {
                    out.add_term(w, k * &c);
                }
            }
        }
        out
    }

    /// i-fold shuffle power; the 0th power is the unit.
    pub fn shuffle_power(&self, i: u32) -> WordPoly {
        let mut acc = WordPoly::one();
        for _ in 0..i {
            acc = acc.shuffle(self);
        }
        acc
    }

    /// Divide every coefficient by d, which must divide each exactly.
    pub fn exact_div(&self, d: &BigInt) -> WordPoly {
        assert!(!d.is_zero(), "division by zero");
        WordPoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let (q, r) = c.div_rem(d);
                    assert!(r.is_zero(), "coefficient {c} not divisible by {d}");
                    (w.clone(), q)
                })
                .collect(),
        }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            if w.is_empty() {
                let _ = write!(out, "{mag}");
            } else if mag.is_one() {
                out.push_str(&alphabet.render_word(w));
            } else {
                let _ = write!(out, "{mag}*{}", alphabet.render_word(w));
            }
        }
        out
    }

    /// Parse the same syntax `render` emits, e.g. `"2*aab + aba - 1"`.
    pub fn parse(input: &str, alphabet: &Alphabet) -> Result<WordPoly> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse {
                what: "polynomial",
                detail: "empty input".into(),
            });
        }
        let mut out = WordPoly::zero();
        let mut rest = compact.as_str();
        let mut sign = BigInt::one();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let split = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(split);
            let (word, coeff) = parse_term(term, alphabet)?;
            out.add_term(word, sign * coeff);
            if tail.is_empty() {
                return Ok(out);
            }
            sign = if tail.starts_with('-') { -BigInt::one() } else { BigInt::one() };
            rest = &tail[1..];
        }
    }

    /// JSON as a list of {"word", "coeff"} pairs in lexicographic word
    /// order. Coefficients are decimal strings so arbitrary magnitudes
    /// survive any JSON parser.
    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| {
                    serde_json::json!({
                        "word": alphabet.render_word(w),
                        "coeff": c.to_string(),
                    })
                })
                .collect(),
        )
    }
}

fn parse_term(term: &str, alphabet: &Alphabet) -> Result<(Word, BigInt)> {
    let bad = |detail: String| Error::Parse {
        what: "polynomial",
        detail,
    };
    if term.is_empty() {
        return Err(bad("empty term".into()));
    }
    if let Some((coeff, word)) = term.split_once('*') {
        let c: BigInt = coeff
            .parse()
            .map_err(|_| bad(format!("bad coefficient {coeff:?}")))?;
        return Ok((alphabet.parse_word(word)?, c));
    }
    if term.chars().all(|c| c.is_ascii_digit()) {
        let c: BigInt = term.parse().map_err(|_| bad(format!("bad integer {term:?}")))?;
        return Ok((Word::empty(), c));
    }
    Ok((alphabet.parse_word(term)?, BigInt::one()))
}

/// Shuffle of two words by dynamic programming over riffle merges: the cell
/// (i, j) holds the shuffle of the suffixes u[i..] and v[j..]. Output size
/// is at most C(|u|+|v|, |u|) terms; no permutations are enumerated.
pub fn shuffle_words(u: &Word, v: &Word) -> WordPoly {
    let (us, vs) = (u.letters(), v.letters());
    let (r, t) = (us.len(), vs.len());
    // grid[i][j], filled from the high ends downward
    let mut grid: Vec<Vec<Option<WordPoly>>> = vec![vec![None; t + 1]; r + 1];
    grid[r][t] = Some(WordPoly::one());
    for i in (0..=r).rev() {
        for j in (0..=t).rev() {
            if i == r && j == t {
                continue;
            }
            let mut cell = WordPoly::zero();
            if i < r {
                for (w, c) in grid[i + 1][j].as_ref().unwrap().terms() {
                    cell.add_term(Word::single(us[i]).concat(w), c.clone());
                }
            }
            if j < t {
                for (w, c) in grid[i][j + 1].as_ref().unwrap().terms() {
                    cell.add_term(Word::single(vs[j]).concat(w), c.clone());
                }
            }
            grid[i][j] = Some(cell);
        }
    }
    grid[0][0].take().unwrap()
}

/// Infiltration product of two words. Same merge recursion as the shuffle
/// plus a diagonal step that fuses equal letters:
///
/// ```text
/// (x u) down (y v) = x (u down (y v)) + y ((x u) down v) + [x = y] x (u down v)
/// ```
///
/// Its top-degree part (length |u| + |v|) is exactly the shuffle product;
/// the lower terms are what make coefficient functionals multiplicative,
/// see `magnus::check_shuffle_relation`.
pub fn infiltration_words(u: &Word, v: &Word) -> WordPoly {
    let (us, vs) = (u.letters(), v.letters());
    let (r, t) = (us.len(), vs.len());
    let mut grid: Vec<Vec<Option<WordPoly>>> = vec![vec![None; t + 1]; r + 1];
    grid[r][t] = Some(WordPoly::one());
    for i in (0..=r).rev() {
        for j in (0..=t).rev() {
            if i == r && j == t {
                continue;
            }
            let mut cell = WordPoly::zero();
            if i < r {
                for (w, c) in grid[i + 1][j].as_ref().unwrap().terms() {
                    cell.add_term(Word::single(us[i]).concat(w), c.clone());
                }
            }
            if j < t {
                for (w, c) in grid[i][j + 1].as_ref().unwrap().terms() {
                    cell.add_term(Word::single(vs[j]).concat(w), c.clone());
                }
            }
            if i < r && j < t && us[i] == vs[j] {
                for (w, c) in grid[i + 1][j + 1].as_ref().unwrap().terms() {
                    cell.add_term(Word::single(us[i]).concat(w), c.clone());
                }
            }
            grid[i][j] = Some(cell);
        }
    }
    grid[0][0].take().unwrap()
}

/// Infiltration product extended bilinearly.
pub fn infiltration(f: &WordPoly, g: &WordPoly) -> WordPoly {
    let mut out = WordPoly::zero();
    for (u, cu) in f.terms() {
        for (v, cv) in g.terms() {
            let c = cu * cv;
            for (w, k) in infiltration_words(u, v).terms {
                out.add_term(w, k * &c);
            }
        }
    }
    out
}

/// Radford polynomial of a word: factor w = u_1^{i_1} ... u_k^{i_k} into
/// its decreasing Lyndon factorization and form
///
/// ```text
/// Q_w = (u_1 shuffled i_1 times) ... (u_k shuffled i_k times) / (i_1! ... i_k!)
/// ```
///
/// computed in integers by clearing the factorial denominator; the division
/// is exact, and Q_w = w + (lexicographically smaller words of the same
/// length, nonnegative coefficients). For Lyndon w this is w itself.
pub fn radford_q(w: &Word) -> Result<WordPoly> {
    let fact = cfl_factorize(w)?;
    let mut acc = WordPoly::one();
    for (u, i) in &fact.factors {
        acc = acc.shuffle(&WordPoly::from_word(u.clone()).shuffle_power(*i));
    }
    Ok(acc.exact_div(&fact.multiplicity_factorial_product()))
}
