//! Truncated Magnus expansion: evaluate free-group words in the power
//! series ring (Z/q)<<X>> by sending each generator x to 1 + x, read off
//! coefficients, and assemble unitriangular matrix representations from
//! them.
//!
//! The expansion of a single word is multiplicative by construction, and
//! the coefficient of a word w in a product splits over the ways to cut w
//! in two. That splitting is what makes `rho_w` a homomorphism into
//! U_s(Z/p^(n-s+1)).
//!
//! Products of two coefficients of the same expansion expand over the
//! infiltration product (`poly::infiltration_words`), not the shuffle: the
//! shuffle form only sees the top-degree part and already fails at
//! u = v = x against sigma = xx, where eps_x = 2 and eps_xx = 1 give
//! 4 on the left but 2 on the right. `check_shuffle_relation` carries the
//! corrected identity; the failing form is kept as
//! `naive_shuffle_identity_holds` for the calibration records.

use crate::poly::infiltration_words;
use crate::unipotent::{Modulus, UniMatrix};
use crate::words::{Alphabet, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Element of a free group: a sequence of signed generators, not
/// necessarily freely reduced.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupWord {
    syllables: Vec<(u8, bool)>, // (letter, inverted)
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn new(syllables: Vec<(u8, bool)>, alphabet: &Alphabet) -> Result<Self> {
        if let Some(&(l, _)) = syllables.iter().find(|&&(l, _)| l as usize >= alphabet.size()) {
            return Err(Error::Parse {
                what: "group word",
                detail: format!("letter index {l} out of range"),
            });
        }
        Ok(GroupWord { syllables })
    }

    pub fn syllables(&self) -> &[(u8, bool)] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut syllables = self.syllables.clone();
        syllables.extend_from_slice(&other.syllables);
        GroupWord { syllables }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|&(l, inv)| (l, !inv))
                .collect(),
        }
    }

    /// Parse literals like `"xy^-1x"` (also `x'` for an inverse). `""` and
    /// `"1"` denote the identity.
    pub fn parse(input: &str, alphabet: &Alphabet) -> Result<GroupWord> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "1" {
            return Ok(GroupWord::identity());
        }
        let mut syllables = Vec::new();
        let mut chars = compact.chars().peekable();
        while let Some(c) = chars.next() {
            let letter = alphabet.index_of(c).ok_or_else(|| Error::Parse {
                what: "group word",
                detail: format!("{c:?} is not a letter of the alphabet"),
            })?;
            let inverted = match chars.peek() {
                Some('\'') => {
                    chars.next();
                    true
                }
                Some('^') => {
                    chars.next();
                    let suffix: String = chars.by_ref().take(2).collect();
                    if suffix != "-1" {
                        return Err(Error::Parse {
                            what: "group word",
                            detail: format!("expected ^-1, found ^{suffix}"),
                        });
                    }
                    true
                }
                _ => false,
            };
            syllables.push((letter, inverted));
        }
        Ok(GroupWord { syllables })
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.syllables.is_empty() {
            return "1".into();
        }
        self.syllables
            .iter()
            .map(|&(l, inv)| {
                let name = alphabet.name(l);
                if inv {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            })
            .collect()
    }

    /// Uniform syllable count in 0..=max_syllables, uniform letter and sign.
    pub fn random<R: Rng>(rng: &mut R, alphabet_size: usize, max_syllables: usize) -> GroupWord {
        let len = rng.gen_range(0..=max_syllables);
        GroupWord {
            syllables: (0..len)
                .map(|_| (rng.gen_range(0..alphabet_size) as u8, rng.gen_bool(0.5)))
                .collect(),
        }
    }
}

/// Power series over Z/q truncated beyond a total degree, with coefficients
/// indexed by words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    modulus: Modulus,
    degree: usize,
    coeffs: BTreeMap<Word, u64>,
}

impl TruncSeries {
    pub fn zero(modulus: Modulus, degree: usize) -> Self {
        TruncSeries {
            modulus,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(modulus: Modulus, degree: usize) -> Self {
        let mut s = TruncSeries::zero(modulus, degree);
        s.add_term(Word::empty(), 1);
        s
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, w: &Word) -> u64 {
        self.coeffs.get(w).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.coeffs.iter().map(|(w, &c)| (w, c))
    }

    pub fn add_term(&mut self, w: Word, c: u64) {
        if w.len() > self.degree {
            return;
        }
        let c = c % self.modulus.q;
        if c == 0 && !self.coeffs.contains_key(&w) {
            return;
        }
        let entry = self.coeffs.entry(w).or_insert(0);
        *entry = (*entry + c) % self.modulus.q;
        if *entry == 0 {
            let zeroed: Vec<Word> = self
                .coeffs
                .iter()
                .filter(|(_, &v)| v == 0)
                .map(|(w, _)| w.clone())
                .collect();
            for w in zeroed {
                self.coeffs.remove(&w);
            }
        }
    }

    fn assert_compatible(&self, other: &TruncSeries) {
        assert!(
            self.modulus == other.modulus && self.degree == other.degree,
            "series disagree in modulus or truncation degree"
        );
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    /// Concatenation product, truncated past the degree bound.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        self.assert_compatible(other);
        let mut out = TruncSeries::zero(self.modulus, self.degree);
        for (u, cu) in self.terms() {
            for (v, cv) in other.terms() {
                if u.len() + v.len() <= self.degree {
                    out.add_term(u.concat(v), self.modulus.mul(cu, cv));
                }
            }
        }
        out
    }

    pub fn scale(&self, k: u64) -> TruncSeries {
        let mut out = TruncSeries::zero(self.modulus, self.degree);
        for (w, c) in self.terms() {
            out.add_term(w.clone(), self.modulus.mul(c, k));
        }
        out
    }

    /// Inverse via the Neumann series of the augmentation part; the
    /// constant term must be a unit mod q.
    pub fn inv(&self) -> Result<TruncSeries> {
        let c0 = self.coefficient(&Word::empty());
        let c0_inv = crate::arith::mod_inverse(c0, self.modulus.q)
            .ok_or(Error::NotUnit(c0, self.modulus.q))?;
        // u = 1 - c0^{-1} f has no constant term, so its powers gain degree
        let mut u = self.scale(c0_inv);
        let one = TruncSeries::one(self.modulus, self.degree);
        u = one.add(&u.scale(self.modulus.q - 1));
        let mut acc = one.clone();
        let mut u_pow = one;
        for _ in 1..=self.degree {
            u_pow = u_pow.mul(&u);
            if u_pow.coeffs.is_empty() {
                break;
            }
            acc = acc.add(&u_pow);
        }
        Ok(acc.scale(c0_inv))
    }

    /// Functorial reduction to a divisor modulus.
    pub fn reduce_to(&self, target: Modulus) -> Result<TruncSeries> {
        if self.modulus.q % target.q != 0 {
            return Err(Error::BadParameter(format!(
                "{} does not divide {}; reduction is not defined",
                target.q, self.modulus.q
            )));
        }
        let mut out = TruncSeries::zero(target, self.degree);
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c % target.q);
        }
        Ok(out)
    }

    /// Terms in graded order: by length, lexicographic within a length.
    fn graded_terms(&self) -> Vec<(&Word, u64)> {
        let mut terms: Vec<(&Word, u64)> = self.terms().collect();
        terms.sort_by_key(|(w, _)| w.len());
        terms
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (w, c) in self.graded_terms() {
            if w.is_empty() {
                parts.push(c.to_string());
            } else if c == 1 {
                parts.push(alphabet.render_word(w));
            } else {
                parts.push(format!("{c}*{}", alphabet.render_word(w)));
            }
        }
        parts.join(" + ")
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        serde_json::Value::Array(
            self.graded_terms()
                .into_iter()
                .map(|(w, c)| {
                    serde_json::json!({
                        "word": alphabet.render_word(w),
                        "coeff": c,
                    })
                })
                .collect(),
        )
    }
}

fn letter_factor(letter: u8, inverted: bool, modulus: Modulus, degree: usize) -> TruncSeries {
    let mut f = TruncSeries::zero(modulus, degree);
    if inverted {
        // (1 + x)^{-1} = 1 - x + x^2 - ...
        let mut w = Word::empty();
        for i in 0..=degree {
            let c = if i % 2 == 0 { 1 } else { modulus.q - 1 };
            f.add_term(w.clone(), c);
            w = w.concat(&Word::single(letter));
        }
    } else {
        f.add_term(Word::empty(), 1);
        f.add_term(Word::single(letter), 1);
    }
    f
}

/// Magnus expansion of a group word: the product of 1 + x over positive
/// syllables and the alternating geometric series over negative ones,
/// truncated at `degree`.
pub fn magnus_eval(sigma: &GroupWord, modulus: Modulus, degree: usize) -> TruncSeries {
    let mut acc = TruncSeries::one(modulus, degree);
    for &(letter, inverted) in sigma.syllables() {
        acc = acc.mul(&letter_factor(letter, inverted, modulus, degree));
    }
    acc
}

/// Coefficient of w in the Magnus expansion of sigma.
pub fn epsilon(sigma: &GroupWord, w: &Word, modulus: Modulus) -> u64 {
    magnus_eval(sigma, modulus, w.len()).coefficient(w)
}

/// The unitriangular representation attached to a word w of length s:
/// entry (i, j) of rho(sigma) is the coefficient of the subword
/// w[i..j] in the Magnus expansion, over Z/p^(n-s+1).
pub fn rho_w(sigma: &GroupWord, w: &Word, n: usize, p: u64) -> Result<UniMatrix> {
    let s = w.len();
    if s < 1 || n < s.max(2) {
        return Err(Error::BadParameter(format!(
            "need |w| >= 1 and n >= max(2, |w|), got |w| = {s}, n = {n}"
        )));
    }
    let modulus = Modulus::new(p, (n - s + 1) as u32)?;
    let series = magnus_eval(sigma, modulus, s);
    let mut out = UniMatrix::identity(s, modulus);
    for i in 0..s {
        for j in i + 1..=s {
            out.set_entry(i, j, series.coefficient(&w.subword(i..j)));
        }
    }
    Ok(out)
}

/// Calibrated coefficient identity: the product of two coefficient
/// functionals expands over the infiltration product,
///
/// ```text
/// eps_u(sigma) * eps_v(sigma) = sum_w (u down v)_w * eps_w(sigma)  (mod q)
/// ```
///
/// exact for every group word sigma.
pub fn check_shuffle_relation(u: &Word, v: &Word, sigma: &GroupWord, modulus: Modulus) -> bool {
    let degree = u.len() + v.len();
    let series = magnus_eval(sigma, modulus, degree);
    let lhs = modulus.mul(series.coefficient(u), series.coefficient(v));
    let mut rhs = 0u64;
    for (w, c) in infiltration_words(u, v).terms() {
        let c = u64::try_from(&c.mod_floor(&BigInt::from(modulus.q))).unwrap();
        rhs = (rhs + modulus.mul(c, series.coefficient(w))) % modulus.q;
    }
    lhs == rhs
}

/// The uncorrected form of the identity with the shuffle product on the
/// right. It ignores the lower-degree infiltration terms and is genuinely
/// false; see the module docs and the calibration fixture.
pub fn naive_shuffle_identity_holds(
    u: &Word,
    v: &Word,
    sigma: &GroupWord,
    modulus: Modulus,
) -> bool {
    let degree = u.len() + v.len();
    let series = magnus_eval(sigma, modulus, degree);
    let lhs = modulus.mul(series.coefficient(u), series.coefficient(v));
    let mut rhs = 0u64;
    for (w, c) in crate::poly::shuffle_words(u, v).terms() {
        let c = u64::try_from(&c.mod_floor(&BigInt::from(modulus.q))).unwrap();
        rhs = (rhs + modulus.mul(c, series.coefficient(w))) % modulus.q;
    }
    lhs == rhs
}

/// Outcome of a seeded randomized check, JSON-ready.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: serde_json::Value,
    pub trials: u64,
    pub failures: Vec<serde_json::Value>,
    pub seed: u64,
    pub pass: bool,
}

const MAX_SYLLABLES: usize = 20;

fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Multiplicativity and inverse-compatibility of the expansion itself.
pub fn check_magnus_homomorphism(
    alphabet: &Alphabet,
    modulus: Modulus,
    degree: usize,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let sigma = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        let tau = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        let left = magnus_eval(&sigma.concat(&tau), modulus, degree);
        let right = magnus_eval(&sigma, modulus, degree).mul(&magnus_eval(&tau, modulus, degree));
        if left != right {
            failures.push(serde_json::json!({
                "sigma": sigma.render(alphabet),
                "tau": tau.render(alphabet),
                "kind": "product",
            }));
        }
        let inv_eval = magnus_eval(&sigma.inverse(), modulus, degree);
        let eval_inv = magnus_eval(&sigma, modulus, degree)
            .inv()
            .expect("magnus expansions have unit constant term");
        if inv_eval != eval_inv {
            failures.push(serde_json::json!({
                "sigma": sigma.render(alphabet),
                "kind": "inverse",
            }));
        }
    }
    CheckReport {
        check: "magnus-homomorphism".into(),
        params: serde_json::json!({
            "alphabet": alphabet.size(),
            "q": modulus.q,
            "degree": degree,
        }),
        trials,
        pass: failures.is_empty(),
        failures,
        seed,
    }
}

/// Reducing coefficients mod a divisor commutes with evaluation.
pub fn check_functoriality(
    alphabet: &Alphabet,
    from: Modulus,
    to: Modulus,
    degree: usize,
    trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    if from.p != to.p || from.k < to.k {
        return Err(Error::BadParameter(format!(
            "no reduction from q={} to q={}",
            from.q, to.q
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let sigma = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        let reduced = magnus_eval(&sigma, from, degree).reduce_to(to)?;
        let direct = magnus_eval(&sigma, to, degree);
        if reduced != direct {
            failures.push(serde_json::json!({ "sigma": sigma.render(alphabet) }));
        }
    }
    Ok(CheckReport {
        check: "magnus-functoriality".into(),
        params: serde_json::json!({
            "alphabet": alphabet.size(),
            "from_q": from.q,
            "to_q": to.q,
            "degree": degree,
        }),
        trials,
        pass: failures.is_empty(),
        failures,
        seed,
    })
}

/// rho_w turns concatenation into matrix multiplication.
pub fn check_rho_homomorphism(
    alphabet: &Alphabet,
    w: &Word,
    n: usize,
    p: u64,
    trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    let identity_ok = rho_w(&GroupWord::identity(), w, n, p)?.is_identity();
    if !identity_ok {
        failures.push(serde_json::json!({ "kind": "identity" }));
    }
    for _ in 0..trials {
        let sigma = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        let tau = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        let left = rho_w(&sigma.concat(&tau), w, n, p)?;
        let right = rho_w(&sigma, w, n, p)?.mul(&rho_w(&tau, w, n, p)?);
        if left != right {
            failures.push(serde_json::json!({
                "sigma": sigma.render(alphabet),
                "tau": tau.render(alphabet),
                "kind": "product",
            }));
        }
        let inv_left = rho_w(&sigma.inverse(), w, n, p)?;
        let inv_right = rho_w(&sigma, w, n, p)?.inv();
        if inv_left != inv_right {
            failures.push(serde_json::json!({
                "sigma": sigma.render(alphabet),
                "kind": "inverse",
            }));
        }
    }
    Ok(CheckReport {
        check: "rho-homomorphism".into(),
        params: serde_json::json!({
            "w": alphabet.render_word(w),
            "n": n,
            "p": p,
        }),
        trials,
        pass: failures.is_empty(),
        failures,
        seed,
    })
}

/// Randomized sweep of the calibrated identity for one pair (u, v).
pub fn check_shuffle_relation_trials(
    alphabet: &Alphabet,
    u: &Word,
    v: &Word,
    modulus: Modulus,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let mut rng = seeded_rng(seed);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let sigma = GroupWord::random(&mut rng, alphabet.size(), MAX_SYLLABLES);
        if !check_shuffle_relation(u, v, &sigma, modulus) {
            failures.push(serde_json::json!({ "sigma": sigma.render(alphabet) }));
        }
    }
    CheckReport {
        check: "shuffle-relation".into(),
        params: serde_json::json!({
            "u": alphabet.render_word(u),
            "v": alphabet.render_word(v),
            "q": modulus.q,
        }),
        trials,
        pass: failures.is_empty(),
        failures,
        seed,
    }
}
