//! One-shot verification suite. Each check reproduces one desk-scale
//! claim end to end and reports pass/fail with a short account of what
//! was covered; `all_checks` runs the whole battery in a fixed order.
//!
//! The `Full` profile is the contract (group orders to 10^6, 500 or 1000
//! trials); `Quick` caps groups at 10^4 and trials at 100 for fast
//! iteration.

use crate::arith::{binomial, binomial_row_gcd, is_power_of, necklace_phi, p_adic_valuation};
use crate::indec::{indec_dim_mod_p, smith_normal_form, IntMatrix};
use crate::magnus::{
    check_functoriality, check_magnus_homomorphism, check_rho_homomorphism, magnus_eval, GroupWord,
};
use crate::poly::{infiltration_words, radford_q};
use crate::unipotent::{
    full_group_order, verify_exponent, verify_filtration_lemma, Modulus, UniMatrix,
};
use crate::words::{lyndon_words, Alphabet, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    pub fn group_cap(self) -> u64 {
        match self {
            Profile::Quick => 10_000,
            Profile::Full => 1_000_000,
        }
    }

    pub fn trials(self) -> u64 {
        match self {
            Profile::Quick => 100,
            Profile::Full => 500,
        }
    }

    pub fn relation_trials(self) -> u64 {
        match self {
            Profile::Quick => 100,
            Profile::Full => 1000,
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(crate::Error::BadParameter(format!(
                "unknown profile {other:?}, expected quick or full"
            ))),
        }
    }
}

/// Result of one acceptance check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            pass: false,
            detail,
        }
    }
}

/// dim of the degree-s indecomposable quotient mod p equals the necklace
/// number phi_s(m), for every m <= 3, p in {2,3,5,7}, 1 <= s < p, s <= 6.
pub fn check_dimension_formula(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "dimension-formula";
    let mut checked = 0usize;
    for m in 1..=3usize {
        for p in [2u64, 3, 5, 7] {
            for s in 1..p.min(7) as usize {
                let dim = match indec_dim_mod_p(m, s, p) {
                    Ok(d) => d,
                    Err(e) => return CheckOutcome::fail(name, format!("m={m} s={s} p={p}: {e}")),
                };
                let phi = necklace_phi(s as u64, m as u64);
                if BigInt::from(dim) != phi {
                    return CheckOutcome::fail(
                        name,
                        format!("m={m} s={s} p={p}: dim {dim} but phi {phi}"),
                    );
                }
                checked += 1;
            }
        }
    }
    CheckOutcome::pass(
        name,
        format!("dim = phi_s(m) on all {checked} triples (m <= 3, p <= 7, s < p)"),
    )
}

/// At s = p the formula genuinely breaks on one letter: the quotient is
/// one-dimensional while phi_p(1) = 0 and there is no Lyndon word.
pub fn check_counterexample_at_p(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "counterexample-at-p";
    for p in [2u64, 3, 5] {
        let dim = match indec_dim_mod_p(1, p as usize, p) {
            Ok(d) => d,
            Err(e) => return CheckOutcome::fail(name, format!("p={p}: {e}")),
        };
        let phi = necklace_phi(p, 1);
        let lyndon = lyndon_words(&Alphabet::new(1).unwrap(), p as usize).len();
        if dim != 1 || !phi.is_zero() || lyndon != 0 {
            return CheckOutcome::fail(
                name,
                format!("p={p}: dim {dim}, phi {phi}, {lyndon} Lyndon words"),
            );
        }
    }
    CheckOutcome::pass(
        name,
        "dim 1 vs phi = 0 and empty Lyndon set at s = p for p in {2,3,5}".into(),
    )
}

/// Q_w = w + nonnegative combination of strictly smaller words of the
/// same length, for every w over two letters with |w| <= 6.
pub fn check_radford_triangularity(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "radford-triangularity";
    let alphabet = Alphabet::new(2).unwrap();
    let mut checked = 0usize;
    for s in 1..=6usize {
        for w in alphabet.words_of_length(s) {
            let q = match radford_q(&w) {
                Ok(q) => q,
                Err(e) => {
                    return CheckOutcome::fail(
                        name,
                        format!("w={}: {e}", alphabet.render_word(&w)),
                    )
                }
            };
            if !q.coefficient(&w).is_one() {
                return CheckOutcome::fail(
                    name,
                    format!("w={}: leading coefficient != 1", alphabet.render_word(&w)),
                );
            }
            for (u, c) in q.terms() {
                let ok = u.len() == s && u <= &w && (u == &w || c > &BigInt::zero());
                if !ok {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "w={}: term {}*{} breaks triangularity",
                            alphabet.render_word(&w),
                            c,
                            alphabet.render_word(u)
                        ),
                    );
                }
            }
            checked += 1;
        }
    }
    CheckOutcome::pass(
        name,
        format!("Q_w triangular with nonnegative lower terms for all {checked} words, |w| <= 6"),
    )
}

/// Single letter, degree s: the lattice of decomposable elements inside
/// degree s is h(s) * Z, where h(s) = gcd of the interior binomial row.
/// SNF pins the integral structure; h(s) has a p-divisor exactly at
/// p-power s.
pub fn check_single_letter_integral_structure(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "single-letter-integral-structure";
    for s in 2..=12usize {
        let snf = smith_normal_form(&IntMatrix::single_letter_generators(s));
        let expected = vec![binomial_row_gcd(s as u64)];
        if snf != expected {
            return CheckOutcome::fail(name, format!("s={s}: SNF {snf:?}, expected {expected:?}"));
        }
    }
    for s in 2..=200u64 {
        let h = binomial_row_gcd(s);
        for p in [2u64, 3, 5, 7] {
            let divides = (&h % BigInt::from(p)).is_zero();
            if divides != is_power_of(s, p) {
                return CheckOutcome::fail(
                    name,
                    format!(
                        "s={s} p={p}: p | h(s) is {divides}, p-power is {}",
                        is_power_of(s, p)
                    ),
                );
            }
        }
    }
    CheckOutcome::pass(
        name,
        "SNF = [h(s)] for s <= 12; p | h(s) iff s is a p-power for s <= 200, p <= 7".into(),
    )
}

const EXPONENT_PAIRS: [(usize, u64); 9] = [
    (1, 2),
    (1, 9),
    (2, 2),
    (2, 3),
    (2, 4),
    (2, 5),
    (3, 2),
    (3, 3),
    (4, 2),
];

/// Exponent of U_s(Z/q) equals q * p^floor(log_p s), measured by running
/// over every element of the group.
pub fn check_exponent_formula(_profile: Profile, seed: u64) -> CheckOutcome {
    let name = "unipotent-exponent";
    for (s, q) in EXPONENT_PAIRS {
        let modulus = match Modulus::from_q(q) {
            Ok(m) => m,
            Err(e) => return CheckOutcome::fail(name, format!("q={q}: {e}")),
        };
        let report = match verify_exponent(s, modulus, 1 << 20, seed) {
            Ok(r) => r,
            Err(e) => return CheckOutcome::fail(name, format!("s={s} q={q}: {e}")),
        };
        if !report.pass || !report.exhaustive {
            return CheckOutcome::fail(
                name,
                format!(
                    "s={s} q={q}: formula {}, witness {}, max over group {} (exhaustive: {})",
                    report.formula, report.witness_order, report.max_order, report.exhaustive
                ),
            );
        }
    }
    CheckOutcome::pass(
        name,
        format!("exponent measured = q*p^floor(log_p s) on all {} groups, exhaustively", EXPONENT_PAIRS.len()),
    )
}

/// Lower p-central filtration of U_s(Z/p^(n-s+1)): the n-th layer is the
/// central copy of Z/p in the top corner and the (n+1)-st is trivial,
/// for every (n,s,p) with s <= n <= 4, p in {2,3,5}, group order within
/// the profile cap.
pub fn check_filtration_lemma(profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "filtration-lemma";
    let cap = profile.group_cap();
    let mut ran = 0usize;
    let mut skipped = Vec::new();
    let mut largest = 0u64;
    for s in 1..=4usize {
        for n in s..=4usize {
            for p in [2u64, 3, 5] {
                let modulus = Modulus::new(p, (n - s + 1) as u32).unwrap();
                if full_group_order(s, modulus) > cap as u128 {
                    skipped.push(format!("(n={n},s={s},p={p})"));
                    continue;
                }
                let report = match verify_filtration_lemma(n, s, p, cap) {
                    Ok(r) => r,
                    Err(e) => {
                        return CheckOutcome::fail(name, format!("n={n} s={s} p={p}: {e}"))
                    }
                };
                if !report.pass {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "n={n} s={s} p={p}: layers {:?}, lemma ({},{},{}), exponent {} vs {}",
                            report.layers,
                            report.lemma_a,
                            report.lemma_b,
                            report.lemma_c,
                            report.exponent_measured,
                            report.exponent_formula
                        ),
                    );
                }
                ran += 1;
                largest = largest.max(report.order);
            }
        }
    }
    let skipped_note = if skipped.is_empty() {
        String::new()
    } else {
        format!("; over cap, skipped: {}", skipped.join(" "))
    };
    CheckOutcome::pass(
        name,
        format!("central top layer + trivial next layer on {ran} groups (largest order {largest}){skipped_note}"),
    )
}

/// The four divisibility facts about binomial coefficients of prime-power
/// upper index, checked exhaustively for p in {2,3,5}, k <= 4 (and the
/// p-power criterion for m <= 200).
pub fn check_binomial_lemmas(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "binomial-lemmas";
    for p in [2u64, 3, 5] {
        for k in 1..=4u32 {
            let q = p.pow(k);
            let row: Vec<BigInt> = (0..=q).map(|l| binomial(q, l as i64)).collect();
            // (a) p^k / gcd(p^k, l) divides C(p^k, l)
            for l in 1..=q {
                let d = BigInt::from(q / q.gcd(&l));
                if !(&row[l as usize] % &d).is_zero() {
                    return CheckOutcome::fail(name, format!("(a) fails at p={p} k={k} l={l}"));
                }
            }
            // (b) v_p(C(p^k, p^j)) = k - j
            for j in 0..=k {
                let v = p_adic_valuation(&row[p.pow(j) as usize], p).unwrap();
                if v != k - j {
                    return CheckOutcome::fail(name, format!("(b) fails at p={p} k={k} j={j}"));
                }
            }
            // (c) p^j | C(p^k, l) for all l <= t  iff  p^j * p^floor(log_p t) | p^k
            for j in 0..=k + 1 {
                let pj = BigInt::from(p).pow(j);
                let mut all_divide = true;
                for t in 1..=q {
                    all_divide &= (&row[t as usize] % &pj).is_zero();
                    let lhs = all_divide;
                    let rhs = j + crate::arith::floor_log(t, p) <= k;
                    if lhs != rhs {
                        return CheckOutcome::fail(
                            name,
                            format!("(c) fails at p={p} k={k} j={j} t={t}: {lhs} vs {rhs}"),
                        );
                    }
                }
            }
        }
    }
    // (d) p | C(m, l) for all 0 < l < m  iff  m is a p-power
    for m in 2..=200u64 {
        let row: Vec<BigInt> = (1..m).map(|l| binomial(m, l as i64)).collect();
        for p in [2u64, 3, 5, 7] {
            let all = row.iter().all(|c| (c % BigInt::from(p)).is_zero());
            if all != is_power_of(m, p) {
                return CheckOutcome::fail(name, format!("(d) fails at m={m} p={p}"));
            }
        }
    }
    CheckOutcome::pass(
        name,
        "divisibility suite (a)-(d) exhaustive for p in {2,3,5}, k <= 4, m <= 200".into(),
    )
}

/// Configurations for the representation checks: every q in {4,8,9,25}
/// and word length s <= 4 that keeps n = s + k - 1 within 5.
fn rho_configurations() -> Vec<(Modulus, usize, usize)> {
    let mut out = Vec::new();
    for q in [4u64, 8, 9, 25] {
        let modulus = Modulus::from_q(q).unwrap();
        for s in 1..=4usize {
            let n = s + modulus.k as usize - 1;
            if n <= 5 {
                out.push((modulus, s, n));
            }
        }
    }
    out
}

/// Multiplicativity of the expansion, functoriality of coefficient
/// reduction, and the homomorphism property of every rho_w with
/// |w| <= 4, n <= 5, q in {4,8,9,25}.
pub fn check_magnus_homomorphisms(profile: Profile, seed: u64) -> CheckOutcome {
    let name = "magnus-homomorphisms";
    let trials = profile.trials();
    let alphabet = Alphabet::new(2).unwrap();

    for q in [4u64, 8, 9, 25] {
        let report =
            check_magnus_homomorphism(&alphabet, Modulus::from_q(q).unwrap(), 5, trials, seed);
        if !report.pass {
            return CheckOutcome::fail(name, format!("expansion not multiplicative at q={q}"));
        }
    }

    for (from, to) in [(8u64, 4u64), (8, 2), (4, 2), (9, 3), (25, 5)] {
        let report = check_functoriality(
            &alphabet,
            Modulus::from_q(from).unwrap(),
            Modulus::from_q(to).unwrap(),
            5,
            trials,
            seed,
        )
        .expect("moduli form a reduction pair");
        if !report.pass {
            return CheckOutcome::fail(name, format!("reduction {from} -> {to} not functorial"));
        }
    }

    // named configurations through the public entry point
    for (w, n, p) in [("ab", 2usize, 2u64), ("aba", 3, 2), ("a", 4, 2)] {
        let w = alphabet.parse_word(w).unwrap();
        let report = check_rho_homomorphism(&alphabet, &w, n, p, trials, seed).unwrap();
        if !report.pass {
            return CheckOutcome::fail(
                name,
                format!("rho_w fails at w={}, n={n}, p={p}", alphabet.render_word(&w)),
            );
        }
    }

    // full sweep, batched so the four expansions per trial are shared by
    // every window word of the same length
    let mut configs = 0usize;
    for (modulus, s, n) in rho_configurations() {
        let words = alphabet.words_of_length(s);
        configs += words.len();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let sigma = GroupWord::random(&mut rng, 2, 20);
            let tau = GroupWord::random(&mut rng, 2, 20);
            let ev_prod = magnus_eval(&sigma.concat(&tau), modulus, s);
            let ev_sigma = magnus_eval(&sigma, modulus, s);
            let ev_tau = magnus_eval(&tau, modulus, s);
            let ev_inv = magnus_eval(&sigma.inverse(), modulus, s);
            for w in &words {
                let build = |series: &crate::magnus::TruncSeries| {
                    let mut m = UniMatrix::identity(s, modulus);
                    for i in 0..s {
                        for j in i + 1..=s {
                            m.set_entry(i, j, series.coefficient(&w.subword(i..j)));
                        }
                    }
                    m
                };
                let lhs = build(&ev_prod);
                let rhs = build(&ev_sigma).mul(&build(&ev_tau));
                let inv_ok = build(&ev_inv) == build(&ev_sigma).inv();
                if lhs != rhs || !inv_ok {
                    return CheckOutcome::fail(
                        name,
                        format!(
                            "rho_w fails at w={}, n={n}, q={}, sigma={}, tau={}",
                            alphabet.render_word(w),
                            modulus.q,
                            sigma.render(&alphabet),
                            tau.render(&alphabet)
                        ),
                    );
                }
            }
        }
    }

    CheckOutcome::pass(
        name,
        format!(
            "expansion multiplicative at 4 moduli, 5 reductions functorial, rho_w homomorphic in {configs} configurations, {trials} trials each"
        ),
    )
}

/// The coefficient identity behind the shuffle relations. The product of
/// two coefficients of one expansion expands over the infiltration
/// product; the plain shuffle variant is recorded as false in the
/// calibration fixture.
pub fn check_shuffle_relation_sweep(profile: Profile, seed: u64) -> CheckOutcome {
    let name = "shuffle-relation-identity";
    let trials = profile.relation_trials();
    let alphabet = Alphabet::new(2).unwrap();
    let modulus = Modulus::from_q(125).unwrap();
    let mut pairs = 0usize;
    for total in 2..=5usize {
        for ulen in 1..total {
            let vlen = total - ulen;
            for u in alphabet.words_of_length(ulen) {
                for v in alphabet.words_of_length(vlen) {
                    let table: Vec<(Word, u64)> = infiltration_words(&u, &v)
                        .terms()
                        .map(|(w, c)| {
                            let c = u64::try_from(&c.mod_floor(&BigInt::from(modulus.q))).unwrap();
                            (w.clone(), c)
                        })
                        .collect();
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..trials {
                        let sigma = GroupWord::random(&mut rng, 2, 20);
                        let series = magnus_eval(&sigma, modulus, total);
                        let lhs = modulus.mul(series.coefficient(&u), series.coefficient(&v));
                        let mut rhs = 0u64;
                        for (w, c) in &table {
                            rhs = (rhs + modulus.mul(*c, series.coefficient(w))) % modulus.q;
                        }
                        if lhs != rhs {
                            return CheckOutcome::fail(
                                name,
                                format!(
                                    "u={}, v={}, sigma={}: {lhs} != {rhs} mod {}",
                                    alphabet.render_word(&u),
                                    alphabet.render_word(&v),
                                    sigma.render(&alphabet),
                                    modulus.q
                                ),
                            );
                        }
                    }
                    pairs += 1;
                }
            }
        }
    }
    CheckOutcome::pass(
        name,
        format!("identity holds mod 125 on {pairs} pairs (|u|+|v| <= 5), {trials} trials each"),
    )
}

/// Lyndon words of length s over m letters are counted by phi_s(m).
pub fn check_lyndon_count(_profile: Profile, _seed: u64) -> CheckOutcome {
    let name = "lyndon-count";
    for m in 1..=3usize {
        let alphabet = Alphabet::new(m).unwrap();
        for s in 1..=7usize {
            let count = BigInt::from(lyndon_words(&alphabet, s).len());
            let phi = necklace_phi(s as u64, m as u64);
            if count != phi {
                return CheckOutcome::fail(name, format!("m={m} s={s}: {count} vs phi {phi}"));
            }
        }
    }
    CheckOutcome::pass(name, "enumeration matches phi_s(m) for m <= 3, s <= 7".into())
}

type Check = fn(Profile, u64) -> CheckOutcome;

pub const CHECKS: [(&str, Check); 10] = [
    ("dimension-formula", check_dimension_formula),
    ("counterexample-at-p", check_counterexample_at_p),
    ("radford-triangularity", check_radford_triangularity),
    (
        "single-letter-integral-structure",
        check_single_letter_integral_structure,
    ),
    ("unipotent-exponent", check_exponent_formula),
    ("filtration-lemma", check_filtration_lemma),
    ("binomial-lemmas", check_binomial_lemmas),
    ("magnus-homomorphisms", check_magnus_homomorphisms),
    ("shuffle-relation-identity", check_shuffle_relation_sweep),
    ("lyndon-count", check_lyndon_count),
];

pub fn all_checks(profile: Profile, seed: u64) -> Vec<CheckOutcome> {
    CHECKS.iter().map(|(_, f)| f(profile, seed)).collect()
}
