//! Exact integer arithmetic: binomials, p-adic valuations, the Moebius
//! function, necklace counts, and the gcd of a binomial row.
//!
//! Everything returns `BigInt` or exact machine integers; nothing here is
//! allowed to overflow silently. Desk-scale inputs keep trial division
//! entirely adequate for primality and factoring.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Largest e with p^e <= n (n >= 1, p >= 2).
pub fn floor_log(n: u64, p: u64) -> u32 {
    debug_assert!(n >= 1 && p >= 2);
    let mut e = 0;
    let mut power = p;
    while power <= n {
        e += 1;
        power = match power.checked_mul(p) {
            Some(next) => next,
            None => break,
        };
    }
    e
}

/// Is n a (positive) power of p, including p^0 = 1?
pub fn is_power_of(n: u64, p: u64) -> bool {
    if n == 1 {
        return true;
    }
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

/// Exponent of p in n (n nonzero, p prime).
pub fn p_adic_valuation(n: &BigInt, p: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        m = q;
        v += 1;
    }
}

/// C(n, k), zero outside 0 <= k <= n. The running product is divided
/// stepwise; each division is exact because every prefix is a binomial.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut c = BigInt::one();
    for i in 1..=k {
        c *= BigInt::from(n - k + i);
        let (q, r) = c.div_rem(&BigInt::from(i));
        debug_assert!(r.is_zero());
        c = q;
    }
    c
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Moebius function by trial-division factorization.
pub fn moebius(d: u64) -> i8 {
    assert!(d >= 1, "moebius needs a positive argument");
    let mut m = d;
    let mut primes = 0;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

fn divisors(s: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= s {
        if s % d == 0 {
            small.push(d);
            if d != s / d {
                large.push(s / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Number of Lyndon words of length s over m letters:
/// (1/s) * sum over d | s of mu(d) * m^(s/d). The division by s is exact.
pub fn necklace_phi(s: u64, m: u64) -> BigInt {
    assert!(s >= 1, "necklace count needs positive length");
    let mb = BigInt::from(m);
    let mut acc = BigInt::zero();
    for d in divisors(s) {
        let term = num_traits::pow(mb.clone(), (s / d) as usize);
        match moebius(d) {
            1 => acc += term,
            -1 => acc -= term,
            _ => {}
        }
    }
    let (q, r) = acc.div_rem(&BigInt::from(s));
    assert!(r.is_zero(), "necklace sum must be divisible by s");
    q
}

/// Alphabet cardinality that may be infinite, for the necklace count's
/// degenerate limit: infinitely many letters give infinitely many Lyndon
/// words in every positive length.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Card {
    Fin(u64),
    Inf,
}

pub fn necklace_phi_card(s: u64, m: Card) -> Card {
    match m {
        Card::Inf => Card::Inf,
        Card::Fin(m) => {
            let phi = necklace_phi(s, m);
            Card::Fin(u64::try_from(&phi).expect("necklace count exceeds u64 at desk scale"))
        }
    }
}

/// gcd of the interior binomial row: gcd { C(s, i) : 1 <= i <= s-1 }.
/// Equals 1 unless s is a prime power p^j, in which case it equals p.
pub fn binomial_row_gcd(s: u64) -> BigInt {
    assert!(s >= 2, "interior of the binomial row needs s >= 2");
    let mut g = BigInt::from(s);
    let mut c = BigInt::from(s);
    for i in 2..=s / 2 {
        c *= BigInt::from(s - i + 1);
        let (q, r) = c.div_rem(&BigInt::from(i));
        debug_assert!(r.is_zero());
        c = q;
        g = g.gcd(&c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Inverse of a mod m (any modulus m >= 2), via the extended Euclidean
/// algorithm. None when gcd(a, m) > 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    assert!(m >= 2, "modulus must be at least 2");
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn binomial_row_nine() {
        let row: Vec<BigInt> = (1..=8).map(|k| binomial(9, k)).collect();
        let expect = [9, 36, 84, 126, 126, 84, 36, 9];
        assert_eq!(row, expect.map(big));
        assert_eq!(binomial(9, 0), big(1));
        assert_eq!(binomial(9, 9), big(1));
        assert_eq!(binomial(9, 10), big(0));
        assert_eq!(binomial(9, -1), big(0));
    }

    #[test]
    fn valuations() {
        assert_eq!(p_adic_valuation(&big(8), 2).unwrap(), 3);
        assert_eq!(p_adic_valuation(&big(-12), 2).unwrap(), 2);
        assert_eq!(p_adic_valuation(&big(12), 3).unwrap(), 1);
        assert_eq!(p_adic_valuation(&big(7), 3).unwrap(), 0);
        assert!(p_adic_valuation(&big(0), 3).is_err());
        assert!(p_adic_valuation(&big(5), 4).is_err());
    }

    #[test]
    fn moebius_small() {
        let values: Vec<i8> = (1..=12).map(moebius).collect();
        assert_eq!(values, [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }

    #[test]
    fn necklace_counts() {
        assert_eq!(necklace_phi(1, 5), big(5));
        assert_eq!(necklace_phi(2, 2), big(1));
        assert_eq!(necklace_phi(3, 2), big(2));
        assert_eq!(necklace_phi(4, 2), big(3));
        assert_eq!(necklace_phi(6, 2), big(9));
        assert_eq!(necklace_phi(4, 3), big(18));
        for p in [2u64, 3, 5, 7, 11] {
            assert_eq!(necklace_phi(p, 1), big(0), "p={p}");
        }
        assert_eq!(necklace_phi(1, 1), big(1));
        assert_eq!(necklace_phi_card(3, Card::Inf), Card::Inf);
        assert_eq!(necklace_phi_card(3, Card::Fin(2)), Card::Fin(2));
    }

    #[test]
    fn row_gcd_values() {
        assert_eq!(binomial_row_gcd(4), big(2));
        assert_eq!(binomial_row_gcd(6), big(1));
        assert_eq!(binomial_row_gcd(9), big(3));
        assert_eq!(binomial_row_gcd(2), big(2));
        assert_eq!(binomial_row_gcd(12), big(1));
        assert_eq!(binomial_row_gcd(125), big(5));
    }

    /// Direct definition, no early exit and no symmetry trick.
    #[test]
    fn row_gcd_matches_definition() {
        for s in 2..=40u64 {
            let mut g = BigInt::from(0);
            for i in 1..s {
                g = g.gcd(&binomial(s, i as i64));
            }
            assert_eq!(binomial_row_gcd(s), g, "s={s}");
        }
    }

    #[test]
    fn prime_power_detection() {
        assert!(is_power_of(8, 2));
        assert!(is_power_of(1, 7));
        assert!(!is_power_of(12, 2));
        assert_eq!(floor_log(9, 3), 2);
        assert_eq!(floor_log(8, 3), 1);
        assert_eq!(floor_log(1, 2), 0);
        assert!(is_prime(2) && is_prime(97) && !is_prime(1) && !is_prime(91));
    }

    #[test]
    fn modular_inverse() {
        for m in 2..=60u64 {
            for a in 0..m {
                match mod_inverse(a, m) {
                    Some(inv) => {
                        assert_eq!(a * inv % m, 1, "a={a} m={m}");
                        assert!(inv < m);
                    }
                    None => assert_ne!(num_integer::gcd(a, m), 1, "a={a} m={m}"),
                }
            }
        }
    }

    /// v_p(C(p^k, l)) = k - v_p(l): checked from exact binomials.
    #[test]
    fn prime_power_row_valuations() {
        for p in [2u64, 3, 5] {
            for k in 1..=3u32 {
                let q = p.pow(k);
                for l in 1..=q {
                    let v = p_adic_valuation(&binomial(q, l as i64), p).unwrap();
                    let vl = p_adic_valuation(&BigInt::from(l), p).unwrap();
                    assert_eq!(v, k - vl, "p={p} k={k} l={l}");
                }
            }
        }
    }
}
