//! Unitriangular groups U_s(Z/p^k): (s+1) x (s+1) upper unitriangular
//! matrices over a prime-power residue ring, their exponents, and their
//! lower p-central series.
//!
//! Groups are materialized as sorted vectors of packed element codes (the
//! strictly upper entries, row-major, in a u128), so desk-scale brute force
//! stays square with memory. The series `G = G1 >= G2 >= ...` with
//! `G_{n+1} = G_n^p [G_n, G]` is computed from layer generators: when T
//! generates a normal subgroup H, the p-th powers of T together with the
//! commutators of T against every group element generate the next layer.
//! Every run re-asserts the facts that proof leans on (normality, descent,
//! exponent-p quotients) instead of trusting them.

use crate::arith::{floor_log, is_power_of, is_prime};
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;
use std::collections::{HashMap, HashSet};

/// Prime-power modulus q = p^k, kept factored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::BadParameter("modulus exponent must be positive".into()));
        }
        let mut q = 1u64;
        for _ in 0..k {
            q = q
                .checked_mul(p)
                .filter(|&q| q <= 1 << 31)
                .ok_or_else(|| Error::BadParameter(format!("p^k = {p}^{k} is too large")))?;
        }
        Ok(Modulus { p, k, q })
    }

    pub fn from_q(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        let mut p = 2;
        while q % p != 0 {
            p += 1;
        }
        let mut k = 0;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower(q));
        }
        Modulus::new(p, k)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.q as u128) as u64
    }
}

fn upper_len(size: usize) -> usize {
    size * (size - 1) / 2
}

fn upper_idx(size: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < size);
    i * (2 * size - i - 1) / 2 + (j - i - 1)
}

/// Upper unitriangular matrix: ones on the diagonal, zeros below, entries
/// mod q above. `size` is s+1 for the group U_s.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniMatrix {
    size: usize,
    modulus: Modulus,
    upper: Vec<u64>,
}

impl UniMatrix {
    pub fn identity(s: usize, modulus: Modulus) -> Self {
        assert!(s >= 1, "U_s needs s >= 1");
        UniMatrix {
            size: s + 1,
            modulus,
            upper: vec![0; upper_len(s + 1)],
        }
    }

    /// I + c E_{ij} for 0 <= i < j <= s.
    pub fn elementary(s: usize, modulus: Modulus, i: usize, j: usize, c: u64) -> Self {
        let mut m = UniMatrix::identity(s, modulus);
        m.set_entry(i, j, c);
        m
    }

    pub fn from_upper(s: usize, modulus: Modulus, upper: Vec<u64>) -> Self {
        assert_eq!(upper.len(), upper_len(s + 1), "wrong number of entries");
        UniMatrix {
            size: s + 1,
            modulus,
            upper: upper.into_iter().map(|e| e % modulus.q).collect(),
        }
    }

    pub fn s(&self) -> usize {
        self.size - 1
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Entry with full matrix semantics: 1 on the diagonal, 0 below.
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[upper_idx(self.size, i, j)],
            Equal => 1,
            Greater => 0,
        }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: u64) {
        assert!(i < j && j < self.size, "only strictly upper entries are settable");
        self.upper[upper_idx(self.size, i, j)] = v % self.modulus.q;
    }

    pub fn is_identity(&self) -> bool {
        self.upper.iter().all(|&e| e == 0)
    }

    fn assert_same_context(&self, other: &UniMatrix) {
        assert!(
            self.size == other.size && self.modulus == other.modulus,
            "matrices disagree in size or modulus"
        );
    }

    pub fn mul(&self, other: &UniMatrix) -> UniMatrix {
        self.assert_same_context(other);
        let (size, q) = (self.size, self.modulus.q);
        let mut out = UniMatrix {
            size,
            modulus: self.modulus,
            upper: vec![0; self.upper.len()],
        };
        for i in 0..size {
            for j in i + 1..size {
                let mut acc = (self.entry(i, j) + other.entry(i, j)) % q;
                for k in i + 1..j {
                    acc = (acc + self.modulus.mul(self.entry(i, k), other.entry(k, j))) % q;
                }
                out.upper[upper_idx(size, i, j)] = acc;
            }
        }
        out
    }

    /// Inverse through the Neumann series of the nilpotent part: iterate
    /// X <- I - N X, which stabilizes at I - N + N^2 - ... within s steps.
    pub fn inv(&self) -> UniMatrix {
        let (size, q) = (self.size, self.modulus.q);
        let mut x = UniMatrix::identity(self.s(), self.modulus);
        for _ in 0..size - 1 {
            let mut next = UniMatrix::identity(self.s(), self.modulus);
            for i in 0..size {
                for j in i + 1..size {
                    // (N X)[i][j] with N the strictly upper part of self
                    let mut acc = 0u64;
                    for k in i + 1..=j {
                        acc = (acc + self.modulus.mul(self.entry(i, k), x.entry(k, j))) % q;
                    }
                    next.upper[upper_idx(size, i, j)] = (q - acc) % q;
                }
            }
            x = next;
        }
        debug_assert!(self.mul(&x).is_identity());
        x
    }

    pub fn pow(&self, e: u64) -> UniMatrix {
        let mut result = UniMatrix::identity(self.s(), self.modulus);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    pub fn commutator(&self, other: &UniMatrix) -> UniMatrix {
        self.inv().mul(&other.inv()).mul(self).mul(other)
    }

    /// Multiplicative order; always a power of p in these groups.
    pub fn order(&self) -> u64 {
        let p = self.modulus.p;
        let mut b = self.clone();
        let mut order = 1u64;
        while !b.is_identity() {
            b = b.pow(p);
            order *= p;
        }
        order
    }

    /// Bits needed per entry for the packed code.
    fn entry_bits(&self) -> u32 {
        64 - (self.modulus.q - 1).leading_zeros()
    }

    /// Pack the strictly upper entries, row-major, first entry most
    /// significant, into a u128.
    pub fn encode(&self) -> u128 {
        let bits = self.entry_bits();
        assert!(
            bits as usize * self.upper.len() <= 128,
            "state space too wide to pack"
        );
        self.upper
            .iter()
            .fold(0u128, |acc, &e| (acc << bits) | e as u128)
    }

    pub fn decode(s: usize, modulus: Modulus, code: u128) -> UniMatrix {
        let mut m = UniMatrix::identity(s, modulus);
        let bits = m.entry_bits();
        let mask = (1u128 << bits) - 1;
        let mut code = code;
        for t in (0..m.upper.len()).rev() {
            m.upper[t] = (code & mask) as u64;
            code >>= bits;
        }
        m
    }

    pub fn random<R: Rng>(s: usize, modulus: Modulus, rng: &mut R) -> UniMatrix {
        let upper = (0..upper_len(s + 1))
            .map(|_| rng.gen_range(0..modulus.q))
            .collect();
        UniMatrix {
            size: s + 1,
            modulus,
            upper,
        }
    }

    /// Full rows, diagonal included, for display and JSON.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// q^(s(s+1)/2), the order of the full group U_s(Z/q).
pub fn full_group_order(s: usize, modulus: Modulus) -> u128 {
    let mut acc = 1u128;
    for _ in 0..upper_len(s + 1) {
        acc = acc
            .checked_mul(modulus.q as u128)
            .expect("group order exceeds u128");
    }
    acc
}

/// Exponent of U_s(Z/q): q * p^floor(log_p s).
pub fn group_exponent_formula(s: usize, modulus: Modulus) -> u64 {
    modulus.q * modulus.p.pow(floor_log(s as u64, modulus.p))
}

/// A finite set of unitriangular matrices closed under the group
/// operations, stored as sorted packed codes plus a membership set.
#[derive(Clone, Debug)]
pub struct FiniteGroupSet {
    s: usize,
    modulus: Modulus,
    elements: Vec<u128>,
    index: HashSet<u128>,
    generators: Vec<u128>,
}

impl FiniteGroupSet {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, m: &UniMatrix) -> bool {
        self.index.contains(&m.encode())
    }

    pub fn contains_code(&self, code: u128) -> bool {
        self.index.contains(&code)
    }

    pub fn element_codes(&self) -> &[u128] {
        &self.elements
    }

    pub fn elements(&self) -> impl Iterator<Item = UniMatrix> + '_ {
        self.elements
            .iter()
            .map(move |&c| UniMatrix::decode(self.s, self.modulus, c))
    }

    pub fn generators(&self) -> Vec<UniMatrix> {
        self.generators
            .iter()
            .map(|&c| UniMatrix::decode(self.s, self.modulus, c))
            .collect()
    }

    pub fn is_subset_of(&self, other: &FiniteGroupSet) -> bool {
        self.s == other.s
            && self.modulus == other.modulus
            && self.elements.iter().all(|c| other.index.contains(c))
    }

    /// Largest element order; the measured group exponent, since these
    /// groups have p-power element orders.
    pub fn measured_exponent(&self) -> u64 {
        self.elements().map(|m| m.order()).max().unwrap_or(1)
    }

    fn check_width(s: usize, modulus: Modulus) -> Result<()> {
        let bits = 64 - (modulus.q - 1).leading_zeros();
        if bits as usize * upper_len(s + 1) > 128 {
            return Err(Error::EncodingTooWide);
        }
        Ok(())
    }
}

/// Breadth-first closure of a generator list under right multiplication.
fn close_under(
    s: usize,
    modulus: Modulus,
    gen_codes: &[u128],
    cap: u64,
) -> Result<(Vec<u128>, HashSet<u128>)> {
    let gens: Vec<UniMatrix> = gen_codes
        .iter()
        .map(|&c| UniMatrix::decode(s, modulus, c))
        .collect();
    let identity = UniMatrix::identity(s, modulus);
    let mut index = HashSet::new();
    index.insert(identity.encode());
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = x.mul(g);
            let code = y.encode();
            if index.insert(code) {
                if index.len() as u64 > cap {
                    return Err(Error::CapExceeded {
                        size: index.len() as u128,
                        cap: cap as u128,
                    });
                }
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<u128> = index.iter().copied().collect();
    elements.sort_unstable();
    Ok((elements, index))
}

/// Subgroup generated by the given matrices, erroring out past `cap`
/// elements rather than thrashing.
pub fn generate_group(gens: &[UniMatrix], cap: u64) -> Result<FiniteGroupSet> {
    let first = gens.first().ok_or(Error::GroupContextMismatch)?;
    let (s, modulus) = (first.s(), first.modulus());
    if gens.iter().any(|g| g.s() != s || g.modulus() != modulus) {
        return Err(Error::GroupContextMismatch);
    }
    FiniteGroupSet::check_width(s, modulus)?;
    let gen_codes: Vec<u128> = gens.iter().map(UniMatrix::encode).collect();
    let (elements, index) = close_under(s, modulus, &gen_codes, cap)?;
    Ok(FiniteGroupSet {
        s,
        modulus,
        elements,
        index,
        generators: gen_codes,
    })
}

/// All of U_s(Z/q) by direct enumeration, generated by the superdiagonal
/// elementaries I + E_{i,i+1}.
pub fn full_group(s: usize, modulus: Modulus, cap: u64) -> Result<FiniteGroupSet> {
    let order = full_group_order(s, modulus);
    if order > cap as u128 {
        return Err(Error::CapExceeded { size: order, cap: cap as u128 });
    }
    FiniteGroupSet::check_width(s, modulus)?;
    let len = upper_len(s + 1);
    let mut elements = Vec::with_capacity(order as usize);
    let mut upper = vec![0u64; len];
    loop {
        elements.push(UniMatrix {
            size: s + 1,
            modulus,
            upper: upper.clone(),
        }
        .encode());
        let mut t = len;
        loop {
            if t == 0 {
                elements.sort_unstable();
                let index: HashSet<u128> = elements.iter().copied().collect();
                let generators = (0..s)
                    .map(|i| UniMatrix::elementary(s, modulus, i, i + 1, 1).encode())
                    .collect();
                return Ok(FiniteGroupSet {
                    s,
                    modulus,
                    elements,
                    index,
                    generators,
                });
            }
            t -= 1;
            if upper[t] + 1 < modulus.q {
                upper[t] += 1;
                upper[t + 1..].fill(0);
                break;
            }
        }
    }
}

/// One step of the series: the subgroup generated by p-th powers of the
/// layer generators and their commutators against the whole group. The
/// candidate stream is filtered through an incrementally grown closure, so
/// the generating set that survives stays logarithmic in the layer size.
fn next_layer(
    group: &FiniteGroupSet,
    layer_gen_codes: &[u128],
    cap: u64,
) -> Result<(Vec<u128>, HashSet<u128>, Vec<u128>)> {
    let (s, modulus) = (group.s, group.modulus);
    let p = modulus.p;
    let layer_gens: Vec<UniMatrix> = layer_gen_codes
        .iter()
        .map(|&c| UniMatrix::decode(s, modulus, c))
        .collect();
    let mut used: Vec<u128> = Vec::new();
    let mut elements = vec![UniMatrix::identity(s, modulus).encode()];
    let mut index: HashSet<u128> = elements.iter().copied().collect();
    let absorb = |cand: u128, used: &mut Vec<u128>, elements: &mut Vec<u128>, index: &mut HashSet<u128>| -> Result<()> {
        if index.contains(&cand) {
            return Ok(());
        }
        used.push(cand);
        let (e, i) = close_under(s, modulus, used, cap)?;
        *elements = e;
        *index = i;
        Ok(())
    };
    for t in &layer_gens {
        absorb(t.pow(p).encode(), &mut used, &mut elements, &mut index)?;
    }
    let t_invs: Vec<UniMatrix> = layer_gens.iter().map(UniMatrix::inv).collect();
    for &gcode in &group.elements {
        let g = UniMatrix::decode(s, modulus, gcode);
        let g_inv = g.inv();
        for (t, t_inv) in layer_gens.iter().zip(&t_invs) {
            let comm = t_inv.mul(&g_inv).mul(t).mul(&g);
            absorb(comm.encode(), &mut used, &mut elements, &mut index)?;
        }
    }
    Ok((elements, index, used))
}

/// The lower p-central series G = G_1 >= G_2 >= ... with
/// G_{n+1} = G_n^p [G_n, G], as `max_n` nested groups.
///
/// Along the way this asserts what the generator-based step relies on:
/// each layer is normal in G, contained in the previous one, and the
/// previous layer's p-th powers land in it.
pub fn lower_p_central_series(group: &FiniteGroupSet, max_n: usize) -> Result<Vec<FiniteGroupSet>> {
    let p = group.modulus.p;
    if !is_power_of(group.order(), p) {
        return Err(Error::BadParameter(format!(
            "group of order {} is not a p-group for p = {p}",
            group.order()
        )));
    }
    let cap = group.order();
    let mut layers = vec![group.clone()];
    let mut gen_codes = if group.generators.is_empty() {
        group.elements.clone()
    } else {
        group.generators.clone()
    };
    let group_gens: Vec<UniMatrix> = if group.generators.is_empty() {
        group.elements().collect()
    } else {
        group.generators()
    };
    for _ in 1..max_n {
        let prev = layers.last().unwrap();
        let (elements, index, used) = next_layer(group, &gen_codes, cap)?;
        let layer = FiniteGroupSet {
            s: group.s,
            modulus: group.modulus,
            elements,
            index,
            generators: used,
        };
        if !layer.is_subset_of(prev) {
            return Err(Error::BadParameter("series failed to descend".into()));
        }
        // normality in G: conjugation by generators permutes the layer
        for g in &group_gens {
            let g_inv = g.inv();
            for x in layer.elements() {
                if !layer.contains(&g_inv.mul(&x).mul(g)) {
                    return Err(Error::NotNormal);
                }
            }
        }
        // the quotient of consecutive layers has exponent p
        for x in prev.elements() {
            if !layer.contains(&x.pow(p)) {
                return Err(Error::BadParameter(
                    "quotient exponent exceeds p; layer generators cannot be trusted".into(),
                ));
            }
        }
        gen_codes = layer.generators.clone();
        layers.push(layer);
    }
    Ok(layers)
}

/// Combined filtration and exponent report for one U_s(Z/p^(n-s+1)).
#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    pub n: usize,
    pub s: usize,
    pub p: u64,
    pub q: u64,
    pub order: u64,
    /// Orders of G_1, ..., G_{n+1}.
    pub layers: Vec<u64>,
    /// G_n is exactly {I + c p^(n-s) E_{1,s+1}}, one copy of Z/p.
    pub lemma_a: bool,
    /// G_n is central.
    pub lemma_b: bool,
    /// G_{n+1} is trivial.
    pub lemma_c: bool,
    pub exponent_formula: u64,
    pub exponent_measured: u64,
    pub pass: bool,
}

pub fn verify_filtration_lemma(n: usize, s: usize, p: u64, cap: u64) -> Result<FiltrationReport> {
    if s < 1 || n < s {
        return Err(Error::BadParameter(format!("need 1 <= s <= n, got s={s}, n={n}")));
    }
    let modulus = Modulus::new(p, (n - s + 1) as u32)?;
    let group = full_group(s, modulus, cap)?;
    let layers = lower_p_central_series(&group, n + 1)?;
    let layer_n = &layers[n - 1];
    let layer_next = &layers[n];

    let scale = modulus.q / p; // p^(n-s)
    let expected: HashSet<u128> = (0..p)
        .map(|c| UniMatrix::elementary(s, modulus, 0, s, c * scale).encode())
        .collect();
    let lemma_a = layer_n.order() == p && layer_n.element_codes().iter().all(|c| expected.contains(c));
    let lemma_b = layer_n.elements().all(|z| {
        group.elements().all(|g| z.mul(&g) == g.mul(&z))
    });
    let lemma_c = layer_next.order() == 1;

    let exponent_formula = group_exponent_formula(s, modulus);
    let exponent_measured = group.measured_exponent();
    let pass = lemma_a && lemma_b && lemma_c && exponent_formula == exponent_measured;
    Ok(FiltrationReport {
        n,
        s,
        p,
        q: modulus.q,
        order: group.order(),
        layers: layers.iter().map(FiniteGroupSet::order).collect(),
        lemma_a,
        lemma_b,
        lemma_c,
        exponent_formula,
        exponent_measured,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentReport {
    pub s: usize,
    pub q: u64,
    pub formula: u64,
    /// Order of the full-superdiagonal witness I + E_{1,2} + ... + E_{s,s+1}.
    pub witness_order: u64,
    pub exhaustive: bool,
    pub checked: u64,
    pub max_order: u64,
    pub seed: u64,
    pub pass: bool,
}

/// Check the exponent formula for U_s(Z/q): the witness must reach the
/// formula exactly; beyond that, either every element (when the group is
/// no larger than `sample`) or `sample` random elements must have order
/// dividing it.
pub fn verify_exponent(s: usize, modulus: Modulus, sample: u64, seed: u64) -> Result<ExponentReport> {
    if s < 1 {
        return Err(Error::BadParameter("need s >= 1".into()));
    }
    let formula = group_exponent_formula(s, modulus);
    let mut witness = UniMatrix::identity(s, modulus);
    for i in 0..s {
        witness.set_entry(i, i + 1, 1);
    }
    let witness_order = witness.order();
    let total = full_group_order(s, modulus);
    let exhaustive = total <= sample as u128;
    let mut max_order = witness_order;
    let mut all_divide = formula % witness_order == 0;
    let checked;
    if exhaustive {
        let group = full_group(s, modulus, sample)?;
        checked = group.order();
        for m in group.elements() {
            let o = m.order();
            max_order = max_order.max(o);
            all_divide &= formula % o == 0;
        }
    } else {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        checked = sample;
        for _ in 0..sample {
            let o = UniMatrix::random(s, modulus, &mut rng).order();
            max_order = max_order.max(o);
            all_divide &= formula % o == 0;
        }
    }
    let pass = witness_order == formula && all_divide && (!exhaustive || max_order == formula);
    Ok(ExponentReport {
        s,
        q: modulus.q,
        formula,
        witness_order,
        exhaustive,
        checked,
        max_order,
        seed,
        pass,
    })
}

/// G/N for a normal subgroup N, as canonical coset representatives (the
/// minimal packed code in each coset) with induced multiplication.
pub struct QuotientGroup {
    s: usize,
    modulus: Modulus,
    reps: Vec<u128>,
    coset_of: HashMap<u128, usize>,
}

impl QuotientGroup {
    pub fn order(&self) -> u64 {
        self.reps.len() as u64
    }

    pub fn rep(&self, i: usize) -> UniMatrix {
        UniMatrix::decode(self.s, self.modulus, self.reps[i])
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let prod = self.rep(i).mul(&self.rep(j));
        self.coset_of[&prod.encode()]
    }

    pub fn identity_index(&self) -> usize {
        self.coset_of[&UniMatrix::identity(self.s, self.modulus).encode()]
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let e = self.identity_index();
        let mut acc = i;
        let mut order = 1u64;
        while acc != e {
            acc = self.mul(acc, i);
            order += 1;
        }
        order
    }

    pub fn exponent(&self) -> u64 {
        (0..self.reps.len())
            .map(|i| self.element_order(i))
            .fold(1, num_integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.reps.len();
        (0..n).all(|i| (i + 1..n).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.reps.len() as u64;
        (0..self.reps.len()).any(|i| self.element_order(i) == n)
    }

    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        let n = self.reps.len();
        assert!(n <= 1 << 10, "table would be enormous; use mul directly");
        (0..n)
            .map(|i| (0..n).map(|j| self.mul(i, j)).collect())
            .collect()
    }
}

pub fn quotient_mod(group: &FiniteGroupSet, normal: &FiniteGroupSet) -> Result<QuotientGroup> {
    if group.s != normal.s || group.modulus != normal.modulus {
        return Err(Error::GroupContextMismatch);
    }
    if !normal.is_subset_of(group) {
        return Err(Error::NotSubgroup);
    }
    // N is a subgroup iff its generators close back onto exactly N
    let (closure, _) = close_under(normal.s, normal.modulus, &normal.generators, group.order())?;
    if closure != normal.elements {
        return Err(Error::NotSubgroup);
    }
    let group_gens: Vec<UniMatrix> = if group.generators.is_empty() {
        group.elements().collect()
    } else {
        group.generators()
    };
    for g in &group_gens {
        let g_inv = g.inv();
        for x in normal.elements() {
            if !normal.contains(&g_inv.mul(&x).mul(g)) {
                return Err(Error::NotNormal);
            }
        }
    }
    let mut coset_of: HashMap<u128, usize> = HashMap::with_capacity(group.elements.len());
    let mut reps = Vec::new();
    for &code in &group.elements {
        if coset_of.contains_key(&code) {
            continue;
        }
        let idx = reps.len();
        reps.push(code);
        let m = UniMatrix::decode(group.s, group.modulus, code);
        for n in normal.elements() {
            coset_of.insert(m.mul(&n).encode(), idx);
        }
    }
    Ok(QuotientGroup {
        s: group.s,
        modulus: group.modulus,
        reps,
        coset_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: u64, k: u32) -> Modulus {
        Modulus::new(p, k).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(Modulus::new(4, 1).is_err());
        assert!(Modulus::new(3, 0).is_err());
        assert_eq!(Modulus::from_q(8).unwrap(), m(2, 3));
        assert_eq!(Modulus::from_q(9).unwrap(), m(3, 2));
        assert!(Modulus::from_q(12).is_err());
        assert!(Modulus::from_q(1).is_err());
    }

    #[test]
    fn elementary_products() {
        let q = m(5, 1);
        let e12 = UniMatrix::elementary(2, q, 0, 1, 1);
        let e23 = UniMatrix::elementary(2, q, 1, 2, 1);
        let prod = e12.mul(&e23);
        assert_eq!(prod.entry(0, 1), 1);
        assert_eq!(prod.entry(1, 2), 1);
        assert_eq!(prod.entry(0, 2), 1);
        let other = e23.mul(&e12);
        assert_eq!(other.entry(0, 2), 0);
    }

    #[test]
    fn inverse_examples() {
        let q = m(5, 1);
        let e = UniMatrix::elementary(2, q, 0, 1, 1);
        assert_eq!(e.inv().entry(0, 1), 4);
        assert!(e.mul(&e.inv()).is_identity());
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(7)
        };
        for s in 1..=4usize {
            for _ in 0..20 {
                let a = UniMatrix::random(s, m(3, 2), &mut rng);
                assert!(a.mul(&a.inv()).is_identity());
                assert!(a.inv().mul(&a).is_identity());
            }
        }
    }

    #[test]
    fn orders() {
        let a = UniMatrix::elementary(1, m(2, 2), 0, 1, 1);
        assert_eq!(a.order(), 4);
        let mut witness = UniMatrix::identity(2, m(2, 1));
        witness.set_entry(0, 1, 1);
        witness.set_entry(1, 2, 1);
        assert_eq!(witness.order(), 4);
        assert_eq!(UniMatrix::identity(3, m(3, 1)).order(), 1);
    }

    #[test]
    fn exponent_formula_values() {
        assert_eq!(group_exponent_formula(1, m(2, 1)), 2);
        assert_eq!(group_exponent_formula(1, m(3, 2)), 9);
        assert_eq!(group_exponent_formula(2, m(2, 1)), 4);
        assert_eq!(group_exponent_formula(2, m(2, 2)), 8);
        assert_eq!(group_exponent_formula(2, m(5, 1)), 5);
        assert_eq!(group_exponent_formula(3, m(2, 1)), 4);
        assert_eq!(group_exponent_formula(4, m(2, 1)), 8);
        assert_eq!(group_exponent_formula(3, m(3, 1)), 9);
    }

    #[test]
    fn encode_decode_round_trip() {
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(11)
        };
        for s in 1..=4usize {
            for modulus in [m(2, 3), m(3, 2), m(5, 2)] {
                for _ in 0..10 {
                    let a = UniMatrix::random(s, modulus, &mut rng);
                    assert_eq!(UniMatrix::decode(s, modulus, a.encode()), a);
                }
            }
        }
    }

    /// (I + N)^(p^k) = sum of C(p^k, l) N^l over l = 0..min(s, p^k),
    /// compared entrywise against plain square-and-multiply.
    #[test]
    fn binomial_expansion_of_p_power() {
        use crate::arith::binomial;
        use num_integer::Integer;

        // full (s+1)x(s+1) matrices in row-major form, since powers of the
        // nilpotent part are not unitriangular
        fn raw_mul(a: &[u64], b: &[u64], n: usize, modulus: Modulus) -> Vec<u64> {
            let mut out = vec![0u64; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc = (acc + modulus.mul(a[i * n + k], b[k * n + j])) % modulus.q;
                    }
                    out[i * n + j] = acc;
                }
            }
            out
        }

        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(23)
        };
        for (p, k) in [(2u64, 2u32), (3, 1), (3, 2), (5, 1)] {
            let modulus = m(p, k);
            let e = p.pow(k);
            for s in 1..=4usize {
                let n = s + 1;
                for _ in 0..8 {
                    let a = UniMatrix::random(s, modulus, &mut rng);
                    let mut nilpotent = vec![0u64; n * n];
                    for i in 0..n {
                        for j in i + 1..n {
                            nilpotent[i * n + j] = a.entry(i, j);
                        }
                    }
                    let mut acc = vec![0u64; n * n];
                    let mut n_pow: Vec<u64> = {
                        let mut id = vec![0u64; n * n];
                        for i in 0..n {
                            id[i * n + i] = 1;
                        }
                        id
                    };
                    for l in 0..=s.min(e as usize) {
                        if l > 0 {
                            n_pow = raw_mul(&n_pow, &nilpotent, n, modulus);
                        }
                        let c = binomial(e, l as i64).mod_floor(&num_bigint::BigInt::from(modulus.q));
                        let c = u64::try_from(&c).unwrap();
                        for t in 0..n * n {
                            acc[t] = (acc[t] + modulus.mul(c, n_pow[t])) % modulus.q;
                        }
                    }
                    let lhs = a.pow(e);
                    for i in 0..n {
                        for j in 0..n {
                            assert_eq!(lhs.entry(i, j), acc[i * n + j], "entry ({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closure_reaches_full_group() {
        for (s, q) in [(1usize, m(2, 3)), (2, m(3, 1)), (2, m(2, 2)), (3, m(2, 1))] {
            let gens: Vec<UniMatrix> = (0..s)
                .map(|i| UniMatrix::elementary(s, q, i, i + 1, 1))
                .collect();
            let group = generate_group(&gens, 1 << 20).unwrap();
            assert_eq!(group.order() as u128, full_group_order(s, q));
            let full = full_group(s, q, 1 << 20).unwrap();
            assert_eq!(group.element_codes(), full.element_codes());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let gens = vec![UniMatrix::elementary(2, m(3, 1), 0, 1, 1), UniMatrix::elementary(2, m(3, 1), 1, 2, 1)];
        assert!(matches!(
            generate_group(&gens, 10),
            Err(Error::CapExceeded { .. })
        ));
        assert!(full_group(3, m(5, 2), 1_000_000).is_err());
    }

    #[test]
    fn series_layer_orders() {
        let group = full_group(2, m(3, 1), 1 << 20).unwrap();
        let layers = lower_p_central_series(&group, 3).unwrap();
        let orders: Vec<u64> = layers.iter().map(FiniteGroupSet::order).collect();
        assert_eq!(orders, [27, 3, 1]);
        // the middle layer is the center: I + c E_{1,3}
        let mid = &layers[1];
        for z in mid.elements() {
            assert_eq!(z.entry(0, 1), 0);
            assert_eq!(z.entry(1, 2), 0);
        }

        let group = full_group(2, m(3, 2), 1 << 20).unwrap();
        let layers = lower_p_central_series(&group, 4).unwrap();
        let orders: Vec<u64> = layers.iter().map(FiniteGroupSet::order).collect();
        assert_eq!(orders, [729, 81, 3, 1]);
    }

    /// The textbook definition, generators be damned: close the sets
    /// {h^p : h in H} and {[h, g] : h in H, g in G} over all elements.
    fn series_by_all_elements(group: &FiniteGroupSet, max_n: usize) -> Vec<Vec<u128>> {
        let p = group.modulus().p;
        let mut layers = vec![group.element_codes().to_vec()];
        for _ in 1..max_n {
            let prev = layers.last().unwrap();
            let mut cand: Vec<u128> = Vec::new();
            for &hc in prev {
                let h = UniMatrix::decode(group.s(), group.modulus(), hc);
                cand.push(h.pow(p).encode());
                let h_inv = h.inv();
                for g in group.elements() {
                    cand.push(h_inv.mul(&g.inv()).mul(&h).mul(&g).encode());
                }
            }
            cand.sort_unstable();
            cand.dedup();
            let (elements, _) =
                close_under(group.s(), group.modulus(), &cand, group.order()).unwrap();
            layers.push(elements);
        }
        layers
    }

    #[test]
    fn series_matches_all_element_definition() {
        for (s, modulus, max_n) in [
            (1usize, m(2, 3), 4),
            (1, m(3, 2), 3),
            (2, m(2, 1), 3),
            (2, m(2, 2), 4),
            (2, m(3, 1), 3),
            (3, m(2, 1), 4),
            (2, m(3, 2), 4),
        ] {
            let group = full_group(s, modulus, 1 << 20).unwrap();
            let fast = lower_p_central_series(&group, max_n).unwrap();
            let slow = series_by_all_elements(&group, max_n);
            assert_eq!(fast.len(), slow.len());
            for (f, s_codes) in fast.iter().zip(&slow) {
                assert_eq!(f.element_codes(), &s_codes[..], "s={s} q={}", modulus.q);
            }
        }
    }

    #[test]
    fn series_on_cyclic_group() {
        // U_1(Z/p^n) is Z/p^n; the series steps down one power at a time
        let group = full_group(1, m(3, 3), 1 << 20).unwrap();
        let layers = lower_p_central_series(&group, 4).unwrap();
        let orders: Vec<u64> = layers.iter().map(FiniteGroupSet::order).collect();
        assert_eq!(orders, [27, 9, 3, 1]);
    }

    #[test]
    fn filtration_lemma_small() {
        let r = verify_filtration_lemma(2, 2, 3, 1 << 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.q, 3);
        assert_eq!(r.layers, [27, 3, 1]);
        let r = verify_filtration_lemma(3, 2, 3, 1 << 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.layers, [729, 81, 3, 1]);
        let r = verify_filtration_lemma(3, 3, 2, 1 << 20).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.order, 64);
    }

    #[test]
    fn exponent_reports() {
        let r = verify_exponent(2, m(2, 1), 1 << 20, 1).unwrap();
        assert!(r.pass && r.exhaustive);
        assert_eq!(r.formula, 4);
        assert_eq!(r.max_order, 4);
        let r = verify_exponent(2, m(3, 1), 1000, 1).unwrap();
        assert!(r.pass && r.exhaustive);
        assert_eq!(r.formula, 3);
        // sampled mode on a group too big to enumerate cheaply
        let r = verify_exponent(4, m(3, 2), 200, 99).unwrap();
        assert!(r.pass && !r.exhaustive);
        assert_eq!(r.checked, 200);
    }

    #[test]
    fn quotient_examples() {
        // U_2(Z/3) over its center: elementary abelian of order 9
        let group = full_group(2, m(3, 1), 1 << 20).unwrap();
        let layers = lower_p_central_series(&group, 2).unwrap();
        let q = quotient_mod(&group, &layers[1]).unwrap();
        assert_eq!(q.order(), 9);
        assert!(q.is_abelian());
        assert_eq!(q.exponent(), 3);
        assert!(!q.is_cyclic());
        let table = q.multiplication_table();
        assert_eq!(table.len(), 9);
        let e = q.identity_index();
        assert!((0..9).all(|i| table[e][i] == i && table[i][e] == i));

        // U_1(Z/27) over its deepest nontrivial layer: cyclic of order 9
        let group = full_group(1, m(3, 3), 1 << 20).unwrap();
        let layers = lower_p_central_series(&group, 3).unwrap();
        let q = quotient_mod(&group, &layers[2]).unwrap();
        assert_eq!(q.order(), 9);
        assert!(q.is_cyclic());
    }

    #[test]
    fn quotient_rejects_non_normal() {
        // inside U_2(Z/2), the subgroup generated by I + E_{1,2} is not
        // normal
        let modulus = m(2, 1);
        let group = full_group(2, modulus, 1 << 20).unwrap();
        let sub = generate_group(&[UniMatrix::elementary(2, modulus, 0, 1, 1)], 100).unwrap();
        assert!(matches!(
            quotient_mod(&group, &sub),
            Err(Error::NotNormal)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn group_axioms(
            seed in 0u64..1 << 16,
            s in 1usize..4,
            pk in prop_oneof![Just((2u64, 2u32)), Just((3, 1)), Just((5, 1))],
        ) {
            use rand::SeedableRng;
            let modulus = Modulus::new(pk.0, pk.1).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = UniMatrix::random(s, modulus, &mut rng);
            let b = UniMatrix::random(s, modulus, &mut rng);
            let c = UniMatrix::random(s, modulus, &mut rng);
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            let id = UniMatrix::identity(s, modulus);
            prop_assert_eq!(a.mul(&id), a.clone());
            prop_assert_eq!(id.mul(&a), a.clone());
            prop_assert!(a.mul(&a.inv()).is_identity());
            let e = group_exponent_formula(s, modulus);
            prop_assert!(a.pow(e).is_identity());
        }
    }
}
