//! Prime coding of finite words, the rank bijection onto the naturals and the
//! dense sequences `s^d_n`.

use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::SeqError;

/// A finite word of naturals.
pub type FinSeq = Vec<u64>;

/// Ranks at or beyond this value are treated as out of reach by the capped
/// searches used for hit finding and base generation.
pub const RANK_HORIZON: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Finite(u64),
    Omega,
}

impl Dimension {
    pub fn finite(d: u64) -> Result<Self, SeqError> {
        if d < 2 {
            return Err(SeqError::DimensionTooSmall(d));
        }
        Ok(Dimension::Finite(d))
    }

    /// Whether `letter` is allowed as a letter in this dimension.
    pub fn admits(&self, letter: u64) -> bool {
        match *self {
            Dimension::Finite(d) => letter < d,
            Dimension::Omega => true,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Omega => f.write_str("omega"),
        }
    }
}

impl FromStr for Dimension {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("omega") || t == "ω" || t == "w" {
            return Ok(Dimension::Omega);
        }
        let d: u64 = t
            .parse()
            .map_err(|_| SeqError::BadDimension(s.to_string()))?;
        Dimension::finite(d)
    }
}

/// `I(s)`, an element of `Seq`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqCode(BigUint);

impl SeqCode {
    /// Checks the factorization shape before wrapping.
    pub fn new(value: BigUint) -> Result<Self, SeqError> {
        prime_decode_raw(&value)?;
        Ok(SeqCode(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }
}

impl fmt::Display for SeqCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Renders a word as `[a,b,c]`.
pub fn fmt_word(w: &[u64]) -> String {
    let mut s = String::with_capacity(2 + 3 * w.len());
    s.push('[');
    for (i, x) in w.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&x.to_string());
    }
    s.push(']');
    s
}

/// Parses `[a,b,c]`; the brackets are optional and blanks are ignored.
pub fn parse_word(s: &str) -> Result<FinSeq, SeqError> {
    let t = s.trim();
    let t = t.strip_prefix('[').unwrap_or(t);
    let t = t.strip_suffix(']').unwrap_or(t);
    if t.trim().is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| SeqError::BadWord(s.to_string()))
        })
        .collect()
}

/// Whether `a` is an initial segment of `b`.
pub fn is_prefix(a: &[u64], b: &[u64]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

/// The word with its trailing zeros removed.
pub fn strip_zeros(w: &[u64]) -> &[u64] {
    let mut end = w.len();
    while end > 0 && w[end - 1] == 0 {
        end -= 1;
    }
    &w[..end]
}

// ---------------------------------------------------------------------------
// primes

static PRIMES: OnceLock<RwLock<Vec<u64>>> = OnceLock::new();

fn sieve(limit: usize) -> Vec<u64> {
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// The first `count` primes, 2 first.
pub fn primes(count: usize) -> Vec<u64> {
    let lock = PRIMES.get_or_init(|| RwLock::new(sieve(1 << 12)));
    {
        let ps = lock.read().expect("prime cache poisoned");
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
    }
    let mut ps = lock.write().expect("prime cache poisoned");
    let mut limit = 1usize << 12;
    while ps.len() < count {
        limit *= 2;
        *ps = sieve(limit);
    }
    ps[..count].to_vec()
}

/// The `i`-th prime, `p_0 = 2`.
pub fn nth_prime(i: usize) -> u64 {
    let lock = PRIMES.get_or_init(|| RwLock::new(sieve(1 << 12)));
    {
        let ps = lock.read().expect("prime cache poisoned");
        if i < ps.len() {
            return ps[i];
        }
    }
    primes(i + 1)[i]
}

// ---------------------------------------------------------------------------
// prime coding

pub fn prime_code(s: &[u64]) -> SeqCode {
    let mut c = BigUint::one();
    for (i, &x) in s.iter().enumerate() {
        let p = BigUint::from(nth_prime(i));
        let e = x.checked_add(1).expect("letter too large to code");
        let e: u32 = e.try_into().expect("exponent exceeds u32");
        c *= p.pow(e);
    }
    SeqCode(c)
}

/// `I(s)` when it fits in 128 bits.
pub fn prime_code_u128(s: &[u64]) -> Option<u128> {
    let mut c: u128 = 1;
    for (i, &x) in s.iter().enumerate() {
        let p = nth_prime(i) as u128;
        let mut e = x.checked_add(1)?;
        while e > 0 {
            c = c.checked_mul(p)?;
            e -= 1;
        }
    }
    Some(c)
}

fn prime_decode_raw(c: &BigUint) -> Result<FinSeq, SeqError> {
    if c.is_zero() {
        return Err(SeqError::NotASeqCode(c.to_string()));
    }
    if let Some(v) = c.to_u128() {
        return decode_u128(v).ok_or_else(|| SeqError::NotASeqCode(c.to_string()));
    }
    let mut rest = c.clone();
    let mut out = Vec::new();
    let mut i = 0;
    while !rest.is_one() {
        let p = BigUint::from(nth_prime(i));
        let mut e = 0u64;
        loop {
            let (q, r) = (&rest / &p, &rest % &p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e == 0 {
            return Err(SeqError::NotASeqCode(c.to_string()));
        }
        out.push(e - 1);
        i += 1;
    }
    Ok(out)
}

fn decode_u128(mut v: u128) -> Option<FinSeq> {
    if v == 0 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while v != 1 {
        let p = nth_prime(i) as u128;
        let mut e = 0u64;
        while v.is_multiple_of(p) {
            v /= p;
            e += 1;
        }
        if e == 0 {
            return None;
        }
        out.push(e - 1);
        i += 1;
    }
    Some(out)
}

pub fn prime_decode(c: &BigUint) -> Result<FinSeq, SeqError> {
    prime_decode_raw(c)
}

// ---------------------------------------------------------------------------
// the sorted table of Seq

struct SeqTable {
    bound: u128,
    codes: Vec<u128>,
}

static TABLE: OnceLock<RwLock<SeqTable>> = OnceLock::new();

fn table() -> &'static RwLock<SeqTable> {
    TABLE.get_or_init(|| {
        let bound = 1u128 << 16;
        RwLock::new(SeqTable {
            bound,
            codes: enumerate_seq(bound),
        })
    })
}

/// All elements of `Seq` that are `<= bound`, sorted.
fn enumerate_seq(bound: u128) -> Vec<u128> {
    // the product of the first 40 primes exceeds every u128
    let ps = primes(40);
    let mut out = Vec::new();
    let mut stack: Vec<(u128, usize)> = vec![(1, 0)];
    while let Some((v, i)) = stack.pop() {
        out.push(v);
        let p = ps[i] as u128;
        let mut w = v;
        while let Some(next) = w.checked_mul(p) {
            if next > bound {
                break;
            }
            w = next;
            stack.push((w, i + 1));
        }
    }
    out.sort_unstable();
    out
}

fn grow_table_to(len: usize) {
    let lock = table();
    if lock.read().expect("seq table poisoned").codes.len() >= len {
        return;
    }
    let mut t = lock.write().expect("seq table poisoned");
    while t.codes.len() < len {
        // the count grows roughly like bound^(1/4)
        let ratio = len as f64 / t.codes.len().max(1) as f64;
        let factor = ratio.powi(4).clamp(16.0, 2f64.powi(100));
        let bound = (t.bound as f64 * factor).min(2f64.powi(127)) as u128;
        assert!(bound > t.bound, "Seq table bound overflow");
        t.codes = enumerate_seq(bound);
        t.bound = bound;
    }
}

/// The `n`-th element of `Seq`.
pub fn seq_element(n: u64) -> u128 {
    let n = usize::try_from(n).expect("index exceeds usize");
    grow_table_to(n + 1);
    table().read().expect("seq table poisoned").codes[n]
}

/// `rank(code)` if it is below [`RANK_HORIZON`], `None` otherwise. The code
/// must be an element of `Seq`.
pub fn rank_capped(code: u128) -> Option<u64> {
    grow_table_to(RANK_HORIZON as usize);
    let t = table().read().expect("seq table poisoned");
    let h = RANK_HORIZON as usize;
    if code > t.codes[h - 1] {
        return None;
    }
    Some(t.codes.partition_point(|&c| c < code) as u64)
}

/// Same as [`rank_capped`] for codes given as words; the code of a long word
/// overflows 128 bits long before its rank reaches the horizon's end.
pub fn word_rank_capped(w: &[u64]) -> Option<u64> {
    prime_code_u128(w).and_then(rank_capped)
}

/// Number of elements of `Seq` strictly below `c`, i.e. `φ(c)`.
pub fn seq_rank(c: &SeqCode) -> u64 {
    match c.to_u128() {
        Some(v) => {
            let t = table().read().expect("seq table poisoned");
            if v <= t.bound {
                return t.codes.partition_point(|&x| x < v) as u64;
            }
            drop(t);
            count_below(v)
        }
        None => count_below_big(c.value()),
    }
}

fn count_below(c: u128) -> u64 {
    let mut count = 0u64;
    let mut stack: Vec<(u128, usize)> = vec![(1, 0)];
    while let Some((v, i)) = stack.pop() {
        if v >= c {
            continue;
        }
        count += 1;
        let p = nth_prime(i) as u128;
        let mut w = v;
        while let Some(next) = w.checked_mul(p) {
            if next >= c {
                break;
            }
            w = next;
            stack.push((w, i + 1));
        }
    }
    count
}

fn count_below_big(c: &BigUint) -> u64 {
    let mut count = 0u64;
    let mut stack: Vec<(BigUint, usize)> = vec![(BigUint::one(), 0)];
    while let Some((v, i)) = stack.pop() {
        if &v >= c {
            continue;
        }
        count += 1;
        let p = BigUint::from(nth_prime(i));
        let mut w = v * &p;
        while &w < c {
            stack.push((w.clone(), i + 1));
            w *= &p;
        }
    }
    count
}

/// Checked wrapper around [`seq_rank`] for raw integers.
pub fn seq_rank_of(c: &BigUint) -> Result<u64, SeqError> {
    let code = SeqCode::new(c.clone())?;
    Ok(seq_rank(&code))
}

// ---------------------------------------------------------------------------
// psi and the dense sequences

pub fn psi(d: Dimension, n: u64) -> FinSeq {
    match d {
        Dimension::Omega => decode_u128(seq_element(n)).expect("table holds only Seq codes"),
        Dimension::Finite(k) => psi_finite(k, n),
    }
}

fn psi_finite(d: u64, n: u64) -> FinSeq {
    if n == 0 {
        return Vec::new();
    }
    let d128 = d as u128;
    let mut r = (n - 1) as u128;
    let mut len = 1u32;
    loop {
        match d128.checked_pow(len) {
            Some(block) if r >= block => {
                r -= block;
                len += 1;
            }
            _ => break,
        }
    }
    let mut out = vec![0u64; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = (r % d128) as u64;
        r /= d128;
    }
    out
}

/// Position of `w` in the enumeration `psi(Finite(d), ·)`.
pub fn psi_finite_index(d: u64, w: &[u64]) -> u128 {
    let d = d as u128;
    let mut before: u128 = 1;
    let mut block: u128 = 1;
    for _ in 1..w.len() {
        block *= d;
        before += block;
    }
    let mut r: u128 = 0;
    for &x in w {
        r = r * d + x as u128;
    }
    if w.is_empty() {
        0
    } else {
        before + r
    }
}

/// `s^d_n = psi(d, n)` padded with zeros to length `n`.
pub fn dense_seq(d: Dimension, n: u64) -> FinSeq {
    let mut w = psi(d, n);
    let n = usize::try_from(n).expect("length exceeds usize");
    debug_assert!(w.len() <= n);
    w.resize(n, 0);
    w
}

/// Whether `s` is an initial segment of `psi(n)·0^(n-|psi(n)|)`, given `p = psi(n)`.
fn prefix_of_padded(s: &[u64], p: &[u64], n: usize) -> bool {
    if s.len() > n {
        return false;
    }
    let k = p.len().min(s.len());
    s[..k] == p[..k] && s[k..].iter().all(|&x| x == 0)
}

/// The least `n >= m` with `s` an initial segment of `s^d_n`, or the first
/// `n` at which the omega search gave up.
pub fn try_density_witness(d: Dimension, s: &[u64], m: u64) -> Result<u64, u64> {
    let start = m.max(s.len() as u64);
    match d {
        Dimension::Finite(k) => {
            let mut n = start;
            loop {
                let p = psi_finite(k, n);
                if prefix_of_padded(s, &p, n as usize) {
                    return Ok(n);
                }
                n += 1;
            }
        }
        Dimension::Omega => {
            // psi(n) must extend the zero-stripped word, so its code bounds n below
            let h = strip_zeros(s);
            let floor = match word_rank_capped(h) {
                Some(r) => r,
                None => return Err(RANK_HORIZON),
            };
            let mut n = start.max(floor);
            while n < RANK_HORIZON {
                let p = psi(Dimension::Omega, n);
                if prefix_of_padded(s, &p, n as usize) {
                    return Ok(n);
                }
                n += 1;
            }
            Err(RANK_HORIZON)
        }
    }
}

/// The least `n >= m` with `s` an initial segment of `s^d_n`.
///
/// Panics when the witness lies beyond [`RANK_HORIZON`]; use
/// [`try_density_witness`] to get that case as a value.
pub fn density_witness(d: Dimension, s: &[u64], m: u64) -> u64 {
    match try_density_witness(d, s, m) {
        Ok(n) => n,
        Err(h) => panic!("density witness for {} beyond rank {h}", fmt_word(s)),
    }
}

/// The indices `N` with `s^ω_N = 0^N`, in increasing order, below the horizon.
pub fn zero_indices() -> Vec<u64> {
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let w = vec![0u64; j];
        match word_rank_capped(&w) {
            Some(r) => out.push(r),
            None => return out,
        }
        j += 1;
    }
}

/// Whether `s^ω_n` is the all-zero word.
pub fn is_zero_index(n: u64) -> bool {
    psi(Dimension::Omega, n).iter().all(|&x| x == 0)
}
