//! Points of Baire space given by finite data: generated base points and
//! finite modifications of them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::PointError;
use crate::seq::{
    self, fmt_word, psi, strip_zeros, try_density_witness, word_rank_capped, Dimension, FinSeq,
    RANK_HORIZON,
};

/// Which schedule produced a base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseKind {
    /// Runs every target `(l, m)`; never eventually periodic.
    Canonical,
    /// Runs the first `targets` targets and continues with zeros forever.
    Truncated { targets: usize },
}

/// What is known about the letters after the materialized head.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frontier {
    ZerosForever,
    /// Zero up to (excluding) this absolute coordinate, unknown beyond.
    ZerosUntil(u64),
    Unknown,
}

#[derive(Debug)]
pub struct BasePoint {
    seed: u64,
    kind: BaseKind,
    head: FinSeq,
    hit_log: Vec<(u64, u64)>,
    frontier: Frontier,
}

/// The `j`-th target of the diagonal enumeration of pairs `(l, m)`.
pub fn target(j: u64) -> (u64, u64) {
    let mut d = 0u64;
    while (d + 1) * (d + 2) / 2 <= j {
        d += 1;
    }
    let l = j - d * (d + 1) / 2;
    (l, d - l)
}

type Registry = Mutex<HashMap<(u64, BaseKind), Arc<BasePoint>>>;

static BASES: OnceLock<Registry> = OnceLock::new();

impl BasePoint {
    /// The canonical base point for `seed`: the targets are taken in diagonal
    /// order starting at index `seed`.
    pub fn canonical(seed: u64) -> Arc<BasePoint> {
        Self::cached(seed, BaseKind::Canonical)
    }

    /// The first `targets` steps of the canonical schedule, then zeros.
    pub fn truncated(seed: u64, targets: usize) -> Arc<BasePoint> {
        Self::cached(seed, BaseKind::Truncated { targets })
    }

    /// The constant zero sequence.
    pub fn zero() -> Arc<BasePoint> {
        Self::truncated(0, 0)
    }

    fn cached(seed: u64, kind: BaseKind) -> Arc<BasePoint> {
        let reg = BASES.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = reg
            .lock()
            .expect("base registry poisoned")
            .get(&(seed, kind))
        {
            return Arc::clone(b);
        }
        let b = Arc::new(Self::generate(seed, kind));
        let mut map = reg.lock().expect("base registry poisoned");
        Arc::clone(map.entry((seed, kind)).or_insert(b))
    }

    fn generate(seed: u64, kind: BaseKind) -> BasePoint {
        let budget = match kind {
            BaseKind::Canonical => usize::MAX,
            BaseKind::Truncated { targets } => targets,
        };
        let mut w: FinSeq = Vec::new();
        let mut log = Vec::new();
        let mut frontier = Frontier::ZerosForever;
        let mut j = seed;
        while log.len() < budget {
            let (l, m) = target(j);
            let lower = m.max(w.len() as u64);
            let h = strip_zeros(&w);
            // once the code of h is out of reach the witness is exactly
            // rank(I(h)), so every later coordinate below it stays zero
            if word_rank_capped(h).is_none() {
                frontier = Frontier::ZerosUntil(RANK_HORIZON);
                break;
            }
            match try_density_witness(Dimension::Omega, &w, lower) {
                Ok(n) => {
                    w = seq::dense_seq(Dimension::Omega, n);
                    w.push(l);
                    log.push((n, l));
                }
                Err(_) => {
                    frontier = Frontier::Unknown;
                    break;
                }
            }
            j += 1;
        }
        if let BaseKind::Truncated { .. } = kind {
            frontier = Frontier::ZerosForever;
        }
        BasePoint {
            seed,
            kind,
            head: w,
            hit_log: log,
            frontier,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn head(&self) -> &[u64] {
        &self.head
    }

    pub fn hit_log(&self) -> &[(u64, u64)] {
        &self.hit_log
    }

    pub fn frontier(&self) -> Frontier {
        self.frontier
    }

    /// Letters equal to zero from some point on.
    pub fn eventually_zero(&self) -> bool {
        matches!(self.kind, BaseKind::Truncated { .. })
    }

    /// First coordinate whose letter is not known.
    pub fn known_until(&self) -> Option<u64> {
        match self.frontier {
            Frontier::ZerosForever => None,
            Frontier::ZerosUntil(e) => Some(e.max(self.head.len() as u64)),
            Frontier::Unknown => Some(self.head.len() as u64),
        }
    }

    pub fn letter(&self, k: u64) -> Option<u64> {
        if let Some(&x) = usize::try_from(k).ok().and_then(|i| self.head.get(i)) {
            return Some(x);
        }
        match self.known_until() {
            Some(e) if k >= e => None,
            _ => Some(0),
        }
    }

    pub fn same_as(&self, other: &BasePoint) -> bool {
        self.seed == other.seed && self.kind == other.kind
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BaseKind::Canonical => write!(f, "base({})", self.seed),
            BaseKind::Truncated { targets } => write!(f, "base({};{targets})", self.seed),
        }
    }
}

/// `word` followed by the base shifted left by `drop`.
#[derive(Clone, Debug)]
pub struct TailPoint {
    word: FinSeq,
    base: Arc<BasePoint>,
    drop: u64,
}

impl TailPoint {
    /// Builds the point and brings it to canonical form.
    pub fn new(word: FinSeq, base: Arc<BasePoint>, drop: u64) -> TailPoint {
        let mut x = TailPoint { word, base, drop };
        x.canonicalize();
        x
    }

    /// The base point itself.
    pub fn of_base(base: Arc<BasePoint>) -> TailPoint {
        TailPoint {
            word: Vec::new(),
            base,
            drop: 0,
        }
    }

    /// `s` followed by the base from coordinate `|s|` on.
    pub fn modification(s: FinSeq, base: Arc<BasePoint>) -> TailPoint {
        let d = s.len() as u64;
        TailPoint::new(s, base, d)
    }

    pub fn word(&self) -> &[u64] {
        &self.word
    }

    pub fn base(&self) -> &Arc<BasePoint> {
        &self.base
    }

    pub fn drop(&self) -> u64 {
        self.drop
    }

    /// `drop - |word|`: coordinate `k` past the word reads base coordinate `k + offset`.
    pub fn offset(&self) -> i128 {
        self.drop as i128 - self.word.len() as i128
    }

    fn canonicalize(&mut self) {
        while let Some(&last) = self.word.last() {
            if self.drop == 0 || self.base.letter(self.drop - 1) != Some(last) {
                break;
            }
            self.word.pop();
            self.drop -= 1;
        }
    }

    pub fn is_canonical(&self) -> bool {
        let mut y = self.clone();
        y.canonicalize();
        y.word.len() == self.word.len()
    }

    pub fn try_eval(&self, k: u64) -> Result<u64, PointError> {
        if let Some(&x) = usize::try_from(k).ok().and_then(|i| self.word.get(i)) {
            return Ok(x);
        }
        let b = self.drop + (k - self.word.len() as u64);
        self.base.letter(b).ok_or(PointError::BeyondHorizon(k))
    }

    /// Letter at coordinate `k`. Panics past the base's certified horizon.
    pub fn eval(&self, k: u64) -> u64 {
        match self.try_eval(k) {
            Ok(x) => x,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn prefix(&self, n: u64) -> Result<FinSeq, PointError> {
        (0..n).map(|k| self.try_eval(k)).collect()
    }

    /// Coordinates at or past this one are zero until [`Self::zeros_until`].
    pub fn explicit_len(&self) -> u64 {
        let head = self.base.head().len() as u64;
        self.word.len() as u64 + head.saturating_sub(self.drop)
    }

    /// End of the known zero run after [`Self::explicit_len`]; `None` means forever.
    pub fn zeros_until(&self) -> Option<u64> {
        self.base.known_until().map(|e| {
            let w = self.word.len() as u64;
            if e >= self.drop {
                w + (e - self.drop)
            } else {
                w
            }
        })
    }

    /// Whether both denote the same infinite sequence.
    pub fn same_point(&self, other: &TailPoint) -> Result<bool, PointError> {
        if !self.base.same_as(&other.base) {
            return Err(PointError::DifferentBases);
        }
        if !self.base.eventually_zero() && self.offset() != other.offset() {
            return Ok(false);
        }
        let upto = if self.base.eventually_zero() {
            self.explicit_len().max(other.explicit_len())
        } else {
            self.word.len().max(other.word.len()) as u64
        };
        for k in 0..upto {
            if self.try_eval(k)? != other.try_eval(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First coordinate where the two points are known to differ.
    pub fn first_difference(&self, other: &TailPoint) -> Result<Option<u64>, PointError> {
        if !self.base.same_as(&other.base) {
            return Err(PointError::DifferentBases);
        }
        let upto = self.explicit_len().max(other.explicit_len());
        for k in 0..upto {
            if self.try_eval(k)? != other.try_eval(k)? {
                return Ok(Some(k));
            }
        }
        if self.same_point(other)? {
            return Ok(None);
        }
        // both run through zeros of a shifted aperiodic base; the difference
        // lies past the materialized part
        Err(PointError::BeyondHorizon(upto))
    }

    /// The point agreeing with `self` except at coordinate `n`, where it is `p`.
    pub fn substitute(&self, n: u64, p: u64) -> TailPoint {
        let mut word = self.word.clone();
        let mut drop = self.drop;
        let n_us = usize::try_from(n).expect("coordinate exceeds usize");
        if n_us < word.len() {
            word[n_us] = p;
        } else {
            let extra = n - word.len() as u64;
            for k in word.len() as u64..n {
                word.push(self.eval(k));
            }
            word.push(p);
            drop += extra + 1;
        }
        TailPoint::new(word, Arc::clone(&self.base), drop)
    }

    /// `f^i_n`: turns the prefix `s^ω_n 0` into `s^ω_n i`.
    pub fn block_shift(&self, n: u64, i: u64) -> Result<TailPoint, PointError> {
        if !is_hit(self, n, 0)? {
            return Err(PointError::PreconditionFailed(format!(
                "prefix of length {} is not s_{n} followed by 0",
                n + 1
            )));
        }
        Ok(self.substitute(n, i))
    }
}

impl fmt::Display for TailPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}>>{}", fmt_word(&self.word), self.base, self.drop)
    }
}

/// Whether the two points agree from some coordinate on.
pub fn e0_equivalent(x: &TailPoint, y: &TailPoint) -> Result<bool, PointError> {
    if !x.base.same_as(&y.base) {
        return Err(PointError::DifferentBases);
    }
    if x.base.eventually_zero() {
        return Ok(true);
    }
    Ok(x.offset() == y.offset())
}

/// Whether `s^ω_n l` is an initial segment of `x`.
pub fn is_hit(x: &TailPoint, n: u64, l: u64) -> Result<bool, PointError> {
    if x.try_eval(n)? != l {
        return Ok(false);
    }
    let p = psi(Dimension::Omega, n);
    for k in 0..n {
        let want = p.get(k as usize).copied().unwrap_or(0);
        if x.try_eval(k)? != want {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hits `n` of letter `l` with `from <= n < to` inside an explicit word:
/// `s^ω_n l ⊑ w`.
fn scan_hits(w: &[u64], l: u64, from: usize, to: usize, first_only: bool) -> Vec<u64> {
    let mut out = Vec::new();
    let mut last_nz: Option<usize> = None;
    let to = to.min(w.len());
    for n in 0..to {
        if n >= from && w[n] == l {
            let p = psi(Dimension::Omega, n as u64);
            let covers = match last_nz {
                Some(q) => p.len() > q,
                None => true,
            };
            if covers && w[..p.len()] == p[..] {
                out.push(n as u64);
                if first_only {
                    return out;
                }
            }
        }
        if w[n] != 0 {
            last_nz = Some(n);
        }
    }
    out
}

/// `N[s]`: the number of `n` with `s^ω_n 0` an initial segment of `s`.
pub fn hit_count(s: &[u64]) -> u64 {
    scan_hits(s, 0, 0, s.len(), false).len() as u64
}

/// Hit positions in the zero run that follows the explicit part of `x`.
/// They are the ranks of the zero-stripped explicit word extended by zeros.
fn zero_run_hits(
    x: &TailPoint,
    from: u64,
    to: u64,
    first_only: bool,
) -> Result<Vec<u64>, PointError> {
    let e = x.explicit_len();
    let end = x.zeros_until().map_or(to, |z| z.min(to));
    let lo = from.max(e);
    let mut out = Vec::new();
    if lo >= end {
        return Ok(out);
    }
    let explicit = x.prefix(e)?;
    let mut w: FinSeq = strip_zeros(&explicit).to_vec();
    loop {
        let r = match word_rank_capped(&w) {
            Some(r) => r,
            None => {
                if end > RANK_HORIZON {
                    return Err(PointError::BeyondHorizon(RANK_HORIZON));
                }
                return Ok(out);
            }
        };
        if r >= end {
            return Ok(out);
        }
        if r >= lo && r >= w.len() as u64 {
            out.push(r);
            if first_only {
                return Ok(out);
            }
        }
        w.push(0);
    }
}

/// Length of the explicit prefix worth scanning letter by letter.
fn scan_len(x: &TailPoint) -> u64 {
    let e = x.explicit_len();
    match x.zeros_until() {
        Some(z) if z <= e => e,
        _ => e + 1,
    }
}

/// All `n` with `m <= n < depth` and `s^ω_n l` an initial segment of `x`.
pub fn g_hits(x: &TailPoint, l: u64, m: u64, depth: u64) -> Result<Vec<u64>, PointError> {
    let scan_to = scan_len(x).min(depth);
    let words = x.prefix(scan_to)?;
    let mut out = scan_hits(&words, l, m as usize, scan_to as usize, false);
    if depth > scan_to {
        if let Some(z) = x.zeros_until() {
            if depth > z {
                return Err(PointError::BeyondHorizon(z));
            }
        }
        if l == 0 {
            out.extend(zero_run_hits(x, m.max(scan_to), depth, false)?);
        }
    }
    Ok(out)
}

/// The least `n >= from` with `s^ω_n l` an initial segment of `x`.
pub fn least_hit(x: &TailPoint, l: u64, from: u64) -> Result<u64, PointError> {
    let scan_to = scan_len(x);
    let words = x.prefix(scan_to)?;
    if let Some(&n) = scan_hits(&words, l, from as usize, scan_to as usize, true).first() {
        return Ok(n);
    }
    let limit = x.zeros_until().unwrap_or(RANK_HORIZON).min(RANK_HORIZON);
    if l == 0 {
        if let Some(&n) = zero_run_hits(x, from.max(scan_to), limit, true)?.first() {
            return Ok(n);
        }
    }
    Err(PointError::NoHit {
        letter: l,
        from,
        searched_to: limit,
    })
}
