//! The diagonalization against a claimed continuous homomorphism from Baire
//! space into 𝔾, run against a monotone prefix oracle under a query budget.

use std::collections::BTreeMap;
use std::fmt;

use crate::point::hit_count;
use crate::seq::{dense_seq, fmt_word, is_prefix, zero_indices, Dimension, FinSeq};

/// Anything that maps finite input words to finite output words.
pub trait Oracle {
    fn reply(&mut self, w: &[u64]) -> Result<FinSeq, String>;
}

impl<F: FnMut(&[u64]) -> FinSeq> Oracle for F {
    fn reply(&mut self, w: &[u64]) -> Result<FinSeq, String> {
        Ok(self(w))
    }
}

/// The in-process oracles shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `u(γ) = γ`.
    Identity,
    /// The identity answering only once `lag` more letters are known.
    Lagged(usize),
    /// `u(γ) = 0γ`.
    PrependZero,
    /// Replies shrink as the input grows.
    Broken,
}

impl Builtin {
    pub const NAMES: [&'static str; 5] = ["identity", "stub", "lagged", "prepend-zero", "broken"];

    pub fn from_name(name: &str) -> Option<Builtin> {
        match name {
            "identity" => Some(Builtin::Identity),
            "stub" | "lagged" => Some(Builtin::Lagged(2)),
            "prepend-zero" => Some(Builtin::PrependZero),
            "broken" => Some(Builtin::Broken),
            _ => None,
        }
    }

    pub fn answer(&self, w: &[u64]) -> FinSeq {
        match *self {
            Builtin::Identity => w.to_vec(),
            Builtin::Lagged(lag) => w[..w.len().saturating_sub(lag)].to_vec(),
            Builtin::PrependZero => {
                let mut out = Vec::with_capacity(w.len() + 1);
                out.push(0);
                out.extend_from_slice(w);
                out
            }
            Builtin::Broken => vec![0; 8usize.saturating_sub(w.len())],
        }
    }
}

impl Oracle for Builtin {
    fn reply(&mut self, w: &[u64]) -> Result<FinSeq, String> {
        Ok(self.answer(w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NonMonotone,
    NoProgress,
    HomomorphismViolation,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::NonMonotone => "NonMonotone",
            ViolationKind::NoProgress => "NoProgress",
            ViolationKind::HomomorphismViolation => "HomomorphismViolation",
        })
    }
}

/// What a set of queries must show to count as a breach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Breach {
    /// Two queries, the first a prefix of the second, with replies not in that relation.
    Extension,
    /// Replies that stop growing over all listed queries.
    Stalled,
    /// The replies to `0^σ 0 0^p` and `0^σ 1 0^p` (then spot checks `0^σ i 0^q`)
    /// do not split as `s^ω_m 0`, `s^ω_m 1`, ... above `expected`.
    Pattern { sigma: usize, expected: FinSeq },
    /// The reply is not compatible with `expected`.
    Incompatible { expected: FinSeq },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub pairs: Vec<(FinSeq, FinSeq)>,
    pub breach: Breach,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractionState {
    pub alpha: FinSeq,
    pub s_list: Vec<FinSeq>,
    pub block_sums: Vec<u64>,
}

impl ExtractionState {
    /// `s_0 0 s_1 0 ... s_{n-1} 0`.
    pub fn image_so_far(&self) -> FinSeq {
        let mut out = Vec::new();
        for s in &self.s_list {
            out.extend_from_slice(s);
            out.push(0);
        }
        out
    }

    pub fn last_sum(&self) -> u64 {
        self.block_sums.last().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Diagonalized {
        beta: FinSeq,
        /// `β(0)0^{α(0)}β(1)0^{α(1)}...`
        beta_prefix: FinSeq,
        /// `s_0β(0)s_1β(1)...s_r`
        image_prefix: FinSeq,
        /// `N[s_0]`, shared by every completed block.
        stabilized: u64,
        /// Hit counts after each block, all equal to `stabilized`.
        counts: Vec<u64>,
        depth: usize,
        state: ExtractionState,
    },
    ContractViolation {
        kind: ViolationKind,
        evidence: Evidence,
    },
    FuelExhausted {
        state: ExtractionState,
    },
    /// No letter below the bound keeps the hit count.
    NoSafeLetter {
        p: usize,
        counts: Vec<u64>,
        state: ExtractionState,
    },
    /// The oracle channel failed or the search left the computable range.
    Aborted {
        reason: String,
        state: ExtractionState,
    },
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Diagonalized { .. } => "Diagonalized",
            Verdict::ContractViolation { .. } => "ContractViolation",
            Verdict::FuelExhausted { .. } => "FuelExhausted",
            Verdict::NoSafeLetter { .. } => "NoSafeLetter",
            Verdict::Aborted { .. } => "Aborted",
        }
    }

    /// One-line payload for the `V` line of the wire protocol.
    pub fn payload(&self) -> String {
        match self {
            Verdict::Diagonalized {
                beta_prefix,
                image_prefix,
                stabilized,
                depth,
                ..
            } => format!(
                "beta_prefix={} image_prefix={} N={stabilized} rounds={depth}",
                fmt_word(beta_prefix),
                fmt_word(image_prefix)
            ),
            Verdict::ContractViolation { kind, evidence } => {
                let q: Vec<String> = evidence
                    .pairs
                    .iter()
                    .map(|(q, a)| format!("{}->{}", fmt_word(q), fmt_word(a)))
                    .collect();
                format!("{kind} {}", q.join(" "))
            }
            Verdict::FuelExhausted { state } => format!("rounds={}", state.s_list.len()),
            Verdict::NoSafeLetter { p, counts, .. } => {
                format!("p={p} counts={}", fmt_word(counts))
            }
            Verdict::Aborted { reason, .. } => reason.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeError {
    FuelExhausted,
    NonMonotone(Evidence),
    Channel(String),
}

/// Oracle plus cache, budget and the monotone contract check.
pub struct OracleHandle<O> {
    oracle: O,
    fuel: u64,
    cache: BTreeMap<FinSeq, FinSeq>,
    log: Vec<(FinSeq, FinSeq)>,
}

impl<O: Oracle> OracleHandle<O> {
    pub fn new(oracle: O, fuel: u64) -> Self {
        OracleHandle {
            oracle,
            fuel,
            cache: BTreeMap::new(),
            log: Vec::new(),
        }
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    /// Fresh queries in the order they were sent.
    pub fn log(&self) -> &[(FinSeq, FinSeq)] {
        &self.log
    }

    pub fn into_inner(self) -> O {
        self.oracle
    }

    pub fn probe(&mut self, w: &[u64]) -> Result<FinSeq, ProbeError> {
        if let Some(r) = self.cache.get(w) {
            return Ok(r.clone());
        }
        if self.fuel == 0 {
            return Err(ProbeError::FuelExhausted);
        }
        self.fuel -= 1;
        let r = self.oracle.reply(w).map_err(ProbeError::Channel)?;
        // cached prefixes of w
        for k in 0..w.len() {
            if let Some(a) = self.cache.get(&w[..k]) {
                if !is_prefix(a, &r) {
                    return Err(ProbeError::NonMonotone(Evidence {
                        pairs: vec![(w[..k].to_vec(), a.clone()), (w.to_vec(), r)],
                        breach: Breach::Extension,
                    }));
                }
            }
        }
        // cached extensions of w sort right after it
        for (q, a) in self.cache.range(w.to_vec()..) {
            if !is_prefix(w, q) {
                break;
            }
            if !is_prefix(&r, a) {
                return Err(ProbeError::NonMonotone(Evidence {
                    pairs: vec![(w.to_vec(), r.clone()), (q.clone(), a.clone())],
                    breach: Breach::Extension,
                }));
            }
        }
        self.cache.insert(w.to_vec(), r.clone());
        self.log.push((w.to_vec(), r.clone()));
        Ok(r)
    }
}

/// Knobs of one adversary session.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdversaryConfig {
    pub rounds: usize,
    pub bound: u64,
    /// Consecutive refinements without reply growth before `NoProgress`.
    pub stall: usize,
    /// Extra refinements allowed for the spot checks at `i = 2, 3`.
    pub spot_extra: usize,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        AdversaryConfig {
            rounds: 4,
            bound: 64,
            stall: 256,
            spot_extra: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    Fuel,
    Violation(ViolationKind, Evidence),
    Aborted(String),
}

impl From<ProbeError> for StepError {
    fn from(e: ProbeError) -> Self {
        match e {
            ProbeError::FuelExhausted => StepError::Fuel,
            ProbeError::NonMonotone(ev) => StepError::Violation(ViolationKind::NonMonotone, ev),
            ProbeError::Channel(m) => StepError::Aborted(m),
        }
    }
}

fn input(sigma: usize, i: u64, p: usize) -> FinSeq {
    let mut w = vec![0; sigma];
    w.push(i);
    w.resize(sigma + 1 + p, 0);
    w
}

fn split_point(a: &[u64], b: &[u64]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

/// Whether replies `r0`, `r1` (and the spot replies) fit `s^ω_m i` above `expected`.
fn pattern_ok(r0: &[u64], r1: &[u64], spots: &[(u64, &[u64])], expected: &[u64]) -> Option<usize> {
    let m = split_point(r0, r1)?;
    let s = dense_seq(Dimension::Omega, m as u64);
    if r0[..m] != s[..] || r0[m] != 0 || r1[m] != 1 || !is_prefix(expected, &s) {
        return None;
    }
    for &(i, r) in spots {
        if r.len() > m && (r[..m] != s[..] || r[m] != i) {
            return None;
        }
    }
    Some(m)
}

/// One round of the extraction: finds `m`, the modulus `p`, `s_n` and `α(n)`.
pub fn extract_step<O: Oracle>(
    h: &mut OracleHandle<O>,
    st: &ExtractionState,
    cfg: &AdversaryConfig,
) -> Result<ExtractionState, StepError> {
    let sigma = st.last_sum() as usize;
    let expected = st.image_so_far();
    let mut p = 0usize;
    let mut best = 0usize;
    let mut since_growth = 0usize;
    let mut stalled: Vec<(FinSeq, FinSeq)> = Vec::new();
    let (m, r0, r1, q0, q1) = loop {
        let (q0, q1) = (input(sigma, 0, p), input(sigma, 1, p));
        let r0 = h.probe(&q0)?;
        let r1 = h.probe(&q1)?;
        if split_point(&r0, &r1).is_some() {
            break (split_point(&r0, &r1).expect("checked"), r0, r1, q0, q1);
        }
        let len = r0.len().max(r1.len());
        if len > best {
            best = len;
            since_growth = 0;
            stalled.clear();
        } else {
            since_growth += 1;
        }
        stalled.push((q0, r0));
        if since_growth >= cfg.stall {
            return Err(StepError::Violation(
                ViolationKind::NoProgress,
                Evidence {
                    pairs: stalled,
                    breach: Breach::Stalled,
                },
            ));
        }
        p += 1;
    };
    let mut pairs = vec![(q0, r0.clone()), (q1, r1.clone())];
    let fail = |pairs: Vec<(FinSeq, FinSeq)>| {
        StepError::Violation(
            ViolationKind::HomomorphismViolation,
            Evidence {
                pairs,
                breach: Breach::Pattern {
                    sigma,
                    expected: expected.clone(),
                },
            },
        )
    };
    if pattern_ok(&r0, &r1, &[], &expected).is_none() {
        return Err(fail(pairs));
    }
    for i in [2u64, 3] {
        for extra in 0..=cfg.spot_extra {
            let q = input(sigma, i, p + extra);
            let r = h.probe(&q)?;
            if r.len() > m {
                let ok = pattern_ok(&r0, &r1, &[(i, &r)], &expected).is_some();
                pairs.push((q, r));
                if !ok {
                    return Err(fail(pairs));
                }
                break;
            }
        }
    }
    let s_m = dense_seq(Dimension::Omega, m as u64);
    let s_n = s_m[expected.len()..].to_vec();
    let need = (sigma + 1 + p) as u64;
    let z = zero_indices()
        .into_iter()
        .find(|&z| z >= need)
        .ok_or_else(|| StepError::Aborted(format!("no all-zero index >= {need} in range")))?;
    let mut next = st.clone();
    next.alpha.push(z - sigma as u64 - 1);
    next.s_list.push(s_n);
    next.block_sums.push(z);
    Ok(next)
}

/// `β(p)` for each completed `p`: the least letter below `bound` keeping
/// `N[s_0β(0)...s_pβ(p)s_{p+1}] = N[s_0]`.
pub fn build_beta(st: &ExtractionState, bound: u64) -> Result<FinSeq, (usize, Vec<u64>)> {
    let s = &st.s_list;
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let target = hit_count(&s[0]);
    let mut beta = Vec::new();
    let mut w = s[0].clone();
    for p in 0..s.len() - 1 {
        let mut counts = Vec::new();
        let mut chosen = None;
        for b in 0..bound {
            let mut cand = w.clone();
            cand.push(b);
            cand.extend_from_slice(&s[p + 1]);
            let c = hit_count(&cand);
            if c == target {
                chosen = Some((b, cand));
                break;
            }
            counts.push(c);
        }
        match chosen {
            Some((b, cand)) => {
                beta.push(b);
                w = cand;
            }
            None => return Err((p, counts)),
        }
    }
    Ok(beta)
}

/// Runs `rounds` extraction rounds, builds β and checks the oracle's answer
/// on the diagonal input against the predicted image.
pub fn run_adversary<O: Oracle>(h: &mut OracleHandle<O>, cfg: &AdversaryConfig) -> Verdict {
    let mut st = ExtractionState::default();
    for _ in 0..cfg.rounds {
        match extract_step(h, &st, cfg) {
            Ok(next) => st = next,
            Err(StepError::Fuel) => return Verdict::FuelExhausted { state: st },
            Err(StepError::Violation(kind, evidence)) => {
                return Verdict::ContractViolation { kind, evidence }
            }
            Err(StepError::Aborted(reason)) => return Verdict::Aborted { reason, state: st },
        }
    }
    let beta = match build_beta(&st, cfg.bound) {
        Ok(b) => b,
        Err((p, counts)) => {
            return Verdict::NoSafeLetter {
                p,
                counts,
                state: st,
            }
        }
    };
    let mut beta_prefix = Vec::new();
    let mut image_prefix = st.s_list.first().cloned().unwrap_or_default();
    let mut counts = Vec::new();
    for (p, &b) in beta.iter().enumerate() {
        beta_prefix.push(b);
        beta_prefix.extend(std::iter::repeat_n(0, st.alpha[p] as usize));
        image_prefix.push(b);
        image_prefix.extend_from_slice(&st.s_list[p + 1]);
        counts.push(hit_count(&image_prefix));
    }
    // the answer on the diagonal input must stay compatible with the prediction
    let predicted_len = image_prefix.len() - st.s_list.last().map_or(0, |s| s.len());
    let predicted = image_prefix[..predicted_len].to_vec();
    let mut q = beta_prefix.clone();
    for _ in 0..=cfg.spot_extra {
        let r = match h.probe(&q) {
            Ok(r) => r,
            Err(ProbeError::FuelExhausted) => return Verdict::FuelExhausted { state: st },
            Err(ProbeError::NonMonotone(evidence)) => {
                return Verdict::ContractViolation {
                    kind: ViolationKind::NonMonotone,
                    evidence,
                }
            }
            Err(ProbeError::Channel(reason)) => return Verdict::Aborted { reason, state: st },
        };
        if !is_prefix(&r, &predicted) && !is_prefix(&predicted, &r) {
            return Verdict::ContractViolation {
                kind: ViolationKind::HomomorphismViolation,
                evidence: Evidence {
                    pairs: vec![(q, r)],
                    breach: Breach::Incompatible {
                        expected: predicted,
                    },
                },
            };
        }
        if r.len() >= predicted.len() {
            break;
        }
        q.push(0);
    }
    Verdict::Diagonalized {
        stabilized: st.s_list.first().map_or(0, |s| hit_count(s)),
        beta,
        beta_prefix,
        image_prefix,
        counts,
        depth: st.s_list.len(),
        state: st,
    }
}

/// Replays a violation against a fresh oracle: every recorded query must get
/// the recorded reply, and the replies must show the recorded breach.
pub fn replay<O: Oracle>(kind: ViolationKind, evidence: &Evidence, oracle: &mut O) -> bool {
    for (q, a) in &evidence.pairs {
        match oracle.reply(q) {
            Ok(r) if r == *a => {}
            _ => return false,
        }
    }
    let pairs = &evidence.pairs;
    match (&evidence.breach, kind) {
        (Breach::Extension, ViolationKind::NonMonotone) => pairs.iter().any(|(q1, a1)| {
            pairs
                .iter()
                .any(|(q2, a2)| is_prefix(q1, q2) && !is_prefix(a1, a2))
        }),
        (Breach::Stalled, ViolationKind::NoProgress) => {
            let first = pairs.first().map_or(0, |(_, a)| a.len());
            pairs.len() > 1 && pairs.iter().all(|(_, a)| a.len() <= first)
        }
        (Breach::Pattern { sigma, expected }, ViolationKind::HomomorphismViolation) => {
            if pairs.len() < 2 {
                return false;
            }
            let shaped = pairs.iter().all(|(q, _)| {
                q.len() > *sigma
                    && q[..*sigma].iter().all(|&x| x == 0)
                    && q[sigma + 1..].iter().all(|&x| x == 0)
            });
            let (r0, r1) = (&pairs[0].1, &pairs[1].1);
            let spots: Vec<(u64, &[u64])> = pairs[2..]
                .iter()
                .map(|(q, r)| (q[*sigma], r.as_slice()))
                .collect();
            shaped
                && pairs[0].0[*sigma] == 0
                && pairs[1].0[*sigma] == 1
                && split_point(r0, r1).is_some()
                && pattern_ok(r0, r1, &spots, expected).is_none()
        }
        (Breach::Incompatible { expected }, ViolationKind::HomomorphismViolation) => pairs
            .iter()
            .any(|(_, r)| !is_prefix(r, expected) && !is_prefix(expected, r)),
        _ => false,
    }
}
