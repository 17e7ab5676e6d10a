//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use baire_chromatic::adversary::*;
use baire_chromatic::digraph::*;
use baire_chromatic::hom::*;
use baire_chromatic::level::*;
use baire_chromatic::point::*;
use baire_chromatic::seq::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

// Seq codes below 100 and the words they code, from trial-division filtering.
const CODES: [u64; 19] = [
    1, 2, 4, 6, 8, 12, 16, 18, 24, 30, 32, 36, 48, 54, 60, 64, 72, 90, 96,
];
const PSI: [&[u64]; 19] = [
    &[],
    &[0],
    &[1],
    &[0, 0],
    &[2],
    &[1, 0],
    &[3],
    &[0, 1],
    &[2, 0],
    &[0, 0, 0],
    &[4],
    &[1, 1],
    &[3, 0],
    &[0, 2],
    &[1, 0, 0],
    &[5],
    &[2, 1],
    &[0, 1, 0],
    &[4, 0],
];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coding() -> Outcome {
    let mut trips = 0;
    for len in 0..=6 {
        for w in words(6, len) {
            let back = prime_decode(prime_code(&w).value()).map_err(|e| e.to_string())?;
            ensure(back == w, || format!("round trip of {}", fmt_word(&w)))?;
            trips += 1;
        }
    }
    for n in 0..19 {
        ensure(seq_element(n as u64) == CODES[n] as u128, || {
            format!("code {n}")
        })?;
        ensure(psi(Dimension::Omega, n as u64) == PSI[n], || {
            format!("psi({n})")
        })?;
    }
    for d in [Dimension::Finite(2), Dimension::Finite(3), Dimension::Omega] {
        for n in 0..2000 {
            ensure(dense_seq(d, n).len() as u64 == n, || format!("|s^{d}_{n}|"))?;
            ensure(psi(d, n).len() as u64 <= n, || format!("|psi_{d}({n})|"))?;
        }
    }
    Ok(format!("{trips} round trips"))
}

fn density() -> Outcome {
    let mut calls = 0;
    for d in [Dimension::Finite(2), Dimension::Omega] {
        let letters = match d {
            Dimension::Finite(k) => k.min(4),
            Dimension::Omega => 4,
        };
        for len in 0..=5 {
            for s in words(letters, len) {
                for m in 0..=50 {
                    let n = try_density_witness(d, &s, m).map_err(|h| {
                        format!("no witness for {} from {m} below {h}", fmt_word(&s))
                    })?;
                    ensure(n >= m && is_prefix(&s, &dense_seq(d, n)), || {
                        format!("bad witness {n} for {} m={m} d={d}", fmt_word(&s))
                    })?;
                    calls += 1;
                }
            }
        }
    }
    Ok(format!("{calls} witnesses"))
}

fn trees() -> Outcome {
    let mut graphs = 0;
    for l in 0..=3 {
        for k in min_alphabet(l).max(2)..=5 {
            let g = LevelGraph::build(l, k).map_err(|e| e.to_string())?;
            ensure(g.is_tree(), || format!("l={l} k={k} not a tree"))?;
            ensure(g.edges().len() + 1 == g.vertices().len(), || {
                format!("l={l} k={k} edge count")
            })?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} graphs"))
}

fn paths() -> Outcome {
    let mut pairs = 0u64;
    for l in 0..=2 {
        for k in min_alphabet(l).max(2)..=4 {
            let g = LevelGraph::build(l, k).map_err(|e| e.to_string())?;
            for s in g.vertices() {
                for t in g.vertices() {
                    let a = g.unique_path(s, t).map_err(|e| e.to_string())?;
                    let b = g.bfs_path(s, t).map_err(|e| e.to_string())?;
                    ensure(a == b, || {
                        format!("l={l} k={k} {} -> {}", fmt_word(s), fmt_word(t))
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn homomorphism() -> Outcome {
    let mut ctx = HomContext::new(0);
    let mut rng = StdRng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(0..3u64);
        let tl = rng.gen_range(0..(3 - n as usize));
        let tw: FinSeq = (0..=tl).map(|_| rng.gen_range(0..5)).collect();
        let drop = n + 1 + tw.len() as u64;
        let tail = TailPoint::new(tw, ctx.base().clone(), drop);
        let w = AdWitness { n, tail };
        let ok = ctx
            .verify_tuple_maps(&w, 8, 40)
            .map_err(|e| format!("case {case}: {e}"))?;
        ensure(ok, || format!("case {case}: n={} tail={}", w.n, w.tail))?;
    }
    Ok(format!(
        "200 witnesses, {} hit choices",
        ctx.choice_log().len()
    ))
}

fn eq_sets() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for l in 0..=2 {
        for k in min_alphabet(l).max(2)..=4 {
            let g = LevelGraph::build(l, k).map_err(|e| e.to_string())?;
            let e = eq_construction(l, k).map_err(|e| e.to_string())?;
            let mut fibers: BTreeMap<Fiber, Vec<u64>> = BTreeMap::new();
            for (u, v, f) in g.edges() {
                let qs = fibers.entry(f.clone()).or_default();
                if qs.is_empty() {
                    qs.push(e.q[u]);
                }
                qs.push(e.q[v]);
            }
            for (f, qs) in &fibers {
                ensure(fiber_claim_holds(qs), || {
                    format!("l={l} k={k} fiber {f:?} q={qs:?}")
                })?;
            }
            for s in g.vertices() {
                checked += 1;
                if e.q[s] != q_level(s).q {
                    mismatches.push(format!(
                        "l={l} k={k} {}: {} vs {}",
                        fmt_word(s),
                        e.q[s],
                        q_level(s).q
                    ));
                }
            }
        }
    }
    if mismatches.is_empty() {
        Ok(format!("{checked} vertices"))
    } else {
        Err(format!(
            "q differs on {}/{checked} vertices, first {}",
            mismatches.len(),
            mismatches[0]
        ))
    }
}

fn adversary() -> Outcome {
    let cfg = AdversaryConfig::default();
    let mut notes = Vec::new();
    let cases: [(Builtin, &str); 3] = [
        (Builtin::PrependZero, "HomomorphismViolation"),
        (Builtin::Broken, "NonMonotone"),
        (Builtin::Lagged(2), "Diagonalized"),
    ];
    for (b, want) in cases {
        let mut h = OracleHandle::new(b, 100_000);
        let v = run_adversary(&mut h, &cfg);
        match &v {
            Verdict::ContractViolation { kind, evidence } => {
                ensure(kind.to_string() == want, || format!("{b:?}: got {kind}"))?;
                ensure(replay(*kind, evidence, &mut b.clone()), || {
                    format!("{b:?}: replay")
                })?;
            }
            Verdict::Diagonalized {
                stabilized,
                counts,
                image_prefix,
                beta_prefix,
                ..
            } => {
                ensure(want == "Diagonalized", || format!("{b:?}: diagonalized"))?;
                ensure(
                    counts.len() >= 3 && counts.iter().all(|c| c == stabilized),
                    || format!("{b:?}: counts {counts:?}"),
                )?;
                let r = b.answer(beta_prefix);
                ensure(
                    is_prefix(&r, image_prefix) || is_prefix(image_prefix, &r),
                    || format!("{b:?}: reply off the predicted image"),
                )?;
            }
            other => return Err(format!("{b:?}: {}", other.tag())),
        }
        notes.push(format!("{b:?}={}", v.tag()));
    }
    Ok(notes.join(" "))
}

fn parity_proper(spec: &TruncationSpec) -> bool {
    enumerate_edges(spec).iter().all(|e| {
        let p = |v: &FinSeq| v.iter().sum::<u64>() % 2;
        e.vertices.iter().any(|v| p(v) != p(&e.vertices[0]))
    })
}

/// Every coloring with `c` colors, for windows of at most 16 vertices.
fn exhaustive(spec: &TruncationSpec) -> u64 {
    let verts = spec.vertices();
    let idx: BTreeMap<&FinSeq, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edges: Vec<Vec<usize>> = enumerate_edges(spec)
        .iter()
        .map(|e| e.vertices.iter().map(|v| idx[v]).collect())
        .collect();
    (1u64..)
        .find(|&c| {
            (0..c.pow(verts.len() as u32)).any(|code| {
                let col: Vec<u64> = (0..verts.len())
                    .map(|i| code / c.pow(i as u32) % c)
                    .collect();
                edges.iter().all(|e| e.iter().any(|&v| col[v] != col[e[0]]))
            })
        })
        .expect("finite window")
}

fn chromatic() -> Outcome {
    let mut windows = 0;
    for d in [2, 3] {
        for depth in 1..=6 {
            let spec = TruncationSpec::finite(d, depth).map_err(|e| e.to_string())?;
            let chi = brute_chromatic(&spec, DEFAULT_VERTEX_BOUND).map_err(|e| e.to_string())?;
            ensure(chi == 2, || format!("d={d} D={depth}: {chi}"))?;
            ensure(
                !enumerate_edges(&spec).is_empty() && parity_proper(&spec),
                || format!("d={d} D={depth}: certificate"),
            )?;
            if spec.vertex_count().unwrap() <= 16 {
                ensure(exhaustive(&spec) == chi, || {
                    format!("d={d} D={depth}: exhaustive")
                })?;
            }
            let mut parts = vec![BTreeSet::new(), BTreeSet::new()];
            for v in spec.vertices() {
                parts[(v.iter().sum::<u64>() % 2) as usize].insert(v);
            }
            let c = coloring_from_partition(&spec, &parts).map_err(|e| e.to_string())?;
            ensure(
                verify_coloring(&spec, &c).map_err(|e| e.to_string())?,
                || format!("d={d} D={depth}: partition coloring"),
            )?;
            windows += 1;
        }
    }
    Ok(format!("{windows} windows"))
}

fn hits() -> Outcome {
    let naive = |w: &[u64]| {
        (0..w.len())
            .filter(|&n| w[n] == 0 && w[..n] == dense_seq(Dimension::Omega, n as u64)[..])
            .count() as u64
    };
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..1000 {
        let len = rng.gen_range(0..=30);
        let w: FinSeq = (0..len)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    0
                } else {
                    rng.gen_range(0..4)
                }
            })
            .collect();
        ensure(hit_count(&w) == naive(&w), || {
            format!("N[{}]", fmt_word(&w))
        })?;
    }
    ensure(hit_count(&[0, 0, 0, 0]) == 3, || "N[(0,0,0,0)]".into())?;
    ensure(hit_count(&[1, 0, 0]) == 1, || "N[(1,0,0)]".into())?;
    Ok("1000 words".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("coding", 5, coding),
        ("density", 5, density),
        ("level trees", 10, trees),
        ("path oracle", 30, paths),
        ("class homomorphism", 60, homomorphism),
        ("E_q oracle", 30, eq_sets),
        ("adversary", 60, adversary),
        ("truncation chromatic numbers", 60, chromatic),
        ("hit counting", 1, hits),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(budget) => {
                Err(format!("took {took:.2?}, budget {budget}s"))
            }
            o => o,
        };
        match outcome {
            Ok(note) => println!("criterion {}: PASS {name} ({note}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({why}; {took:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
