mod config;
mod wire;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use baire_chromatic::adversary::{
    replay, run_adversary, AdversaryConfig, Builtin, Oracle, OracleHandle, Verdict,
};
use baire_chromatic::digraph::{
    brute_chromatic, coloring_from_partition, enumerate_edges, is_discrete, verify_coloring,
    AdWitness, Coloring, TruncationSpec, DEFAULT_VERTEX_BOUND,
};
use baire_chromatic::hom::{anchor_of, eq_construction, fiber_claim_holds, q_level, HomContext};
use baire_chromatic::level::{decompose, path_between, root, LevelGraph};
use baire_chromatic::point::{g_hits, hit_count, BasePoint, Frontier, TailPoint};
use baire_chromatic::seq::{
    dense_seq, fmt_word, parse_word, prime_code, prime_decode, psi, seq_rank_of,
    try_density_witness, Dimension, FinSeq,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use config::Config;

#[derive(Parser)]
#[command(
    name = "bchrom",
    version,
    about = "Finite-window tools for the digraphs A_d on Baire space"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Lines, global = true)]
    format: Format,
    /// TOML file with defaults; falls back to $BCHROM_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Lines,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prime coding, ranks and the dense sequences.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Points given as a word followed by a shifted base point.
    #[command(subcommand)]
    Point(PointCmd),
    /// Truncations of the digraph A_d.
    #[command(subcommand)]
    Ad(AdCmd),
    /// The level graphs G_{l+1}.
    #[command(subcommand)]
    Lg(LgCmd),
    /// The map u on one E0-class.
    #[command(subcommand)]
    Hom(HomCmd),
    /// The diagonalization against a presented homomorphism.
    #[command(subcommand)]
    Adv(AdvCmd),
}

#[derive(Subcommand)]
enum SeqCmd {
    Code {
        word: String,
    },
    Decode {
        code: String,
    },
    Rank {
        code: String,
    },
    Psi {
        #[arg(long, default_value = "omega")]
        dim: Dimension,
        #[arg(long)]
        n: u64,
    },
    Dense {
        #[arg(long, default_value = "omega")]
        dim: Dimension,
        #[arg(long)]
        n: u64,
    },
    Witness {
        #[arg(long, default_value = "omega")]
        dim: Dimension,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 0)]
        m: u64,
    },
    /// `n`, `ψ_d(n)` and `s^d_n` for `n < count`.
    Table {
        #[arg(long, default_value = "omega")]
        dim: Dimension,
        #[arg(long, default_value_t = 50)]
        count: u64,
    },
}

#[derive(Args, Clone)]
struct PointArgs {
    #[arg(long, default_value = "[]")]
    word: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Defaults to the word length.
    #[arg(long)]
    drop: Option<u64>,
    /// `canonical`, `zero` or `truncated:<targets>`.
    #[arg(long, default_value = "canonical")]
    base: String,
}

#[derive(Subcommand)]
enum PointCmd {
    Eval {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, conflicts_with = "prefix")]
        k: Option<u64>,
        #[arg(long)]
        prefix: Option<u64>,
    },
    /// Positions `n` in `[from, depth)` with `s^ω_n·letter` a prefix.
    Hits {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 0)]
        letter: u64,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long)]
        depth: Option<u64>,
    },
    /// `N[word]`.
    Nhits { word: String },
    /// Head, hit log and frontier of a base point.
    Base {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        targets: Option<usize>,
        #[arg(long, default_value_t = 16)]
        show: usize,
    },
}

#[derive(Args, Clone, Copy)]
struct WindowArgs {
    #[arg(long)]
    dim: Dimension,
    /// Letter bound; only for `--dim omega`.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    depth: Option<u64>,
}

#[derive(Subcommand)]
enum AdCmd {
    Edges {
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Whether the given vertices contain no hyperedge.
    Discrete {
        #[command(flatten)]
        window: WindowArgs,
        vertices: Vec<String>,
    },
    /// Checks a coloring: a JSON array of parts or an object word -> color.
    Color {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Color by letter-sum parity instead of reading a file.
        #[arg(long, conflicts_with = "file")]
        parity: bool,
    },
    Chromatic {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        vertex_bound: Option<u64>,
    },
}

#[derive(Args, Clone, Copy)]
struct LevelArgs {
    #[arg(long)]
    l: usize,
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Subcommand)]
enum LgCmd {
    Build {
        #[command(flatten)]
        level: LevelArgs,
    },
    TreeCheck {
        #[command(flatten)]
        level: LevelArgs,
    },
    /// The recursive path, checked against search when `--k` is given.
    Path {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        k: Option<u64>,
    },
    Dot {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum HomCmd {
    /// Image of the point `word·(β − β|word|)`.
    Apply {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        word: String,
    },
    /// Maps the tuple `(s^ω_n i tail)_i` and checks the image.
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        tail: String,
        #[arg(long)]
        arity: Option<u64>,
        #[arg(long)]
        depth: Option<u64>,
    },
    /// The E_q sets against the path-based q and anchors.
    EqOracle {
        #[command(flatten)]
        level: LevelArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OracleChoice {
    #[arg(long)]
    builtin: Option<String>,
    /// Shell command speaking the Q/A/V line protocol.
    #[arg(long)]
    oracle: Option<String>,
}

#[derive(Subcommand)]
enum AdvCmd {
    Run {
        #[command(flatten)]
        choice: OracleChoice,
        #[arg(long)]
        rounds: Option<u64>,
        #[arg(long)]
        fuel: Option<u64>,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Serves a builtin oracle over stdin/stdout.
    Oracle {
        #[arg(long)]
        builtin: String,
    },
}

/// What a subcommand prints, in both formats, and whether its check held.
struct Report {
    lines: Vec<String>,
    json: Value,
    ok: bool,
}

impl Report {
    fn one(line: String, json: Value) -> Report {
        Report {
            lines: vec![line],
            json,
            ok: true,
        }
    }
}

type Outcome = Result<Report, String>;

fn word_arg(s: &str) -> Result<FinSeq, String> {
    parse_word(s).map_err(|e| e.to_string())
}

fn positive(name: &str, v: u64) -> Result<u64, String> {
    if v == 0 {
        Err(format!("{name} must be positive"))
    } else {
        Ok(v)
    }
}

fn pick(name: &str, flag: Option<u64>, cfg: Option<u64>, default: u64) -> Result<u64, String> {
    positive(name, flag.or(cfg).unwrap_or(default))
}

fn point_json(x: &TailPoint) -> Value {
    json!({
        "word": x.word(),
        "base_seed": x.base().seed(),
        "base": x.base().to_string(),
        "drop": x.drop(),
    })
}

fn base_of(kind: &str, seed: u64) -> Result<Arc<BasePoint>, String> {
    match kind {
        "canonical" => Ok(BasePoint::canonical(seed)),
        "zero" => Ok(BasePoint::zero()),
        _ => match kind.strip_prefix("truncated:").map(str::parse::<usize>) {
            Some(Ok(t)) => Ok(BasePoint::truncated(seed, t)),
            _ => Err(format!(
                "unknown base {kind:?}; use canonical, zero or truncated:<n>"
            )),
        },
    }
}

fn build_point(p: &PointArgs, cfg: &Config) -> Result<TailPoint, String> {
    let word = word_arg(&p.word)?;
    let seed = p.seed.or(cfg.seed).unwrap_or(0);
    let drop = p.drop.unwrap_or(word.len() as u64);
    Ok(TailPoint::new(word, base_of(&p.base, seed)?, drop))
}

fn seq_cmd(c: SeqCmd) -> Outcome {
    match c {
        SeqCmd::Code { word } => {
            let code = prime_code(&word_arg(&word)?);
            Ok(Report::one(
                code.to_string(),
                json!({ "code": code.to_string() }),
            ))
        }
        SeqCmd::Decode { code } => {
            let v: BigUint = code
                .trim()
                .parse()
                .map_err(|_| format!("bad number {code:?}"))?;
            let w = prime_decode(&v).map_err(|e| e.to_string())?;
            Ok(Report::one(fmt_word(&w), json!({ "word": w })))
        }
        SeqCmd::Rank { code } => {
            let v: BigUint = code
                .trim()
                .parse()
                .map_err(|_| format!("bad number {code:?}"))?;
            let r = seq_rank_of(&v).map_err(|e| e.to_string())?;
            Ok(Report::one(r.to_string(), json!({ "rank": r })))
        }
        SeqCmd::Psi { dim, n } => {
            let w = psi(dim, n);
            Ok(Report::one(fmt_word(&w), json!({ "word": w })))
        }
        SeqCmd::Dense { dim, n } => {
            let w = dense_seq(dim, n);
            Ok(Report::one(fmt_word(&w), json!({ "word": w })))
        }
        SeqCmd::Witness { dim, word, m } => {
            let s = word_arg(&word)?;
            if let Some(&bad) = s.iter().find(|&&x| !dim.admits(x)) {
                return Err(format!("letter {bad} is outside dimension {dim}"));
            }
            let n = try_density_witness(dim, &s, m)
                .map_err(|h| format!("no witness below rank horizon {h}"))?;
            Ok(Report::one(n.to_string(), json!({ "n": n })))
        }
        SeqCmd::Table { dim, count } => {
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            for n in 0..count {
                let (p, s) = (psi(dim, n), dense_seq(dim, n));
                lines.push(format!("{n} {} {}", fmt_word(&p), fmt_word(&s)));
                rows.push(json!({ "n": n, "psi": p, "dense": s }));
            }
            Ok(Report {
                lines,
                json: Value::Array(rows),
                ok: true,
            })
        }
    }
}

fn point_cmd(c: PointCmd, cfg: &Config) -> Outcome {
    match c {
        PointCmd::Eval { point, k, prefix } => {
            let x = build_point(&point, cfg)?;
            match (k, prefix) {
                (Some(k), _) => {
                    let v = x.try_eval(k).map_err(|e| e.to_string())?;
                    Ok(Report::one(
                        v.to_string(),
                        json!({ "point": point_json(&x), "k": k, "value": v }),
                    ))
                }
                (None, n) => {
                    let n = n.unwrap_or(16);
                    let w = x.prefix(n).map_err(|e| e.to_string())?;
                    Ok(Report::one(
                        fmt_word(&w),
                        json!({ "point": point_json(&x), "prefix": w }),
                    ))
                }
            }
        }
        PointCmd::Hits {
            point,
            letter,
            from,
            depth,
        } => {
            let x = build_point(&point, cfg)?;
            let depth = pick("depth", depth, cfg.depth, 40)?;
            let hits = g_hits(&x, letter, from, depth).map_err(|e| e.to_string())?;
            Ok(Report::one(
                fmt_word(&hits),
                json!({ "point": point_json(&x), "hits": hits }),
            ))
        }
        PointCmd::Nhits { word } => {
            let n = hit_count(&word_arg(&word)?);
            Ok(Report::one(n.to_string(), json!({ "count": n })))
        }
        PointCmd::Base {
            seed,
            targets,
            show,
        } => {
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let b = match targets {
                Some(t) => BasePoint::truncated(seed, t),
                None => BasePoint::canonical(seed),
            };
            let frontier = match b.frontier() {
                Frontier::ZerosForever => "zeros-forever".to_string(),
                Frontier::ZerosUntil(z) => format!("zeros-until {z}"),
                Frontier::Unknown => "unknown".to_string(),
            };
            let head = b.head();
            let shown = &head[..head.len().min(show)];
            let hits: Vec<String> = b
                .hit_log()
                .iter()
                .map(|(n, l)| format!("{n}:{l}"))
                .collect();
            let lines = vec![
                format!("base {b}"),
                format!("head-length {}", head.len()),
                format!("head {}", fmt_word(shown)),
                format!("hits {}", hits.join(" ")),
                format!("frontier {frontier}"),
            ];
            let json = json!({
                "base": b.to_string(),
                "seed": seed,
                "head_length": head.len(),
                "head": shown,
                "hit_log": b.hit_log(),
                "frontier": frontier,
            });
            Ok(Report {
                lines,
                json,
                ok: true,
            })
        }
    }
}

fn window(w: WindowArgs, cfg: &Config) -> Result<TruncationSpec, String> {
    let depth = pick("depth", w.depth, cfg.depth, 3)? as usize;
    let k = match w.dim {
        Dimension::Finite(d) => w.k.unwrap_or(d),
        Dimension::Omega => {
            w.k.or(cfg.alphabet)
                .ok_or("--k is required for --dim omega")?
        }
    };
    TruncationSpec::new(w.dim, k, depth).map_err(|e| e.to_string())
}

fn ad_cmd(c: AdCmd, cfg: &Config) -> Outcome {
    match c {
        AdCmd::Edges { window: w } => {
            let spec = window(w, cfg)?;
            let edges = enumerate_edges(&spec);
            let lines = edges
                .iter()
                .map(|e| {
                    let vs: Vec<String> = e.vertices.iter().map(|v| fmt_word(v)).collect();
                    format!("n={} t={} {}", e.n, fmt_word(&e.t), vs.join(" "))
                })
                .collect();
            let json = edges
                .iter()
                .map(|e| json!({ "n": e.n, "t": e.t, "vertices": e.vertices }))
                .collect();
            Ok(Report {
                lines,
                json: Value::Array(json),
                ok: true,
            })
        }
        AdCmd::Discrete {
            window: w,
            vertices,
        } => {
            let spec = window(w, cfg)?;
            let set: BTreeSet<FinSeq> = vertices
                .iter()
                .map(|v| word_arg(v))
                .collect::<Result<_, _>>()?;
            let ok = is_discrete(&spec, &set);
            Ok(Report {
                lines: vec![ok.to_string()],
                json: json!({ "discrete": ok }),
                ok,
            })
        }
        AdCmd::Color {
            window: w,
            file,
            parity,
        } => {
            let spec = window(w, cfg)?;
            let c: Coloring = if parity {
                spec.vertices()
                    .into_iter()
                    .map(|v| {
                        let p = v.iter().sum::<u64>() % 2;
                        (v, p)
                    })
                    .collect()
            } else {
                let path = file.ok_or("give --file or --parity")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                read_coloring(&spec, &text)?
            };
            let ok = verify_coloring(&spec, &c).map_err(|e| e.to_string())?;
            let colors = c.values().collect::<BTreeSet<_>>().len();
            Ok(Report {
                lines: vec![format!("{ok} colors={colors}")],
                json: json!({ "proper": ok, "colors": colors }),
                ok,
            })
        }
        AdCmd::Chromatic {
            window: w,
            vertex_bound,
        } => {
            let spec = window(w, cfg)?;
            let bound = pick(
                "vertex-bound",
                vertex_bound,
                cfg.vertex_bound,
                DEFAULT_VERTEX_BOUND,
            )?;
            let chi = brute_chromatic(&spec, bound).map_err(|e| e.to_string())?;
            Ok(Report::one(chi.to_string(), json!({ "chromatic": chi })))
        }
    }
}

/// Parts as `[["[0,1]", ...], ...]` or colors as `{"[0,1]": 0, ...}`.
fn read_coloring(spec: &TruncationSpec, text: &str) -> Result<Coloring, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let word = |x: &Value| -> Result<FinSeq, String> {
        match x {
            Value::String(s) => word_arg(s),
            other => serde_json::from_value(other.clone()).map_err(|e| e.to_string()),
        }
    };
    match v {
        Value::Array(parts) => {
            let parts: Vec<BTreeSet<FinSeq>> = parts
                .iter()
                .map(|p| match p {
                    Value::Array(ws) => ws.iter().map(word).collect(),
                    _ => Err("each part must be an array of words".to_string()),
                })
                .collect::<Result<_, _>>()?;
            coloring_from_partition(spec, &parts).map_err(|e| e.to_string())
        }
        Value::Object(map) => map
            .iter()
            .map(|(k, c)| {
                let c = c
                    .as_u64()
                    .ok_or_else(|| format!("color of {k} is not a natural"))?;
                Ok((word_arg(k)?, c))
            })
            .collect(),
        _ => Err("expected an array of parts or an object of colors".into()),
    }
}

fn level_graph(a: LevelArgs, cfg: &Config) -> Result<LevelGraph, String> {
    let k = a.k.or(cfg.alphabet).unwrap_or(3);
    LevelGraph::build(a.l, k).map_err(|e| e.to_string())
}

fn lg_cmd(c: LgCmd, cfg: &Config) -> Outcome {
    match c {
        LgCmd::Build { level } => {
            let g = level_graph(level, cfg)?;
            let lines = g
                .edges()
                .iter()
                .map(|(u, v, f)| {
                    format!(
                        "{} {} n={} t={}",
                        fmt_word(u),
                        fmt_word(v),
                        f.n,
                        fmt_word(&f.t)
                    )
                })
                .collect();
            let edges: Vec<Value> = g
                .edges()
                .iter()
                .map(|(u, v, f)| json!({ "center": u, "leaf": v, "n": f.n, "t": f.t }))
                .collect();
            Ok(Report {
                lines,
                json: json!({ "vertices": g.vertices().len(), "edges": edges }),
                ok: true,
            })
        }
        LgCmd::TreeCheck { level } => {
            let g = level_graph(level, cfg)?;
            let ok = g.is_tree();
            let (nv, ne) = (g.vertices().len(), g.edges().len());
            Ok(Report {
                lines: vec![format!("{ok} vertices={nv} edges={ne}")],
                json: json!({ "tree": ok, "vertices": nv, "edges": ne }),
                ok,
            })
        }
        LgCmd::Path { from, to, k } => {
            let (s, t) = (word_arg(&from)?, word_arg(&to)?);
            if s.len() != t.len() || s.is_empty() {
                return Err("endpoints must be nonempty words of one length".into());
            }
            let p = path_between(&s, &t);
            let mut ok = true;
            if let Some(k) = k {
                let g = LevelGraph::build(s.len() - 1, k).map_err(|e| e.to_string())?;
                let b = g.bfs_path(&s, &t).map_err(|e| e.to_string())?;
                ok = b == p;
            }
            let fibers = decompose(&p);
            let mut lines = vec![p.iter().map(|v| fmt_word(v)).collect::<Vec<_>>().join(" ")];
            for (f, entry) in &fibers {
                lines.push(format!(
                    "fiber n={} t={} entry={}",
                    f.n,
                    fmt_word(&f.t),
                    fmt_word(entry)
                ));
            }
            let json = json!({
                "path": p,
                "fibers": fibers.iter().map(|(f, e)| json!({ "n": f.n, "t": f.t, "entry": e })).collect::<Vec<_>>(),
                "matches_search": k.map(|_| ok),
            });
            Ok(Report { lines, json, ok })
        }
        LgCmd::Dot { level, out } => {
            let dot = level_graph(level, cfg)?.to_dot();
            match out {
                Some(path) => {
                    std::fs::write(&path, &dot)
                        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                    Ok(Report::one(
                        format!("wrote {}", path.display()),
                        json!({ "written": path.display().to_string() }),
                    ))
                }
                None => Ok(Report {
                    lines: dot.lines().map(String::from).collect(),
                    json: json!({ "dot": dot }),
                    ok: true,
                }),
            }
        }
    }
}

fn hom_cmd(c: HomCmd, cfg: &Config) -> Outcome {
    match c {
        HomCmd::Apply { seed, word } => {
            let mut ctx = HomContext::new(seed.or(cfg.seed).unwrap_or(0));
            let x = TailPoint::modification(word_arg(&word)?, ctx.base().clone());
            let y = ctx.u_apply(&x).map_err(|e| e.to_string())?;
            let pre = y
                .prefix(y.explicit_len().max(1))
                .map_err(|e| e.to_string())?;
            Ok(Report {
                lines: vec![
                    format!("word {}", fmt_word(y.word())),
                    format!("base {}", y.base()),
                    format!("drop {}", y.drop()),
                ],
                json: json!({ "input": point_json(&x), "image": point_json(&y), "explicit": pre }),
                ok: true,
            })
        }
        HomCmd::Verify {
            seed,
            n,
            tail,
            arity,
            depth,
        } => {
            let mut ctx = HomContext::new(seed.or(cfg.seed).unwrap_or(0));
            let tw = word_arg(&tail)?;
            let drop = n + 1 + tw.len() as u64;
            let tail = TailPoint::new(tw, ctx.base().clone(), drop);
            let arity = pick("arity", arity, cfg.arity, 8)?;
            let depth = pick("depth", depth, cfg.depth, 40)?;
            let ok = ctx
                .verify_tuple_maps(&AdWitness { n, tail }, arity, depth)
                .map_err(|e| e.to_string())?;
            Ok(Report {
                lines: vec![ok.to_string()],
                json: json!({ "maps_into": ok }),
                ok,
            })
        }
        HomCmd::EqOracle { level } => {
            let g = level_graph(level, cfg)?;
            let e = eq_construction(level.l, g.alphabet()).map_err(|e| e.to_string())?;
            let r0 = root(level.l + 1);
            let mut lines = Vec::new();
            let mut rows = Vec::new();
            let (mut q_agree, mut anchors_agree) = (true, true);
            for s in g.vertices() {
                let (qe, ql) = (e.q[s], q_level(s).q);
                let anchor_ok = *s == r0 || e.anchor(s) == Some(anchor_of(s));
                q_agree &= qe == ql;
                anchors_agree &= anchor_ok;
                lines.push(format!(
                    "{} q={qe} q_path={ql} anchor={}",
                    fmt_word(s),
                    if anchor_ok { "ok" } else { "differs" }
                ));
                rows.push(
                    json!({ "vertex": s, "q": qe, "q_path": ql, "anchor_agrees": anchor_ok }),
                );
            }
            let mut claim = true;
            let mut seen = BTreeSet::new();
            for (_, _, f) in g.edges() {
                if seen.insert(f.clone()) {
                    let qs: Vec<u64> = (0..g.alphabet()).map(|i| e.q[&f.member(i)]).collect();
                    claim &= fiber_claim_holds(&qs);
                }
            }
            lines.push(format!(
                "fibers={claim} anchors={anchors_agree} q={q_agree}"
            ));
            let ok = claim && anchors_agree && q_agree;
            Ok(Report {
                lines,
                json: json!({
                    "vertices": rows,
                    "fibers_ok": claim,
                    "anchors_agree": anchors_agree,
                    "q_agree": q_agree,
                }),
                ok,
            })
        }
    }
}

fn verdict_report<O: Oracle>(v: &Verdict, fresh: Option<&mut O>) -> Report {
    let (tag, payload) = (v.tag(), v.payload());
    let mut lines = vec![format!("{tag} {payload}")];
    let mut json = json!({ "verdict": tag, "payload": payload });
    let mut ok = false;
    match v {
        Verdict::Diagonalized {
            beta,
            stabilized,
            counts,
            ..
        } => {
            lines.push(format!("beta {}", fmt_word(beta)));
            lines.push(format!("counts {}", fmt_word(counts)));
            json["beta"] = json!(beta);
            json["stabilized"] = json!(stabilized);
            json["counts"] = json!(counts);
            ok = true;
        }
        Verdict::ContractViolation { kind, evidence } => {
            json["kind"] = json!(kind.to_string());
            json["evidence"] = json!(evidence.pairs);
            if let Some(o) = fresh {
                let replayed = replay(*kind, evidence, o);
                lines.push(format!("replay {replayed}"));
                json["replayed"] = json!(replayed);
                ok = replayed;
            }
        }
        _ => {}
    }
    Report { lines, json, ok }
}

fn adv_cmd(c: AdvCmd, cfg: &Config) -> Outcome {
    match c {
        AdvCmd::Run {
            choice,
            rounds,
            fuel,
            bound,
        } => {
            let acfg = AdversaryConfig {
                rounds: pick("rounds", rounds, cfg.rounds, 4)? as usize,
                bound: pick("bound", bound, cfg.bound, 64)?,
                ..AdversaryConfig::default()
            };
            let fuel = pick("fuel", fuel, cfg.fuel, 100_000)?;
            match (choice.builtin, choice.oracle) {
                (Some(name), _) => {
                    let b = Builtin::from_name(&name).ok_or_else(|| unknown_builtin(&name))?;
                    let mut h = OracleHandle::new(b, fuel);
                    let v = run_adversary(&mut h, &acfg);
                    Ok(verdict_report(&v, Some(&mut b.clone())))
                }
                (None, Some(cmd)) => {
                    let mut h = OracleHandle::new(wire::ProcessOracle::spawn(&cmd)?, fuel);
                    let v = run_adversary(&mut h, &acfg);
                    h.into_inner().finish(v.tag(), &v.payload());
                    // replay against a fresh copy of the external oracle
                    let mut fresh = wire::ProcessOracle::spawn(&cmd)?;
                    let report = verdict_report(&v, Some(&mut fresh));
                    fresh.finish("Replay", "");
                    Ok(report)
                }
                (None, None) => Err("give --builtin or --oracle".into()),
            }
        }
        AdvCmd::Oracle { builtin } => {
            let b = Builtin::from_name(&builtin).ok_or_else(|| unknown_builtin(&builtin))?;
            let stdin = std::io::stdin();
            let v = wire::serve(b, stdin.lock(), std::io::stdout())?;
            let _ = v;
            Ok(Report {
                lines: Vec::new(),
                json: Value::Null,
                ok: true,
            })
        }
    }
}

fn unknown_builtin(name: &str) -> String {
    format!(
        "unknown builtin {name:?}; known: {}",
        Builtin::NAMES.join(", ")
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let serving = matches!(cli.cmd, Cmd::Adv(AdvCmd::Oracle { .. }));
    let outcome = match cli.cmd {
        Cmd::Seq(c) => seq_cmd(c),
        Cmd::Point(c) => point_cmd(c, &cfg),
        Cmd::Ad(c) => ad_cmd(c, &cfg),
        Cmd::Lg(c) => lg_cmd(c, &cfg),
        Cmd::Hom(c) => hom_cmd(c, &cfg),
        Cmd::Adv(c) => adv_cmd(c, &cfg),
    };
    match outcome {
        Ok(r) => {
            if !serving {
                match cli.format {
                    Format::Lines => {
                        for l in &r.lines {
                            println!("{l}");
                        }
                    }
                    Format::Json => println!("{}", r.json),
                }
            }
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
