//! The map `u` on one E₀-class, built by induction on the modification
//! length and, inside a level, along the fiber-anchored paths of `G_{l+1}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::digraph::{tuple_from_witness, witness_from_tuple, AdWitness};
use crate::error::{HomError, LevelError};
use crate::level::{decompose, edge_fiber, path_between, root, Fiber, LevelGraph};
use crate::point::{e0_equivalent, least_hit, BasePoint, TailPoint};
use crate::seq::{dense_seq, fmt_word, Dimension, FinSeq};

/// Number of schedule targets kept in the image base.
pub const IMAGE_TARGETS: usize = 3;

/// One choice of hit position made while extending `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    /// Length of the modification word being imaged.
    pub level: usize,
    /// `None` for the steps anchored at the root.
    pub fiber: Option<Fiber>,
    pub n: u64,
}

#[derive(Debug)]
pub struct HomContext {
    base: Arc<BasePoint>,
    image_base: TailPoint,
    memo: HashMap<FinSeq, TailPoint>,
    choice_log: Vec<Choice>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QLevel {
    pub q: u64,
}

impl HomContext {
    /// Domain base `canonical(seed)`, image base its truncation to
    /// [`IMAGE_TARGETS`] targets.
    pub fn new(seed: u64) -> HomContext {
        Self::with_bases(
            BasePoint::canonical(seed),
            BasePoint::truncated(seed, IMAGE_TARGETS),
        )
    }

    pub fn with_bases(base: Arc<BasePoint>, image: Arc<BasePoint>) -> HomContext {
        let image_base = TailPoint::of_base(image);
        let mut memo = HashMap::new();
        memo.insert(Vec::new(), image_base.clone());
        HomContext {
            base,
            image_base,
            memo,
            choice_log: Vec::new(),
        }
    }

    pub fn base(&self) -> &Arc<BasePoint> {
        &self.base
    }

    pub fn image_base(&self) -> &TailPoint {
        &self.image_base
    }

    pub fn choice_log(&self) -> &[Choice] {
        &self.choice_log
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn beta(&self, k: usize) -> Result<u64, HomError> {
        self.base
            .letter(k as u64)
            .ok_or(HomError::Point(crate::error::PointError::BeyondHorizon(
                k as u64,
            )))
    }

    /// The canonical modification word of `w·(β − β|w|)`.
    pub fn canon(&self, w: &[u64]) -> FinSeq {
        TailPoint::modification(w.to_vec(), Arc::clone(&self.base))
            .word()
            .to_vec()
    }

    /// `u(i(β − β|1))`.
    pub fn extend_one(&mut self, i: u64) -> Result<TailPoint, HomError> {
        self.image_of(&self.canon(&[i]))
    }

    /// Image of a point of the class of β.
    pub fn u_apply(&mut self, x: &TailPoint) -> Result<TailPoint, HomError> {
        if !x.base().same_as(&self.base) {
            return Err(HomError::DifferentBases);
        }
        if x.offset() != 0 {
            return Err(HomError::NotCanonical(format!(
                "{x} is not a finite modification of the base"
            )));
        }
        self.image_of(x.word())
    }

    /// Image of the point with canonical modification word `w`.
    pub fn image_of(&mut self, w: &[u64]) -> Result<TailPoint, HomError> {
        if let Some(y) = self.memo.get(w) {
            return Ok(y.clone());
        }
        if self.canon(w).len() != w.len() {
            return Err(HomError::NotCanonical(fmt_word(w)));
        }
        let len = w.len();
        let (y, choice) = if len == 1 {
            let b0 = self.beta(0)?;
            let n0 = least_hit(&self.image_base, b0, 0)?;
            (
                self.image_base.substitute(n0, w[0]),
                Choice {
                    level: 1,
                    fiber: None,
                    n: n0,
                },
            )
        } else {
            let (s, k) = (&w[..len - 1], w[len - 1]);
            let r = root(len - 1);
            if s == r.as_slice() {
                let prev = self.image_of(&self.canon(&r))?;
                let letter = self.beta(len - 1)?;
                let n1 = least_hit(&prev, letter, 0)?;
                (
                    prev.substitute(n1, k),
                    Choice {
                        level: len,
                        fiber: None,
                        n: n1,
                    },
                )
            } else {
                let (fiber, anchor) = anchor_of(s);
                let mut aw = anchor.clone();
                aw.push(k);
                let bp = self.image_of(&self.canon(&aw))?;
                let at = fiber.n as usize;
                let nq = least_hit(&bp, anchor[at], 0)?;
                (
                    bp.substitute(nq, s[at]),
                    Choice {
                        level: len,
                        fiber: Some(fiber),
                        n: nq,
                    },
                )
            }
        };
        self.choice_log.push(choice);
        self.memo.insert(w.to_vec(), y.clone());
        Ok(y)
    }

    /// Images of the coordinates `i < arity` of the tuple coded by `w`, then
    /// the membership check of [`image_tuple_ok`].
    pub fn verify_tuple_maps(
        &mut self,
        w: &AdWitness,
        arity: u64,
        depth: u64,
    ) -> Result<bool, HomError> {
        let mut ys = Vec::with_capacity(arity as usize);
        for i in 0..arity {
            let x = tuple_from_witness(Dimension::Omega, w, i).expect("omega admits every index");
            ys.push(self.u_apply(&x)?);
        }
        image_tuple_ok(&self.image_base, &ys, depth)
    }
}

/// Whether `ys` is `(s^ω_m i δ)_i` for one `m` and one `δ`, checked on the
/// representations and again letter by letter below `depth`, and every
/// member is tail-equivalent to `image_base`.
pub fn image_tuple_ok(
    image_base: &TailPoint,
    ys: &[TailPoint],
    depth: u64,
) -> Result<bool, HomError> {
    let arity = ys.len();
    let wit = match witness_from_tuple(Dimension::Omega, ys, arity) {
        Ok(Some(wit)) => wit,
        Ok(None) => return Ok(false),
        Err(_) => return Err(HomError::DifferentBases),
    };
    let s = dense_seq(Dimension::Omega, wit.n);
    for (i, y) in ys.iter().enumerate() {
        for k in 0..depth {
            let want = if k < wit.n {
                s[k as usize]
            } else if k == wit.n {
                i as u64
            } else {
                wit.tail.try_eval(k - wit.n - 1)?
            };
            if y.try_eval(k)? != want {
                return Ok(false);
            }
        }
        if !e0_equivalent(y, image_base)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Last fiber group on the path from the root to `s`, with its entry vertex.
pub fn anchor_of(s: &[u64]) -> (Fiber, FinSeq) {
    let p = path_between(&root(s.len()), s);
    decompose(&p).pop().expect("s differs from the root")
}

/// Number of fibers on the path from the root to `s`.
pub fn q_level(s: &[u64]) -> QLevel {
    let p = path_between(&root(s.len()), s);
    QLevel {
        q: decompose(&p).len() as u64,
    }
}

/// The sets `E_q` over a truncated level, with the induced `q` values.
#[derive(Clone, Debug)]
pub struct EqConstruction {
    /// `φ`: length-lex rank with the root swapped to 0.
    pub phi: BTreeMap<FinSeq, u64>,
    /// `E_0, E_1, ...` as sets of `φ` values.
    pub sets: Vec<BTreeSet<u64>>,
    /// Per step: the chosen `r`, its neighbor `p` in `E_q` and the added fiber.
    pub steps: Vec<(FinSeq, FinSeq, Fiber)>,
    pub q: BTreeMap<FinSeq, u64>,
}

impl EqConstruction {
    /// The member of `s`'s fiber that was already in `E_q` when the fiber was added.
    pub fn anchor(&self, s: &[u64]) -> Option<(Fiber, FinSeq)> {
        let q = *self.q.get(s)?;
        if q == 0 {
            return None;
        }
        let (_, p, f) = &self.steps[q as usize - 1];
        Some((f.clone(), p.clone()))
    }
}

pub fn eq_construction(l: usize, k: u64) -> Result<EqConstruction, LevelError> {
    let g = LevelGraph::build(l, k)?;
    let r0 = root(l + 1);
    let mut phi: BTreeMap<FinSeq, u64> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i as u64))
        .collect();
    let root_rank = phi[&r0];
    let first = g.vertices()[0].clone();
    phi.insert(first, root_rank);
    phi.insert(r0.clone(), 0);
    let by_phi: BTreeMap<u64, FinSeq> = phi.iter().map(|(v, &i)| (i, v.clone())).collect();

    let mut inside: BTreeSet<u64> = BTreeSet::from([0]);
    let mut q = BTreeMap::from([(r0, 0u64)]);
    let mut sets = vec![inside.clone()];
    let mut steps = Vec::new();
    while inside.len() < by_phi.len() {
        let (r, p) = by_phi
            .iter()
            .filter(|(i, _)| !inside.contains(i))
            .find_map(|(_, v)| {
                g.neighbors(v)
                    .expect("vertex")
                    .iter()
                    .find(|w| inside.contains(&phi[*w]))
                    .map(|w| (v.clone(), w.clone()))
            })
            .expect("the truncated graph is connected");
        let f = edge_fiber(&p, &r).expect("neighbors span an edge");
        let step = steps.len() as u64 + 1;
        for i in 0..k {
            let m = f.member(i);
            if inside.insert(phi[&m]) {
                q.insert(m, step);
            }
        }
        steps.push((r, p, f));
        sets.push(inside.clone());
    }
    Ok(EqConstruction {
        phi,
        sets,
        steps,
        q,
    })
}

/// Whether one fiber has a unique member with strictly smaller `q`, the
/// others sharing one value.
pub fn fiber_claim_holds(qs: &[u64]) -> bool {
    let Some(&min) = qs.iter().min() else {
        return false;
    };
    let rest: Vec<u64> = qs.iter().copied().filter(|&x| x != min).collect();
    qs.iter().filter(|&&x| x == min).count() == 1 && rest.windows(2).all(|w| w[0] == w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::witness_from_tuple;
    use crate::point::is_hit;

    #[test]
    fn empty_modification_is_image_base() {
        let mut ctx = HomContext::new(0);
        let b = TailPoint::of_base(ctx.base().clone());
        let y = ctx.u_apply(&b).unwrap();
        assert!(y.same_point(ctx.image_base()).unwrap());
    }

    #[test]
    fn extend_one_family() {
        let mut ctx = HomContext::new(0);
        let b0 = ctx.base().letter(0).unwrap();
        assert!(ctx
            .extend_one(b0)
            .unwrap()
            .same_point(ctx.image_base())
            .unwrap());
        let ys: Vec<_> = (0..6).map(|i| ctx.extend_one(i).unwrap()).collect();
        let w = witness_from_tuple(Dimension::Omega, &ys, 6)
            .unwrap()
            .unwrap();
        let n0 = least_hit(ctx.image_base(), b0, 0).unwrap();
        assert_eq!(w.n, n0);
        assert_eq!(n0, 0);
        assert!(image_tuple_ok(ctx.image_base(), &ys, 40).unwrap());
    }

    #[test]
    fn root_step_at_level_two() {
        let mut ctx = HomContext::new(0);
        let b1 = ctx.base().letter(1).unwrap();
        let ys: Vec<_> = (0..5)
            .map(|k| {
                let x = TailPoint::modification(vec![0, k], ctx.base().clone());
                ctx.u_apply(&x).unwrap()
            })
            .collect();
        let prev = ctx.image_of(&ctx.canon(&[0])).unwrap();
        let n1 = least_hit(&prev, b1, 0).unwrap();
        assert!(is_hit(&prev, n1, b1).unwrap());
        let w = witness_from_tuple(Dimension::Omega, &ys, 5)
            .unwrap()
            .unwrap();
        assert_eq!(w.n, n1);
    }

    #[test]
    fn corrupted_images_fail() {
        let mut ctx = HomContext::new(0);
        let mut ys: Vec<_> = (0..4).map(|i| ctx.extend_one(i).unwrap()).collect();
        assert!(image_tuple_ok(ctx.image_base(), &ys, 40).unwrap());
        ys[2] = ys[2].substitute(30, 7);
        assert!(!image_tuple_ok(ctx.image_base(), &ys, 40).unwrap());
    }

    #[test]
    fn offsets_are_rejected() {
        let mut ctx = HomContext::new(0);
        let shifted = TailPoint::new(vec![], ctx.base().clone(), 1);
        assert!(matches!(
            ctx.u_apply(&shifted),
            Err(HomError::NotCanonical(_))
        ));
        let other = TailPoint::of_base(BasePoint::canonical(3));
        assert_eq!(ctx.u_apply(&other).unwrap_err(), HomError::DifferentBases);
    }

    #[test]
    fn q_levels() {
        assert_eq!(q_level(&[0]).q, 0);
        assert_eq!(q_level(&[5]).q, 1);
        assert_eq!(q_level(&root(3)).q, 0);
        assert_eq!(q_level(&[1, 1]).q, 3);
    }

    #[test]
    fn eq_sets_start_at_root_and_cover() {
        let e = eq_construction(1, 3).unwrap();
        assert_eq!(e.sets[0], BTreeSet::from([0]));
        assert_eq!(e.phi[&root(2)], 0);
        assert_eq!(e.sets.last().unwrap().len(), 9);
        assert_eq!(e.q.len(), 9);
    }

    #[test]
    fn fiber_q_shape() {
        assert!(fiber_claim_holds(&[1, 2, 2, 2]));
        assert!(!fiber_claim_holds(&[1, 1, 2]));
        assert!(!fiber_claim_holds(&[0, 2, 3]));
        assert!(fiber_claim_holds(&[4, 3]));
    }

    #[test]
    fn anchors_agree_with_eq_construction() {
        for (l, k) in [(0, 3), (1, 2), (1, 4), (2, 3), (2, 4)] {
            let e = eq_construction(l, k).unwrap();
            for s in e.q.keys() {
                if *s == root(l + 1) {
                    continue;
                }
                assert_eq!(
                    e.anchor(s),
                    Some(anchor_of(s)),
                    "l={l} k={k} s={}",
                    fmt_word(s)
                );
            }
        }
    }
}
