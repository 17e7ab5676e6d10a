use baire_chromatic::adversary::*;
use baire_chromatic::seq::{is_prefix, FinSeq};
use proptest::prelude::*;

fn check_replay(v: &Verdict, fresh: &mut impl Oracle) {
    if let Verdict::ContractViolation { kind, evidence } = v {
        assert!(replay(*kind, evidence, fresh), "{kind}: {evidence:?}");
    }
}

#[test]
fn builtin_names() {
    for name in Builtin::NAMES {
        assert!(Builtin::from_name(name).is_some());
    }
    assert!(Builtin::from_name("nope").is_none());
}

#[test]
fn replay_rejects_doctored_evidence() {
    let mut h = OracleHandle::new(Builtin::PrependZero, 100_000);
    let Verdict::ContractViolation { kind, mut evidence } =
        run_adversary(&mut h, &AdversaryConfig::default())
    else {
        panic!("expected a violation");
    };
    evidence.pairs[0].1.push(9);
    assert!(!replay(kind, &evidence, &mut Builtin::PrependZero));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lagged_identities_are_diagonalized(lag in 0usize..5) {
        let mut h = OracleHandle::new(Builtin::Lagged(lag), 100_000);
        match run_adversary(&mut h, &AdversaryConfig::default()) {
            Verdict::Diagonalized { stabilized, counts, beta_prefix, image_prefix, .. } => {
                prop_assert!(counts.len() >= 3);
                prop_assert!(counts.iter().all(|&c| c == stabilized));
                let r = Builtin::Lagged(lag).answer(&beta_prefix);
                prop_assert!(is_prefix(&r, &image_prefix) || is_prefix(&image_prefix, &r));
            }
            v => prop_assert!(false, "{v:?}"),
        }
    }

    #[test]
    fn shifted_outputs_are_caught(zeros in 1usize..4, lag in 0usize..3) {
        let oracle = move |w: &[u64]| -> FinSeq {
            let mut out = vec![0; zeros];
            out.extend_from_slice(&w[..w.len().saturating_sub(lag)]);
            out
        };
        let mut h = OracleHandle::new(oracle, 100_000);
        let v = run_adversary(&mut h, &AdversaryConfig::default());
        let mut fresh = oracle;
        check_replay(&v, &mut fresh);
        let is_violation = matches!(v, Verdict::ContractViolation { .. });
        prop_assert!(is_violation);
    }

    #[test]
    fn accepted_replies_are_monotone(table in prop::collection::vec(prop::collection::vec(0u64..3, 0..6), 16), queries in prop::collection::vec(prop::collection::vec(0u64..2, 0..5), 1..20)) {
        let table2 = table.clone();
        let oracle = move |w: &[u64]| -> FinSeq { table2[w.len() * 3 % 16 + w.iter().sum::<u64>() as usize % 3].clone() };
        let mut h = OracleHandle::new(oracle, 1000);
        for q in &queries {
            if h.probe(q).is_err() {
                break;
            }
        }
        let log = h.log();
        for (q1, a1) in log {
            for (q2, a2) in log {
                if is_prefix(q1, q2) {
                    prop_assert!(is_prefix(a1, a2));
                }
            }
        }
    }

    #[test]
    fn fuel_is_respected(fuel in 0u64..40) {
        let mut h = OracleHandle::new(Builtin::Lagged(3), fuel);
        let v = run_adversary(&mut h, &AdversaryConfig::default());
        prop_assert!(h.log().len() as u64 <= fuel);
        if fuel < 10 {
            let exhausted = matches!(v, Verdict::FuelExhausted { .. });
            prop_assert!(exhausted);
        }
    }
}

#[test]
fn block_sums_are_all_zero_indices_and_patterns_extend() {
    use baire_chromatic::seq::{dense_seq, Dimension};
    for b in [Builtin::Identity, Builtin::Lagged(2), Builtin::Lagged(4)] {
        let mut h = OracleHandle::new(b, 100_000);
        let Verdict::Diagonalized { state, .. } =
            run_adversary(&mut h, &AdversaryConfig::default())
        else {
            panic!("{b:?} not diagonalized");
        };
        for &n in &state.block_sums {
            assert_eq!(dense_seq(Dimension::Omega, n), vec![0; n as usize]);
        }
        let r = state.s_list.len();
        for code in 0..3u64.pow(r as u32) {
            let t: Vec<u64> = (0..r).map(|j| code / 3u64.pow(j as u32) % 3).collect();
            let mut input = Vec::new();
            let mut want = Vec::new();
            for (j, &tj) in t.iter().enumerate() {
                input.push(tj);
                input.extend(std::iter::repeat_n(0, state.alpha[j] as usize));
                want.extend_from_slice(&state.s_list[j]);
                want.push(tj);
            }
            input.extend(std::iter::repeat_n(0, 8));
            let reply = b.answer(&input);
            assert!(is_prefix(&want, &reply), "{b:?} t={t:?}");
        }
    }
}
