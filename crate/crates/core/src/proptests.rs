//! Property tests over random generator instances.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::{best_insertion, SeqEval, State};
use crate::ils::construct;
use crate::io::{generate, parse_instance, parse_solution, write_instance, write_solution, GeneratorConfig};
use crate::model::{validate, Instance, WindowMode};
use crate::rnr::{recreate, ruin, RecreateContext, RnrParams};
use crate::stats::route_stats;

fn instance(seed: u64, requests: usize, buffer: i64) -> Instance {
    generate(&GeneratorConfig {
        requests,
        vehicles: 1 + requests / 5,
        seed,
        buffer,
        horizon: 1800,
        side: 3000.0,
        window_mode: WindowMode::Flexible,
        ..GeneratorConfig::default()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn concat_is_associative(seed in 0u64..1000, raw in prop::collection::vec(0usize..1000, 3..12), cuts in (1usize..100, 1usize..100)) {
        let inst = instance(seed, 12, 600);
        let seq: Vec<usize> = raw.iter().map(|x| x % inst.num_nodes()).collect();
        let i = 1 + cuts.0 % (seq.len() - 2);
        let j = i + 1 + cuts.1 % (seq.len() - i - 1);
        let part = |s: &[usize]| SeqEval::of_sequence(&inst, s).unwrap();
        let (a, b, c) = (part(&seq[..i]), part(&seq[i..j]), part(&seq[j..]));
        let left = SeqEval::concat(&inst, &SeqEval::concat(&inst, &a, &b), &c);
        let right = SeqEval::concat(&inst, &a, &SeqEval::concat(&inst, &b, &c));
        prop_assert_eq!(left, right);
        prop_assert_eq!(left, part(&seq));
        prop_assert!(left.cap.q_max >= 0 && left.cap.q_max >= left.cap.q_sum);
    }

    #[test]
    fn insertion_keeps_solution_feasible(seed in 0u64..1000, buffer in 0i64..900) {
        let inst = instance(seed, 15, buffer);
        let mut st = State::new(&inst, &crate::model::Solution::empty(&inst));
        for r in 0..inst.num_requests() {
            let best = st.vehicles().iter().filter_map(|&v| best_insertion(&st, r, v)).min_by_key(|i| i.delta);
            if let Some(ins) = best {
                let before = st.cost();
                st.apply(&ins);
                prop_assert_eq!(st.cost(), before + ins.delta);
            }
            prop_assert!(validate(&st.to_solution(), &inst).is_empty());
        }
    }

    #[test]
    fn ruin_recreate_accounts_for_every_request(seed in 0u64..1000) {
        let inst = instance(seed, 40, 300);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = State::new(&inst, &construct(&inst, &mut rng));
        let params = RnrParams::default();
        let ctx = RecreateContext::new(&inst, st.vehicles());
        for _ in 0..5 {
            if st.unassigned().len() < inst.num_requests() {
                let stats = ruin(&mut st, &params, &mut rng);
                prop_assert!(stats.removed.iter().all(|r| st.unassigned().contains(r)));
            }
            recreate(&mut st, &params, &ctx, &mut rng);
            let sol = st.to_solution();
            prop_assert!(validate(&sol, &inst).is_empty());
            let served: usize = sol.routes.iter().map(|r| r.stops().len() / 2).sum();
            prop_assert_eq!(served + sol.unassigned.len(), inst.num_requests());
        }
    }

    #[test]
    fn text_formats_round_trip(seed in 0u64..1000, buffer in 0i64..900) {
        let inst = instance(seed, 10, buffer);
        let back = parse_instance(&write_instance(&inst)).unwrap();
        prop_assert_eq!(write_instance(&back), write_instance(&inst));
        let sol = construct(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        let parsed = parse_solution(&write_solution(&sol), &inst).unwrap();
        prop_assert_eq!(parsed, sol);
    }

    #[test]
    fn route_stats_are_consistent(seed in 0u64..1000) {
        let inst = instance(seed, 20, 600);
        let sol = construct(&inst, &mut ChaCha8Rng::seed_from_u64(seed));
        for r in sol.routes.iter().filter(|r| !r.stops().is_empty()) {
            let s = route_stats(r, &inst);
            prop_assert_eq!(s.requests * 2, r.stops().len());
            prop_assert!(s.width >= 1 && s.width <= s.requests);
            prop_assert!(s.blocks >= 1 && s.blocks <= s.requests);
        }
    }
}
