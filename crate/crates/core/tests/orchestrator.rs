mod common;

use common::*;
use edge_extend::model::{colors_for_order, CompleteGraphIndex, EdgeId, ParameterSet, Preset};
use edge_extend::oracle::*;
use edge_extend::orchestrator::*;

fn relaxed_solve(inst: &Instance, seed: u64) -> Result<Solution, SolveError> {
    solve_instance(inst, Preset::Relaxed, &SolveConfig::seeded(seed))
}

fn params_for(order: usize) -> ParameterSet {
    ParameterSet::relaxed(order.div_ceil(2))
}

#[test]
fn empty_instance_needs_no_corrections() {
    for n in [2, 5, 8] {
        let inst = Instance::empty(2 * n).unwrap();
        let sol = relaxed_solve(&inst, 3).unwrap();
        assert_eq!(sol.source, Source::Pipeline);
        assert!(sol.stats.corrections.is_empty());
        assert_eq!(sol.stats.swaps, 0);
        assert_eq!(Some(&sol.coloring), sol.hprime.as_ref());
        assert!(verify_solution(&inst, &sol.coloring).is_clean());
        audit_solution(&sol, &params_for(2 * n)).unwrap();
    }
}

#[test]
fn agreeing_precolored_edge_takes_no_swaps() {
    let ix = CompleteGraphIndex::new(4).unwrap();
    let e = ix.edge(ix.p(2), ix.q(3));
    let mut hits = 0;
    for seed in 0..20 {
        let base = relaxed_solve(&Instance::empty(8).unwrap(), seed).unwrap();
        let mut inst = Instance::empty(8).unwrap();
        inst.phi.set(e, base.coloring.raw(e)).unwrap();
        let sol = relaxed_solve(&inst, seed).unwrap();
        if sol.hprime.as_ref().unwrap().raw(e) == base.coloring.raw(e) {
            hits += 1;
            assert_eq!(sol.stats.queue_len, 0);
            assert_eq!(sol.stats.swaps, 0);
        }
        assert!(verify_solution(&inst, &sol.coloring).is_clean());
    }
    assert!(hits > 0);
}

#[test]
fn n8_batch_against_oracle() {
    let params = params_for(16);
    let mut ok = 0;
    let mut confirmed = 0;
    let mut corrections = 0;
    for seed in 0..100u64 {
        let mut r = rng(500 + seed);
        let inst = random_instance(16, 1 + seed as usize % 3, 8, &mut r);
        let Ok(sol) = relaxed_solve(&inst, seed) else { continue };
        ok += 1;
        corrections += sol.stats.corrections.len();
        assert!(solves(&inst, &colors_of(&sol.coloring)), "seed {seed}");
        assert!(verify_solution(&inst, &sol.coloring).is_clean());
        audit_solution(&sol, &params).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let cfg = OracleConfig {
            cap: 16,
            node_budget: 2_000_000,
            shuffle: None,
        };
        match oracle_solve_with(&inst, cfg) {
            Ok(OracleOutcome::Feasible(h)) => {
                assert!(solves(&inst, &colors_of(&h)));
                confirmed += 1;
            }
            Ok(OracleOutcome::Infeasible) => panic!("seed {seed}: solved but proven infeasible"),
            Err(OracleError::Budget(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    println!("n=8: {ok}/100 solved, {confirmed} confirmed by the oracle, {corrections} corrections");
    assert!(ok >= 90, "{ok}/100");
    assert_eq!(confirmed, ok);
}

#[test]
fn odd_orders_use_the_mod4_palette() {
    for (p, t) in [(3, 3), (5, 6), (7, 7), (9, 10), (11, 11)] {
        assert_eq!(colors_for_order(p), t);
        let inst = Instance::empty(p).unwrap();
        assert_eq!(inst.colors, t);
        let sol = relaxed_solve(&inst, 1).unwrap();
        assert_eq!(sol.coloring.graph().order(), p);
        assert_eq!(sol.coloring.num_colors(), t);
        assert!(solves(&inst, &colors_of(&sol.coloring)));
        audit_solution(&sol, &params_for(p)).unwrap();
    }
}

#[test]
fn embedding_keeps_edge_ids() {
    let mut r = rng(4);
    let inst = random_instance(7, 3, 5, &mut r);
    let big = embed(&inst);
    assert_eq!(big.order, 8);
    assert_eq!(big.colors, inst.colors);
    for e in inst.graph().edges() {
        assert_eq!(big.phi.get(e), inst.phi.get(e));
        assert_eq!(big.lists.list(e), inst.lists.list(e));
    }
    for e in big.graph().edges().skip(inst.graph().edge_count()) {
        assert!(big.phi.get(e).is_none() && big.lists.list(e).is_empty());
    }
}

#[test]
fn k5_unit_lists_against_oracle() {
    let (mut ok, mut infeasible) = (0, 0);
    for seed in 0..60u64 {
        let mut r = rng(900 + seed);
        let inst = random_instance(5, 1, 4, &mut r);
        let oracle = oracle_solve(&inst).unwrap();
        let cfg = SolveConfig::seeded(seed);
        match solve_odd(&inst, &params_for(5), &cfg) {
            Ok(sol) => {
                ok += 1;
                assert!(oracle.is_feasible(), "seed {seed}");
                assert!(verify_solution(&inst, &sol.coloring).is_clean());
            }
            Err(e) => assert!(!e.stage().is_empty()),
        }
        if !oracle.is_feasible() {
            infeasible += 1;
        }
        // The fallback turns every oracle-feasible instance into a success.
        let fb = SolveConfig {
            oracle_fallback: Some(12),
            ..SolveConfig::seeded(seed)
        };
        assert_eq!(solve_odd(&inst, &params_for(5), &fb).is_ok(), oracle.is_feasible());
    }
    println!("K5: pipeline solved {ok}/60, oracle infeasible {infeasible}");
    assert!(ok > 0);
}

#[test]
fn corrupted_colorings_report_exactly_the_fault() {
    let mut r = rng(8);
    let inst = random_instance(8, 2, 0, &mut r);
    let sol = relaxed_solve(&inst, 0).unwrap();
    let good = colors_of(&sol.coloring);
    assert!(verify_assignment(&inst, &good).is_clean());

    let e = inst.graph().edges().find(|&e| inst.phi.get(e).is_none()).unwrap();
    let mut bad = good.clone();
    bad[e.0] = 0;
    assert_eq!(verify_assignment(&inst, &bad).violations, vec![Violation::Uncolored(e)]);

    let mut listed = inst.clone();
    listed.lists.insert(e, good[e.0]).unwrap();
    assert_eq!(
        verify_solution(&listed, &sol.coloring).violations,
        vec![Violation::Listed { edge: e, color: good[e.0] }]
    );

    let (pe, pc) = inst.phi.colored_edges().next().unwrap();
    let mut bad = good.clone();
    // Swap a whole 2-colored cycle through the prescribed edge: still
    // proper, only the precoloring disagrees.
    let cyc = two_colored_cycles(8, &good)
        .into_iter()
        .find(|c| edge_extend::swap::cycle_edges(c).contains(&pe))
        .unwrap();
    let (a, b) = alternating(&good, &cyc).unwrap();
    let mut others_prescribed = false;
    for f in edge_extend::swap::cycle_edges(&cyc) {
        bad[f.0] = if bad[f.0] == a { b } else { a };
        others_prescribed |= f != pe && inst.phi.get(f).is_some();
    }
    let got = verify_assignment(&inst, &bad).violations;
    if !others_prescribed {
        assert_eq!(got, vec![Violation::Disagrees { edge: pe, want: pc, got: bad[pe.0] }]);
    }

    // Two edges at one vertex with one color.
    let (u, v) = inst.graph().endpoints(e);
    let f = inst.graph().edges().find(|&f| {
        let (x, y) = inst.graph().endpoints(f);
        f != e && (x == u || y == u) && x != v && y != v
    });
    let f = f.unwrap();
    let mut bad = good.clone();
    bad[e.0] = good[f.0];
    let got = verify_assignment(&inst, &bad).violations;
    assert!(got.iter().any(|x| matches!(x, Violation::Improper { vertex, color, .. } if *vertex == u && *color == good[f.0])));
    // At v the new color collides too, since every vertex sees all colors.
    assert_eq!(got.iter().filter(|x| matches!(x, Violation::Improper { .. })).count(), 2);
    assert!(got.iter().all(|x| matches!(x, Violation::Improper { .. } | Violation::Disagrees { .. })));
}

#[test]
fn case_budgets() {
    assert_eq!(Case::ALL.map(Case::budget), [69, 136, 139, 205]);
    assert_eq!(Case::ALL.map(Case::number), [1, 2, 3, 4]);
}

#[test]
fn corrections_stay_within_case_budgets() {
    let mut seen = [0usize; 4];
    let mut max = [0usize; 4];
    for seed in 0..80u64 {
        let order = [8, 12, 16, 20][seed as usize % 4];
        let mut r = rng(3000 + seed);
        let inst = random_instance(order, 2 + seed as usize % 3, 6, &mut r);
        let Ok(sol) = relaxed_solve(&inst, seed) else { continue };
        audit_solution(&sol, &params_for(order)).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        for c in &sol.stats.corrections {
            let k = c.case as usize;
            seen[k] += 1;
            max[k] = max[k].max(c.touched);
            assert!(c.touched <= c.case.budget());
            assert!(c.recolored_prescribed.len() <= 2);
        }
    }
    println!("corrections per case {seen:?}, largest footprint {max:?}");
    assert!(seen.iter().all(|&s| s > 0), "{seen:?}");
}

#[test]
fn single_miscolored_edge_at_n4_matches_bfs() {
    let ix = CompleteGraphIndex::new(4).unwrap();
    let e = ix.edge(ix.p(1), ix.q(2));
    let mut checked = 0;
    for seed in 0..10 {
        let base = relaxed_solve(&Instance::empty(8).unwrap(), seed).unwrap();
        let h0 = colors_of(&base.coloring);
        for c in 1..=7 {
            if c == h0[e.0] {
                continue;
            }
            let mut inst = Instance::empty(8).unwrap();
            inst.phi.set(e, c).unwrap();
            let sol = relaxed_solve(&inst, seed).unwrap();
            assert!(verify_solution(&inst, &sol.coloring).is_clean());
            let hp = colors_of(sol.hprime.as_ref().unwrap());
            if hp[e.0] == c {
                continue;
            }
            let params = params_for(8);
            audit_solution(&sol, &params).unwrap();
            let goal = |s: &[usize]| s[e.0] == c;
            let depth = bfs_swaps(8, &hp, &inst.lists, 4, &goal).expect("reachable by swaps");
            assert!(depth <= sol.stats.swaps, "bfs {depth} vs engine {}", sol.stats.swaps);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn staged_errors_name_their_stage() {
    let mut inst = Instance::empty(4).unwrap();
    for c in 1..=3 {
        inst.lists.insert(EdgeId(0), c).unwrap();
    }
    let err = relaxed_solve(&inst, 0).unwrap_err();
    assert!(["relabel", "extend", "correct"].contains(&err.stage()), "{err}");
    let fb = SolveConfig {
        oracle_fallback: Some(12),
        ..SolveConfig::seeded(0)
    };
    assert!(solve_instance(&inst, Preset::Relaxed, &fb).is_err());
    assert_eq!(solve(&Instance::empty(5).unwrap(), &params_for(6), &fb).unwrap_err().stage(), "invalid");
}

#[test]
fn solving_is_deterministic() {
    let mut r = rng(12);
    let inst = random_instance(12, 3, 6, &mut r);
    let a = relaxed_solve(&inst, 77);
    let b = relaxed_solve(&inst, 77);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            assert_eq!(a.coloring, b.coloring);
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.stats, b.stats);
        }
        (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
        _ => panic!("runs disagree"),
    }
}
