use unanimity_core::dynamics::*;
use unanimity_core::election::voronoi_winner;
use unanimity_core::geometry::{ConvexHull, Domain, Point};
use unanimity_core::seed;

#[test]
fn trajectory_invariants() {
    for domain in Domain::ALL {
        let t = run_trial(domain, 5_000, 2, 42).unwrap();
        assert_eq!(t.sizes.len(), 5_001);
        assert_eq!(t.sizes[0], 2);
        for (i, &a) in t.accepted.iter().enumerate() {
            assert_eq!(t.sizes[i + 1], t.sizes[i] + a as u32);
        }
        for (s, h) in t.sizes.iter().zip(&t.hull_vertex_counts) {
            assert!(h <= s);
        }
    }
}

#[test]
fn replay_is_bit_identical() {
    for domain in Domain::ALL {
        assert_eq!(
            run_trial(domain, 1_000, 1, 7).unwrap(),
            run_trial(domain, 1_000, 1, 7).unwrap()
        );
    }
}

#[test]
fn square_sizes_stay_in_bounds() {
    let t = run_trial(Domain::UnitSquare, 10_000, 1, 3).unwrap();
    assert!(t.final_size() >= 1 && t.final_size() as usize <= 10_001);
}

#[test]
fn hull_matches_recorded_members() {
    let p = seeded_process(Domain::UnitDisk, 1, 99);
    let first = p.hull().vertices()[0];
    let mut p = p.record_members();
    let mut changes = 0;
    for _ in 0..3_000 {
        let before = p.hull().clone();
        let r = p.step();
        if r.hull_changed {
            let winner = r.outcome.winner.unwrap().pick(r.w1, r.w2);
            assert!(!before.contains(winner) || before.len() < 3);
            changes += 1;
        }
    }
    let mut all = vec![first];
    all.extend_from_slice(p.admitted().unwrap());
    let batch = ConvexHull::from_points(all.iter().copied());
    assert_eq!(batch.len(), p.hull().len());
    assert!(changes > 0);
    assert_eq!(all.len(), p.size());
}

#[test]
fn process_matches_member_by_member_vote() {
    let mut rng = seed::rng(5);
    let domain = Domain::UnitSquare;
    let start = domain.sample(&mut rng);
    let mut p = unanimity_core::dynamics::AdmissionProcess::with_members(domain, vec![start], rng);
    let mut members: Vec<Point> = vec![start];
    for _ in 0..5_000 {
        let r = p.step();
        let d = |v: &Point, w: Point| v.dist_sq(w);
        let all1 = members.iter().all(|v| d(v, r.w1) <= d(v, r.w2));
        let all2 = members.iter().all(|v| d(v, r.w2) <= d(v, r.w1));
        assert_eq!(r.outcome.accepted(), all1 || all2);
        let hull = ConvexHull::from_points(members.iter().copied());
        assert_eq!(voronoi_winner(&hull, r.w1, r.w2).unwrap(), r.outcome);
        if let Some(c) = r.outcome.winner {
            members.push(c.pick(r.w1, r.w2));
        }
    }
}

#[test]
fn interval_single_member_always_admits_the_nearer() {
    for s in 0..2_000u64 {
        let mut p = seeded_process(Domain::Interval, 1, s);
        let m = p.hull().vertices()[0].x;
        let r = p.step();
        let c = r
            .outcome
            .winner
            .expect("a lone member always agrees with itself");
        let (win, lose) = (c.pick(r.w1, r.w2).x, c.other().pick(r.w1, r.w2).x);
        assert!((win - m).abs() <= (lose - m).abs());
    }
}

#[test]
fn interval_round_rule_with_two_members() {
    // Members spanning [lo, hi] agree iff the candidates' midpoint is not
    // strictly between them.
    let mut accepted = 0;
    for s in 0..5_000u64 {
        let mut p = seeded_process(Domain::Interval, 2, s);
        let v = p.hull().vertices().to_vec();
        let (lo, hi) = (v[0].x.min(v[1].x), v[0].x.max(v[1].x));
        let r = p.step();
        let mid = 0.5 * (r.w1.x + r.w2.x);
        assert_eq!(r.outcome.accepted(), !(lo < mid && mid < hi), "s={s}");
        accepted += r.outcome.accepted() as u32;
    }
    assert!(accepted > 500 && accepted < 4_500);
}

#[test]
fn ensemble_identity_and_worker_independence() {
    for domain in Domain::ALL {
        let cfg = EnsembleConfig::new(domain, 2_000, 64).seed(17);
        let a = run_ensemble(&cfg.workers(1)).unwrap();
        let b = run_ensemble(&cfg.workers(8)).unwrap();
        assert_eq!(a, b);
        let mut cum = 0.0;
        for t in 0..=cfg.rounds {
            cum += a.acceptance_rate[t];
            assert!((a.mean_size[t] - 1.0 - cum).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&a.acceptance_rate[t]));
        }
    }
}

#[test]
fn single_trial_ensemble_matches_trajectory() {
    let cfg = EnsembleConfig::new(Domain::UnitDisk, 1_000, 1).seed(4);
    let s = run_ensemble(&cfg).unwrap();
    let t = run_trial(Domain::UnitDisk, 1_000, 1, cfg.trial_seed(0)).unwrap();
    for i in 0..=1_000 {
        assert_eq!(s.mean_size[i], t.sizes[i] as f64);
        assert_eq!(s.stderr_size[i], 0.0);
    }
}

#[test]
fn acceptance_rate_is_coarsely_non_increasing() {
    let s = run_ensemble(&EnsembleConfig::new(Domain::UnitDisk, 20_000, 200).seed(8)).unwrap();
    for t1 in [100usize, 200, 400, 1_000, 2_000] {
        for t2 in [4 * t1, 8 * t1] {
            if 2 * t2 > s.rounds {
                continue;
            }
            let (r1, e1) = s.window_rate(t1, 2 * t1);
            let (r2, e2) = s.window_rate(t2, 2 * t2);
            assert!(
                r2 <= r1 + 3.0 * (e1 * e1 + e2 * e2).sqrt(),
                "t1={t1} t2={t2}: {r1} {r2}"
            );
        }
    }
}
