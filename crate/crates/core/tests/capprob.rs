use proptest::prelude::*;
use rand::RngExt;
use unanimity_core::capprob::*;
use unanimity_core::geometry::*;
use unanimity_core::seed;

#[test]
fn event_estimators_agree_on_moderate_caps() {
    let caps = [
        disk_segment_cap(0.6).unwrap(),
        square_triangle_cap(0.6, 0.9).unwrap(),
        interval_cap(0.4).unwrap(),
    ];
    for (i, cap) in caps.iter().enumerate() {
        let a = acceptance_prob_event(cap, 200_000, 300 + i as u64).unwrap();
        let b = acceptance_prob_event_in_cap(cap, 200_000, 400 + i as u64).unwrap();
        assert!(
            a.z_score(&b).abs() < 4.0,
            "{:?}: {a:?} vs {b:?}",
            cap.shape()
        );
    }
}

#[test]
fn event_and_integral_agree_on_random_caps() {
    let mut rng = seed::rng(301);
    for domain in Domain::ALL {
        let mut done = 0;
        while done < 3 {
            let h = bisector(domain.sample(&mut rng), domain.sample(&mut rng)).unwrap();
            let Ok(cap) = make_cap(domain, h) else {
                continue;
            };
            let frac = cap.area() / domain.measure();
            if !(0.1..=0.5).contains(&frac) {
                continue;
            }
            let s = rng.random::<u64>();
            let ev = acceptance_prob_event(&cap, 200_000, s).unwrap();
            let it = acceptance_prob_integral(&cap, 400, 400, s ^ 1).unwrap();
            assert!(ev.z_score(&it).abs() < 4.0, "{domain}: {ev:?} vs {it:?}");
            done += 1;
        }
    }
}

#[test]
fn vanishing_segment_has_vanishing_probability() {
    let mut last = f64::INFINITY;
    for d in [0.125, 0.05, 0.02, 0.005] {
        let e = acceptance_prob_event_in_cap(&disk_segment_cap(d).unwrap(), 100_000, 9).unwrap();
        assert!(e.value < last);
        last = e.value;
    }
    assert!(last < 1e-9);
}

#[test]
fn quarter_triangle_meets_explicit_bound() {
    let cap = square_triangle_cap(0.25, 0.25).unwrap();
    let e = acceptance_prob_event_in_cap(&cap, 200_000, 10).unwrap();
    assert!(e.value >= 1.0 / 2f64.powi(19));
}

#[test]
fn phi_is_a_distribution_function() {
    for domain in [Domain::UnitDisk, Domain::UnitSquare] {
        let ls = [0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 2.0];
        let c = phi_curve(domain, &ls, 50_000, 11).unwrap();
        assert_eq!(c[0].value, 0.0);
        assert!(c.windows(2).all(|w| w[0].value <= w[1].value));
        assert_eq!(c[ls.len() - 1].value, 1.0);
    }
}

#[test]
fn upper_bound_integral_decreases() {
    for domain in [Domain::UnitDisk, Domain::UnitSquare] {
        let ts = [0.0, 1.0, 10.0, 100.0, 1e3, 1e4];
        let c = upper_bound_curve(domain, &ts, 20_000, 12).unwrap();
        assert_eq!(c[0].value, 1.0);
        assert!(c.windows(2).all(|w| w[0].value >= w[1].value));
    }
}

#[test]
fn bound_ratio_preconditions() {
    assert!(lower_bound_ratio_disk(&[0.2], 10, 1).is_err());
    assert!(lower_bound_ratio_disk(&[0.0], 10, 1).is_err());
    assert!(lower_bound_ratio_square(&[(0.5, 0.25)], 10, 1).is_err());
    assert!((square_cap_lower_bound(0.25, 0.25) - 0.25f64.powi(4) / 2048.0).abs() < 1e-18);
}

fn rotate(p: Point, th: f64) -> Point {
    let (s, c) = th.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y)
}

proptest! {
    #[test]
    fn f_disk_symmetric_and_rotation_invariant(
        r1 in 0.0..1.0f64, t1 in 0.0..std::f64::consts::TAU, r2 in 0.0..1.0f64, t2 in 0.0..std::f64::consts::TAU, th in 0.0..std::f64::consts::TAU,
    ) {
        let w1 = Point::new(r1.sqrt() * t1.cos(), r1.sqrt() * t1.sin());
        let w2 = Point::new(r2.sqrt() * t2.cos(), r2.sqrt() * t2.sin());
        prop_assume!(w1.dist(w2) > 1e-6);
        let f = f_disk(w1, w2).unwrap();
        prop_assert!((f - f_disk(w2, w1).unwrap()).abs() < 1e-9);
        prop_assert!((f - f_disk(rotate(w1, th), rotate(w2, th)).unwrap()).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn f_square_symmetric_and_dihedral_invariant(
        a in (0.0..1.0f64, 0.0..1.0f64), b in (0.0..1.0f64, 0.0..1.0f64), g in 0usize..8,
    ) {
        let (w1, w2) = (Point::from(a), Point::from(b));
        prop_assume!(w1.dist(w2) > 1e-6);
        let map = Dihedral::all().nth(g).unwrap();
        let f = f_square(w1, w2).unwrap();
        prop_assert!(f > 0.0);
        prop_assert!((f - f_square(w2, w1).unwrap()).abs() < 1e-9);
        prop_assert!((f - f_square(map.apply(w1), map.apply(w2)).unwrap()).abs() < 1e-9);
    }
}
