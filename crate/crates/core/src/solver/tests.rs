use super::*;
use crate::geometry::{OverlapClass, Point2};
use crate::instance::{CanvasSpec, SeparationSpec};
use proptest::prelude::*;
use rand::Rng;

fn item(id: usize, w: f64, h: f64, x: f64, y: f64) -> ItemSpec {
    ItemSpec::new(id, "defect", w, h, Point2::new(x, y))
}

fn instance(width: f64, height: f64, items: Vec<ItemSpec>) -> RarpInstance {
    RarpInstance::new(CanvasSpec::new(width, height), SeparationSpec::default(), items)
}

fn all_pairs_disjoint(inst: &RarpInstance, sol: &ScaleSolution) -> bool {
    let boxes: Vec<AxisBox> = inst.items.iter().zip(&sol.scales).map(|(it, &s)| it.scaled_box(s)).collect();
    (0..boxes.len()).all(|i| (i + 1..boxes.len()).all(|j| interiors_disjoint(&boxes[i], &boxes[j])))
}

/// Largest common scale keeping the pair disjoint, by bisection on the
/// geometric predicate alone.
fn bisect_pair_scale(a: &ItemSpec, b: &ItemSpec) -> f64 {
    let ok = |s: f64| interiors_disjoint(&a.scaled_box(s), &b.scaled_box(s));
    let (mut lo, mut hi) = (0.0, 1.0);
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn pair_scale_examples() {
    assert_eq!(pair_scale(&item(0, 2.0, 2.0, 2.0, 2.0), &item(1, 2.0, 2.0, 6.0, 2.0)).unwrap(), 2.0);
    let s = pair_scale(&item(0, 2.0, 4.0, 3.0, 3.0), &item(1, 4.0, 2.0, 6.0, 7.0)).unwrap();
    assert!((s - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(
        pair_scale(&item(0, 1.0, 1.0, 3.0, 3.0), &item(1, 2.0, 2.0, 3.0, 3.0)),
        Err(SolveError::CoincidentAnchors(0, 1))
    );
}

#[test]
fn pair_scale_matches_bisection_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let a = item(0, rng.gen_range(1.0..50.0), rng.gen_range(1.0..50.0), rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0));
        let b = item(1, rng.gen_range(1.0..50.0), rng.gen_range(1.0..50.0), rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0));
        let s = pair_scale(&a, &b).unwrap();
        let oracle = bisect_pair_scale(&a, &b);
        assert!((s - oracle).abs() <= 1e-9 * s.max(1.0), "{s} vs {oracle}");
        // touching at s (up to rounding), overlapping just above
        let above = s * (1.0 + 1e-9);
        assert!(!interiors_disjoint(&a.scaled_box(above), &b.scaled_box(above)));
        let below = s * (1.0 - 1e-9);
        assert!(interiors_disjoint(&a.scaled_box(below), &b.scaled_box(below)));
    }
}

#[test]
fn singleton_gets_boundary_fit() {
    let inst = instance(20.0, 10.0, vec![item(0, 4.0, 2.0, 10.0, 5.0)]);
    let (sol, trace) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(sol.scales, vec![5.0]);
    assert_eq!(trace.count(TraceStep::SingletonFit), 1);
    let packed = trim(&inst, &sol).unwrap();
    assert!(!packed[0].trimmed);
    assert_eq!(packed[0].rect, AxisBox::new(Point2::new(10.0, 5.0), 20.0, 10.0));

    let opts = SolveOptions {
        boundary_cap_singletons: false,
        ..SolveOptions::default()
    };
    assert_eq!(greedy_solve(&inst, &opts).unwrap().0.scales, vec![1.0]);
}

#[test]
fn empty_instance_solves_trivially() {
    let (sol, trace) = greedy_solve(&instance(10.0, 10.0, vec![]), &SolveOptions::default()).unwrap();
    assert!(sol.is_empty());
    assert_eq!(trace.passes, 1);
}

#[test]
fn two_items_touch_without_trim() {
    let inst = instance(10.0, 10.0, vec![item(0, 2.0, 2.0, 2.0, 2.0), item(1, 2.0, 2.0, 6.0, 2.0)]);
    let (sol, _) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(sol.scales, vec![2.0, 2.0]);
    let packed = trim(&inst, &sol).unwrap();
    assert_eq!(packed[0].rect.max_x(), 4.0);
    assert_eq!(packed[1].rect.min_x(), 4.0);
    assert!(packed.iter().all(|p| !p.trimmed));
    assert_eq!(classify_overlap(&packed[0].rect, &packed[1].rect).class, OverlapClass::Touching);
}

#[test]
fn pair_shrink_examples() {
    let a = AxisBox::new(Point2::new(5.0, 5.0), 6.0, 6.0);
    let b = AxisBox::new(Point2::new(8.0, 5.0), 6.0, 6.0);
    let k = pair_shrink(&a, &b).unwrap();
    assert_eq!(k, 0.5);
    assert_eq!(a.scaled(k).max_x(), 6.5);
    assert_eq!(b.scaled(k).min_x(), 6.5);

    let touching = AxisBox::new(Point2::new(11.0, 5.0), 6.0, 6.0);
    assert_eq!(pair_shrink(&a, &touching), Err(SolveError::NotOverlapping));

    let h = AxisBox::new(Point2::new(5.0, 5.0), 10.0, 2.0);
    let v = AxisBox::new(Point2::new(6.0, 5.0), 2.0, 10.0);
    assert_eq!(classify_overlap(&h, &v).class, OverlapClass::Cross);
    let k = pair_shrink(&h, &v).unwrap();
    assert!((k - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(classify_overlap(&h.scaled(k), &v.scaled(k)).class, OverlapClass::Touching);

    let same = AxisBox::new(Point2::new(5.0, 5.0), 2.0, 2.0);
    assert!(matches!(pair_shrink(&a, &same), Err(SolveError::DegenerateOverlap(..))));
}

#[test]
fn pair_shrink_picks_larger_candidate() {
    // kx = 2/4, ky = 3/4: shrinking to touch along y keeps more area.
    let a = AxisBox::new(Point2::new(0.0, 0.0), 4.0, 4.0);
    let b = AxisBox::new(Point2::new(2.0, 3.0), 4.0, 4.0);
    assert_eq!(pair_shrink(&a, &b).unwrap(), 0.75);
}

#[test]
fn post_process_leaves_disjoint_solution_alone() {
    let inst = instance(100.0, 100.0, vec![item(0, 4.0, 4.0, 10.0, 10.0), item(1, 4.0, 4.0, 50.0, 60.0)]);
    let sol = ScaleSolution::from_scales(vec![1.0, 1.5]);
    let (out, passes) = post_process(&inst, &sol, &SolveOptions::default()).unwrap();
    assert_eq!(out, sol);
    assert_eq!(passes, 1);
}

#[test]
fn post_process_repairs_upscaled_middle() {
    // Sorted along x: A, B, C. B was sized against A, then re-assigned the
    // larger B-C pair scale, re-overlapping A.
    let inst = instance(
        200.0,
        100.0,
        vec![item(0, 4.0, 4.0, 20.0, 50.0), item(1, 4.0, 4.0, 30.0, 60.0), item(2, 4.0, 4.0, 60.0, 30.0)],
    );
    let s_ab = pair_scale(&inst.items[0], &inst.items[1]).unwrap();
    let s_bc = pair_scale(&inst.items[1], &inst.items[2]).unwrap();
    assert!(s_bc > s_ab);
    let sol = ScaleSolution::from_scales(vec![s_ab, s_bc, s_bc]);
    assert!(!all_pairs_disjoint(&inst, &sol));
    let (out, _) = post_process(&inst, &sol, &SolveOptions::default()).unwrap();
    assert!(all_pairs_disjoint(&inst, &out));
    assert!(out.flags[1].post_shrunk);
    assert!(out.scales.iter().zip(&sol.scales).all(|(a, b)| a <= b));
}

#[test]
fn non_consecutive_overlap_is_repaired_by_greedy() {
    // A and C are far apart in sort order but close in y.
    let inst = instance(
        200.0,
        200.0,
        vec![item(0, 4.0, 4.0, 10.0, 50.0), item(1, 4.0, 4.0, 20.0, 10.0), item(2, 4.0, 4.0, 30.0, 52.0)],
    );
    let (sol, trace) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
    assert!(trace.count(TraceStep::PostShrink) >= 1);
    assert!(sol.flags[0].post_shrunk && sol.flags[2].post_shrunk);
    assert!(all_pairs_disjoint(&inst, &sol));
}

#[test]
fn circle_perimeter_layout_is_repaired() {
    let n = 8;
    let items = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.1;
            item(k, 10.0 + 3.0 * k as f64, 14.0 - k as f64, 200.0 + 100.0 * t.cos(), 200.0 + 100.0 * t.sin())
        })
        .collect();
    let inst = instance(400.0, 400.0, items);
    let (sol, trace) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
    assert!(all_pairs_disjoint(&inst, &sol));
    assert!(trace.passes <= n + 2);
}

#[test]
fn clipping_caps_upscale_after_downscale() {
    // A-B forces scale < 1, B-C would allow > 1.
    let inst = instance(
        100.0,
        100.0,
        vec![item(0, 10.0, 10.0, 10.0, 50.0), item(1, 10.0, 10.0, 15.0, 52.0), item(2, 10.0, 10.0, 60.0, 90.0)],
    );
    let (sol, trace) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(trace.count(TraceStep::ClippedPairScale), 1);
    assert!(sol.flags[2].clipped);
    assert_eq!(sol.scales[2], 1.0);
    assert!(sol.scales[1] < 1.0);
}

#[test]
fn trim_examples() {
    let inst = instance(10.0, 10.0, vec![item(0, 1.0, 1.0, 1.0, 5.0), item(1, 1.0, 1.0, 6.0, 8.0)]);
    let sol = ScaleSolution::from_scales(vec![4.0, 1.0]);
    let packed = trim(&inst, &sol).unwrap();
    assert!(packed[0].trimmed);
    assert_eq!((packed[0].rect.min_x(), packed[0].rect.max_x()), (0.0, 3.0));
    assert!(!packed[1].trimmed);
    assert_eq!(packed[1].rect, inst.items[1].scaled_box(1.0));
}

#[test]
fn downscale_examples() {
    let sol = ScaleSolution::from_scales(vec![2.0, 0.5, 3.0]);
    let ident = SolveOptions {
        downscale_range: (1.0, 1.0),
        ..SolveOptions::default()
    };
    assert_eq!(random_downscale(&sol, &ident).unwrap().scales, sol.scales);
    let half = SolveOptions {
        downscale_range: (0.5, 0.5),
        ..SolveOptions::default()
    };
    let out = random_downscale(&sol, &half).unwrap();
    assert_eq!(out.scales, vec![1.0, 0.25, 1.5]);
    assert!(out.flags.iter().all(|f| f.downscaled));

    let wide = SolveOptions {
        downscale_range: (0.3, 1.0),
        seed: 99,
        ..SolveOptions::default()
    };
    let a = random_downscale(&sol, &wide).unwrap();
    let b = random_downscale(&sol, &wide).unwrap();
    assert_eq!(a, b);
    assert!(a.scales.iter().zip(&sol.scales).all(|(x, y)| x <= y && *x >= 0.3 * y));

    let bad = SolveOptions {
        downscale_range: (0.8, 0.2),
        ..SolveOptions::default()
    };
    assert!(matches!(random_downscale(&sol, &bad), Err(SolveError::InvalidOptions(_))));
}

#[test]
fn objective_examples() {
    let inst = instance(10.0, 10.0, vec![item(0, 3.0, 2.0, 5.0, 5.0)]);
    let obj = objective(&inst, &ScaleSolution::from_scales(vec![2.0])).unwrap();
    assert_eq!((obj.linear, obj.covered_area), (12.0, 24.0));
    let inst = instance(10.0, 10.0, vec![item(0, 3.0, 2.0, 2.0, 2.0), item(1, 1.5, 4.0, 7.0, 7.0)]);
    let obj = objective(&inst, &ScaleSolution::from_scales(vec![1.0, 1.0])).unwrap();
    assert_eq!((obj.linear, obj.covered_area), (12.0, 12.0));
    assert!(matches!(
        objective(&inst, &ScaleSolution::from_scales(vec![1.0])),
        Err(SolveError::LengthMismatch { .. })
    ));
}

#[test]
fn invalid_instance_is_rejected() {
    let inst = instance(10.0, 10.0, vec![item(0, 1.0, 1.0, 2.0, 2.0), item(1, 1.0, 1.0, 2.0, 2.0)]);
    assert!(matches!(greedy_solve(&inst, &SolveOptions::default()), Err(SolveError::InvalidInstance(_))));
}

#[test]
fn pass_cap_exceeded_is_reported() {
    let inst = instance(
        200.0,
        200.0,
        vec![item(0, 4.0, 4.0, 10.0, 50.0), item(1, 4.0, 4.0, 20.0, 10.0), item(2, 4.0, 4.0, 30.0, 52.0)],
    );
    let opts = SolveOptions {
        post_process_pass_cap: Some(1),
        ..SolveOptions::default()
    };
    assert_eq!(greedy_solve(&inst, &opts), Err(SolveError::PassCapExceeded(1)));
}

fn arb_instance() -> impl Strategy<Value = RarpInstance> {
    (2usize..12, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let items = (0..n)
            .map(|i| {
                item(
                    i,
                    rng.gen_range(2.0..60.0),
                    rng.gen_range(2.0..60.0),
                    rng.gen_range(1.0..399.0),
                    rng.gen_range(1.0..299.0),
                )
            })
            .collect();
        instance(400.0, 300.0, items)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_output_is_pairwise_disjoint(inst in arb_instance()) {
        let (sol, trace) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
        prop_assert!(all_pairs_disjoint(&inst, &sol));
        prop_assert!(sol.scales.iter().all(|s| s.is_finite() && *s > 0.0));
        prop_assert!(trace.passes <= inst.len() + 2);
        let replayed: Vec<f64> = trace.replay(inst.len()).into_iter().map(Option::unwrap).collect();
        prop_assert_eq!(replayed, sol.scales.clone());
    }

    #[test]
    fn post_process_never_increases_scales(inst in arb_instance(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sol = ScaleSolution::from_scales((0..inst.len()).map(|_| rng.gen_range(0.1..20.0)).collect());
        let (out, _) = post_process(&inst, &sol, &SolveOptions::default()).unwrap();
        prop_assert!(out.scales.iter().zip(&sol.scales).all(|(a, b)| a <= b));
        prop_assert!(all_pairs_disjoint(&inst, &out));
    }

    #[test]
    fn uniform_shrink_preserves_disjointness(inst in arb_instance(), k in 1e-6f64..=1.0) {
        let (sol, _) = greedy_solve(&inst, &SolveOptions::default()).unwrap();
        prop_assert!(all_pairs_disjoint(&inst, &sol.uniformly_scaled(k)));
    }

    #[test]
    fn solve_is_deterministic(inst in arb_instance(), seed in any::<u64>()) {
        let opts = SolveOptions { enable_random_downscale: true, seed, ..SolveOptions::default() };
        let first = greedy_solve(&inst, &opts).unwrap();
        let second = greedy_solve(&inst, &opts).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert!(all_pairs_disjoint(&inst, &first.0));
    }
}
