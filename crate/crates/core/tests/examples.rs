//! Worked numbers with hand-computed values.

use dfcomp::codes::{moderate_deviation_run, v_count, v_schedule_cap};
use dfcomp::funclass::{classify, SingleLetterFunction, VectorFunction};
use dfcomp::regions::{
    h2, h2_inverse, mod_sum_regions, outer_bound_r_sensitive, spectral_entropies, sw_region_fl,
    SpectralEntropies,
};
use dfcomp::sources::SourceModel;
use dfcomp::Budget;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn neighbourhood_counts() {
    assert_eq!(v_count(4, 2, 0.3), 4.0);
    assert_eq!(v_count(5, 3, 0.5), 50.0);
    // At beta = 1/n the ball has radius 0.
    assert_eq!(v_count(8, 2, 1.0 / 8.0), 0.0);
    assert_eq!(v_schedule_cap(8, 2), 16384.0);
    for n in 1..=64 {
        assert!(v_count(n, 2, 1.0 / n as f64) <= v_schedule_cap(n, 2));
    }
}

#[test]
fn doubly_symmetric_binary_source() {
    let p = 0.1;
    let s = SourceModel::iid(vec![
        vec![(1.0 - p) / 2.0, p / 2.0],
        vec![p / 2.0, (1.0 - p) / 2.0],
    ])
    .unwrap();
    let e = spectral_entropies(&s).unwrap();
    assert!(close(e.h_x_given_y, h2(p)));
    assert!(close(e.h_y_given_x, h2(p)));
    assert!(close(e.h_joint, 1.0 + h2(p)));
    let sw = sw_region_fl(&s).unwrap();
    assert!(sw.contains(0.5, 1.0) && !sw.contains(0.4, 1.0));
}

#[test]
fn outer_bound_lowers_the_sum_by_r() {
    let e = SpectralEntropies {
        h_x_given_y: 0.5,
        h_y_given_x: 0.5,
        h_joint: 1.5,
        uncertainty: 0.0,
    };
    let o = outer_bound_r_sensitive(&e, 0.5).unwrap();
    assert_eq!((o.r1_min, o.r2_min), (0.5, 0.5));
    assert!(close(o.sum_min, 1.0));
    assert!(o.contains(0.5, 0.5));
}

#[test]
fn binary_mod_sum_gap() {
    let eps = h2_inverse(0.1);
    assert!(close(h2(eps), 0.1));
    let g = mod_sum_regions(2, 2, 1.0, 0.1, eps).unwrap();
    assert!(close(g.inner.sum_min, 0.2));
    assert!(close(g.outer.sum_min, 0.9));
    assert!(g.inner.sum_min < g.outer.sum_min);
}

#[test]
fn and_function_is_not_totally_sensitive() {
    // Flipping a 0 in y to 1 exposes x there, and symmetrically, but the
    // cells (0, 1) and (1, 0) collide with neither coordinate shared.
    let f = SingleLetterFunction::from_rows(&[vec![0, 0], vec![0, 1]]).unwrap();
    let v = VectorFunction::lift(&f, 2, Budget::default()).unwrap();
    let r = classify(&v, Budget::default()).unwrap();
    assert!(!r.totally_sensitive);
    assert!(r.sensitive_given_y && r.sensitive_given_x);
    assert!(!r.jointly_sensitive);
}

#[test]
fn moderate_deviation_excess_decreases() {
    let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
    let f = SingleLetterFunction::from_rows(&[vec![0, 1], vec![2, 3]]).unwrap();
    let t = moderate_deviation_run(&s, &f, 0.25, 1.0, &[4, 6, 8], 1, Budget(1 << 31)).unwrap();
    for w in t.rows.windows(2) {
        assert!(w[1].normalized_excess <= w[0].normalized_excess);
    }
    for r in &t.rows {
        assert!(r.surrogate <= 1.1, "{r:?}");
        assert!(r.v <= r.v_cap);
        assert!(r.bounds_hold);
    }
}
