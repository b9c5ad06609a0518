use dfcomp::codes::typical::{cardinality_certificates, DecodingSets};
use dfcomp::codes::{
    adapted_length, atypicality_bounds, build_random_binning_sw, elias_int_decode,
    elias_int_encode, elias_len, error_probability_exact, error_probability_mc, is_prefix_free,
    km_error_mc, kraft_sum, length_allowance, min_error_fixed_length, random_code,
    random_prefix_code, sum_law, v_bound, v_count, BitString, BoundKind, KmCode, McEstimate,
    ProbTables, RandomCodeOptions, TypicalSetConfig,
};
use dfcomp::funclass::{symbolwise_totally_sensitive, SingleLetterFunction, VectorFunction};
use dfcomp::regions::h2_inverse;
use dfcomp::sources::SourceModel;
use dfcomp::Budget;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pairwise scan: no distinct word is a prefix of another.
fn pairwise_prefix_free(words: &[BitString]) -> bool {
    words.iter().enumerate().all(|(i, a)| {
        words
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || a == b || !(a.len() <= b.len() && b.0[..a.len()] == a.0[..]))
    })
}

fn distinct(words: &[BitString]) -> Vec<BitString> {
    let mut w = words.to_vec();
    w.sort();
    w.dedup();
    w
}

fn positive_table(a: usize, b: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(1..=6u32, b), a).prop_map(|w| {
        let s: u32 = w.iter().flatten().sum();
        w.into_iter()
            .map(|r| r.into_iter().map(|v| v as f64 / s as f64).collect())
            .collect()
    })
}

fn function_and_source() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<Vec<f64>>)> {
    (1..=3usize, 1..=3usize, 1..=5u32).prop_flat_map(|(a, b, k)| {
        (
            prop::collection::vec(prop::collection::vec(0..k, b), a),
            positive_table(a, b),
        )
    })
}

fn totally_sensitive_instance() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<Vec<f64>>)> {
    (2..=3usize, 2..=3usize).prop_flat_map(|(a, b)| {
        (
            prop::collection::vec(prop::collection::vec(0..(a * b) as u32, b), a).prop_filter(
                "totally sensitive",
                |rows| {
                    symbolwise_totally_sensitive(&SingleLetterFunction::from_rows(rows).unwrap())
                        .totally_sensitive
                },
            ),
            positive_table(a, b),
        )
    })
}

/// Number of nonzero words of length `n` over `a` letters at Hamming
/// distance strictly below `n k / den` from the all-zero word.
fn hamming_ball(n: usize, a: usize, k: usize, den: usize) -> u64 {
    let total = (a as u64).pow(n as u32);
    (1..total)
        .filter(|&w| {
            let mut d = 0;
            let mut v = w;
            for _ in 0..n {
                d += usize::from(v % a as u64 != 0);
                v /= a as u64;
            }
            d * den < n * k
        })
        .count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_prefix_codes_pass_pairwise_scan(k in 1..=300usize, seed in any::<u64>()) {
        let c = random_prefix_code(k, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(c.len(), k);
        prop_assert!(pairwise_prefix_free(&c));
        prop_assert!(is_prefix_free(&c));
        prop_assert!(kraft_sum(&c) <= 1.0 + 1e-12);
    }

    #[test]
    fn prefix_check_agrees_with_pairwise_scan(words in prop::collection::vec(prop::collection::vec(any::<bool>(), 0..6), 1..12)) {
        let words: Vec<BitString> = words.into_iter().map(BitString).collect();
        prop_assert_eq!(is_prefix_free(&words), pairwise_prefix_free(&words));
    }

    #[test]
    fn elias_round_trip(values in prop::collection::vec(1..=u32::MAX as u64, 1..20), tail in prop::collection::vec(any::<bool>(), 0..8)) {
        let mut stream = Vec::new();
        for &v in &values {
            let w = elias_int_encode(v).unwrap();
            prop_assert_eq!(w.len(), 2 * (63 - v.leading_zeros() as usize) + 1);
            prop_assert_eq!(w.len(), elias_len(v));
            stream.extend(w.0);
        }
        stream.extend(tail);
        let mut pos = 0;
        for &v in &values {
            let (got, used) = elias_int_decode(&stream[pos..]).unwrap();
            prop_assert_eq!(got, v);
            pos += used;
        }
    }

    #[test]
    fn v_count_matches_hamming_ball(n in 1..=6usize, a in 2..=4usize, k in 1..20usize) {
        let beta = k as f64 / 20.0;
        prop_assert_eq!(v_count(n, a, beta), hamming_ball(n, a, k, 20) as f64);
        if k <= 10 {
            prop_assert!(v_count(n, a, beta) <= v_bound(n, a, beta));
        }
    }

    #[test]
    fn constructed_encoders_are_prefix_free(
        (rows, joint) in function_and_source(),
        n in 1..=2usize,
        full in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let f = VectorFunction::lift(&SingleLetterFunction::from_rows(&rows).unwrap(), n, Budget::default()).unwrap();
        let s = SourceModel::iid(joint).unwrap();
        let opts = RandomCodeOptions { full_side_information: full, ..Default::default() };
        let code = random_code(&f, &s, opts, Budget::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let out = build_random_binning_sw(&code, &s, 0.2, seed, Budget::default()).unwrap();
        for words in [&code.codebook1, &code.codebook2, &out.code.codebook1, &out.code.codebook2] {
            let d = distinct(words);
            prop_assert!(pairwise_prefix_free(&d));
            prop_assert!(kraft_sum(&d) <= 1.0 + 1e-12);
        }
    }

    /// With every codeword at least one bit long, each new length stays
    /// within the allowance, and the error report holds.
    #[test]
    fn binning_lengths_hold_pointwise(
        (rows, joint) in function_and_source(),
        n in 1..=2usize,
        delta in 0.15..1.0f64,
        seed in any::<u64>(),
    ) {
        let f = VectorFunction::lift(&SingleLetterFunction::from_rows(&rows).unwrap(), n, Budget::default()).unwrap();
        let s = SourceModel::iid(joint).unwrap();
        let code = random_code(&f, &s, RandomCodeOptions::default(), Budget::default(), &mut ChaCha8Rng::seed_from_u64(seed))
            .unwrap()
            .with_flagged_lengths()
            .unwrap();
        let out = build_random_binning_sw(&code, &s, delta, seed, Budget::default()).unwrap();
        for (old, new) in [(code.lengths1(), out.code.lengths1()), (code.lengths2(), out.code.lengths2())] {
            let cap = length_allowance(n, old.iter().copied().max().unwrap(), delta);
            for (&a, &b) in old.iter().zip(&new) {
                prop_assert_eq!(b, adapted_length(a, n, delta) + elias_len(adapted_length(a, n, delta) as u64));
                prop_assert!(b as f64 <= a as f64 + cap + 1e-12, "{} -> {} (cap {})", a, b, cap);
            }
        }
        for r in &out.reports {
            prop_assert!(r.holds(), "{:?}", r);
        }
    }

    /// The allowance covers header and rounding once `l + 2 n delta >= 1.29`.
    #[test]
    fn length_allowance_covers_header(l in 0..5000usize, n in 1..=64usize, delta in 0.0..2.0f64) {
        prop_assume!(l as f64 + 2.0 * n as f64 * delta >= 1.29);
        let lt = adapted_length(l, n, delta);
        let new = lt + elias_len(lt as u64);
        prop_assert!(new as f64 <= l as f64 + length_allowance(n, l, delta) + 1e-12, "{} -> {}", l, new);
    }

    #[test]
    fn atypicality_bounds_hold(
        (rows, joint) in totally_sensitive_instance(),
        n in 1..=3usize,
        delta in 0.02..0.5f64,
        beta in 0.05..0.49f64,
        r in 0.0..1.5f64,
        seed in any::<u64>(),
    ) {
        let f = VectorFunction::lift(&SingleLetterFunction::from_rows(&rows).unwrap(), n, Budget::default()).unwrap();
        let s = SourceModel::iid(joint).unwrap();
        let code = random_code(&f, &s, RandomCodeOptions::default(), Budget::default(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let cfg = TypicalSetConfig::new(delta, beta).unwrap();
        let plain = atypicality_bounds(&code, &s, &f, cfg, None, Budget::default()).unwrap();
        let widened = atypicality_bounds(&code, &s, &f, cfg, Some(r), Budget::default()).unwrap();
        let kinds: Vec<BoundKind> = plain.iter().chain(&widened).map(|b| b.bound).collect();
        for k in [BoundKind::GivenY, BoundKind::GivenX, BoundKind::Joint, BoundKind::JointR] {
            prop_assert!(kinds.contains(&k), "{:?} missing", k);
        }
        for b in plain.iter().chain(&widened) {
            prop_assert!(b.holds(), "{:?}", b);
        }
    }

    #[test]
    fn decoding_set_sections_are_small(
        (_, joint) in function_and_source(),
        lens1 in prop::collection::vec(0..12usize, 1..4),
        lens2 in prop::collection::vec(0..12usize, 1..4),
        delta in 0.01..0.5f64,
    ) {
        let s = SourceModel::iid(joint).unwrap();
        let t = ProbTables::new(&s, 3, Budget::default()).unwrap();
        let cert = cardinality_certificates(&DecodingSets { tables: &t, delta }, &lens1, &lens2);
        prop_assert!(cert.checks > 0);
        prop_assert_eq!(cert.violations, 0);
    }
}

/// Exact error against the 95% interval of a seeded Monte Carlo run, on a
/// fixed set of small instances. Misses must stay within what a 95% interval
/// allows, and no estimate may sit more than five standard errors away.
#[test]
fn monte_carlo_agrees_with_exact() {
    let trials = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = (function_and_source(), 1..=3usize);
    let (mut instances, mut misses) = (0, 0);
    for seed in 0..200u64 {
        let ((rows, joint), n) = strategy.new_tree(&mut runner).unwrap().current();
        let f = VectorFunction::lift(
            &SingleLetterFunction::from_rows(&rows).unwrap(),
            n,
            Budget::default(),
        )
        .unwrap();
        let s = SourceModel::iid(joint).unwrap();
        let code = random_code(
            &f,
            &s,
            RandomCodeOptions::default(),
            Budget::default(),
            &mut rng,
        )
        .unwrap();
        let exact = error_probability_exact(&code, &s, &f, Budget::default()).unwrap();
        let mc = error_probability_mc(&code, &s, &f, trials, seed).unwrap();
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (mc.estimate - exact).abs() <= 5.0 * sigma + 1e-12,
            "{mc:?} vs {exact}"
        );
        instances += 1;
        if !(mc.ci_low <= exact && exact <= mc.ci_high) {
            misses += 1;
        }
    }
    let allowed = 0.05 * instances as f64 + 3.0 * (0.05 * 0.95 * instances as f64).sqrt();
    assert!(
        (misses as f64) <= allowed,
        "{misses} of {instances} outside the interval"
    );
}

/// Below the premise the allowance is too small: one-bit codewords with
/// `2 n delta = 0.1` become five bits long against an allowance of 3.375.
#[test]
fn length_allowance_fails_for_tiny_lengths() {
    let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
    let one_bit: Vec<BitString> = (0..2).map(|i| BitString::from_uint(i, 1)).collect();
    let code =
        dfcomp::codes::DistributedCode::from_parts(1, 2, 2, one_bit.clone(), one_bit, |a, b| {
            Some(a * 2 + b)
        })
        .unwrap();
    let out = build_random_binning_sw(&code, &s, 0.05, 1, Budget::default()).unwrap();
    assert_eq!(out.code.lengths1(), vec![5, 5]);
    let len_x = out
        .reports
        .iter()
        .find(|r| r.bound == BoundKind::LengthX)
        .unwrap();
    assert!((len_x.rhs - 3.375).abs() < 1e-3 && len_x.lhs == 4.0);
    assert!(!len_x.holds());
}

/// Error across five rates on the instance with `h2(epsilon) = 0.1`;
/// overlapping intervals count as ties.
#[test]
fn km_error_is_non_increasing_in_rate() {
    let s = SourceModel::AntiDiagonal {
        x_size: 2,
        y_size: 2,
        rho: 1.0,
        epsilon: h2_inverse(0.1),
    };
    let mut last: Option<McEstimate> = None;
    for rate in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let code = KmCode::new(&s, 200, 1.0, rate, 1).unwrap();
        let est = km_error_mc(&code, &s, 10_000, 1).unwrap();
        if let Some(prev) = last {
            assert!(
                est.ci_low <= prev.ci_high,
                "rate {rate}: {est:?} above {prev:?}"
            );
        }
        last = Some(est);
    }
    assert!(last.unwrap().estimate <= 0.05);
}

/// With `epsilon = 0.05` the sum has about 0.34 bits of entropy per
/// coordinate. At n = 200 no decoder of the sum reaches error 0.05 at
/// rate 0.4, and the simulated code stays above that converse.
#[test]
fn km_epsilon_005_against_converse() {
    let s = SourceModel::AntiDiagonal {
        x_size: 2,
        y_size: 2,
        rho: 1.0,
        epsilon: 0.05,
    };
    let law = sum_law(2, 2, 0.05, 3);
    for (rate, floor) in [(0.1, 0.5), (0.4, 0.05)] {
        let code = KmCode::new(&s, 200, 1.0, rate, 1).unwrap();
        let converse = min_error_fixed_length(
            &law,
            code.sum_coords,
            code.rows as f64 * 3f64.log2(),
            Budget::default(),
        )
        .unwrap();
        assert!(converse > floor, "rate {rate}: converse {converse}");
        let est = km_error_mc(&code, &s, 10_000, 1).unwrap();
        assert!(
            est.ci_high >= converse,
            "rate {rate}: {est:?} below converse {converse}"
        );
        if rate == 0.1 {
            assert!(est.estimate >= 0.5, "{est:?}");
        }
    }
}

#[test]
fn km_without_sum_part_is_exact() {
    let s = SourceModel::AntiDiagonal {
        x_size: 3,
        y_size: 3,
        rho: 0.0,
        epsilon: 0.1,
    };
    let code = KmCode::new(&s, 4, 0.0, 0.3, 5).unwrap();
    let (table, f) = code.to_table_code(Budget::default()).unwrap();
    assert_eq!(
        error_probability_exact(&table, &s, &f, Budget::default()).unwrap(),
        0.0
    );
}
