use dfcomp::codes::{random_code, RandomCodeOptions};
use dfcomp::funclass::{
    classify, eq_count, is_hk, max_eq, max_eq_rate, mod_sum_function, symbolwise_totally_sensitive,
    SingleLetterFunction, VectorFunction,
};
use dfcomp::sources::SourceModel;
use dfcomp::Budget;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table() -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1..=3usize, 1..=3usize, 1..=5u32)
        .prop_flat_map(|(a, b, k)| prop::collection::vec(prop::collection::vec(0..k, b), a))
}

fn lift(rows: &[Vec<u32>], n: usize) -> (SingleLetterFunction, VectorFunction) {
    let f = SingleLetterFunction::from_rows(rows).unwrap();
    let v = VectorFunction::lift(&f, n, Budget::default()).unwrap();
    (f, v)
}

/// Largest set of fiber pairs with pairwise distinct x and distinct y, by
/// trying every subset.
fn brute_matching(pairs: &[(usize, usize)]) -> usize {
    let k = pairs.len();
    let mut best = 0;
    for mask in 0u32..(1 << k) {
        let chosen: Vec<_> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(i, p)| chosen[i + 1..].iter().all(|q| p.0 != q.0 && p.1 != q.1));
        if ok {
            best = best.max(chosen.len());
        }
    }
    best
}

fn fiber(f: &VectorFunction, z: u32) -> Vec<(usize, usize)> {
    (0..f.num_x())
        .flat_map(|x| (0..f.num_y()).map(move |y| (x, y)))
        .filter(|&(x, y)| f.at(x, y) == z)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn two_letter_check_matches_single_letter_rule(rows in table()) {
        let (f, v) = lift(&rows, 2);
        let exhaustive = classify(&v, Budget::default()).unwrap().totally_sensitive;
        prop_assert_eq!(exhaustive, symbolwise_totally_sensitive(&f).totally_sensitive);
    }

    #[test]
    fn hierarchy(rows in table(), n in 1..=2usize) {
        let (f, v) = lift(&rows, n);
        let r = classify(&v, Budget::default()).unwrap();
        // With a one-letter alphabet there is no change to make, so the strong
        // form holds vacuously; see `one_letter_alphabet_is_vacuously_highly_sensitive`.
        if f.y_size() >= 2 {
            prop_assert!(!r.highly_sensitive_given_y || r.sensitive_given_y);
        }
        if f.x_size() >= 2 {
            prop_assert!(!r.highly_sensitive_given_x || r.sensitive_given_x);
        }
        if r.totally_sensitive {
            prop_assert!(is_hk(&f));
        }
    }

    #[test]
    fn witnesses_reverify(rows in table(), n in 1..=2usize) {
        let (_, v) = lift(&rows, n);
        let r = classify(&v, Budget::default()).unwrap();
        for w in &r.witnesses {
            prop_assert!(w.confirms(&v), "{:?}", w);
        }
    }

    #[test]
    fn eq_count_is_at_most_smaller_word_space(rows in table(), n in 1..=2usize) {
        let (_, v) = lift(&rows, n);
        for z in 0..v.num_labels() as u32 {
            prop_assert!(eq_count(&v, z, Budget::default()).unwrap() <= v.num_x().min(v.num_y()));
        }
    }

    #[test]
    fn eq_count_matches_subset_search(rows in table(), n in 1..=2usize) {
        let (_, v) = lift(&rows, n);
        for z in 0..v.num_labels() as u32 {
            let pairs = fiber(&v, z);
            if pairs.len() <= 12 {
                prop_assert_eq!(eq_count(&v, z, Budget::default()).unwrap(), brute_matching(&pairs));
            }
        }
    }

    #[test]
    fn totally_sensitive_has_zero_eq_rate(rows in table()) {
        let (_, v) = lift(&rows, 2);
        if classify(&v, Budget::default()).unwrap().totally_sensitive {
            prop_assert_eq!(max_eq_rate(&v, Budget::default()).unwrap(), 0.0);
        }
    }

    #[test]
    fn joint_sensitivity_is_unit_matching(rows in table(), n in 1..=2usize) {
        let (_, v) = lift(&rows, n);
        let joint = classify(&v, Budget::default()).unwrap().jointly_sensitive;
        prop_assert_eq!(joint, max_eq(&v, Budget::default()).unwrap().0 <= 1);
    }

    /// Within one decoder cell, the correctly decoded pairs of a jointly
    /// sensitive function all share the x or the y of any one of them.
    #[test]
    fn decoded_cells_are_crosses(rows in table(), n in 1..=3usize, seed in any::<u64>()) {
        let (_, v) = lift(&rows, n);
        prop_assume!(classify(&v, Budget::default()).unwrap().jointly_sensitive);
        let (a, b) = (rows.len(), rows[0].len());
        let joint = vec![vec![1.0 / (a * b) as f64; b]; a];
        let s = SourceModel::iid(joint).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&v, &s, RandomCodeOptions::default(), Budget::default(), &mut rng).unwrap();
        let k2 = code.codebook2.len();
        for c1 in 0..code.codebook1.len() {
            for c2 in 0..k2 {
                let Some(z) = code.decoder[c1 * k2 + c2] else { continue };
                let cell: Vec<(usize, usize)> = (0..v.num_x())
                    .filter(|&x| code.enc1[x] as usize == c1)
                    .flat_map(|x| (0..v.num_y()).filter(|&y| code.enc2[y] as usize == c2).map(move |y| (x, y)))
                    .filter(|&(x, y)| v.at(x, y) == z)
                    .collect();
                for &(xs, ys) in &cell {
                    for &(x, y) in &cell {
                        prop_assert!(x == xs || y == ys);
                    }
                }
            }
        }
    }
}

#[test]
fn one_letter_alphabet_is_vacuously_highly_sensitive() {
    let (_, v) = lift(&[vec![0, 0]], 1);
    let r = classify(&v, Budget::default()).unwrap();
    assert!(r.highly_sensitive_given_x);
    assert!(!r.sensitive_given_x);
}

#[test]
fn mod_sum_eq_rate_is_rho_log_m() {
    for (xs, ys) in [(2, 2), (2, 3), (3, 3)] {
        let m = xs.min(ys) as f64;
        for n in 1..=6usize {
            if ((xs * ys) as u128).pow(n as u32) > 1 << 22 {
                continue;
            }
            for k in 0..=n {
                let rho = k as f64 / n as f64;
                let f = mod_sum_function(xs, ys, n, rho, Budget::default()).unwrap();
                let rate = max_eq_rate(&f, Budget::default()).unwrap();
                assert!(
                    (rate - rho * m.log2()).abs() < 1e-12,
                    "{xs}x{ys} n={n} k={k}: {rate}"
                );
            }
        }
    }
}
