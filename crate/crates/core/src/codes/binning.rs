//! Turning a code for a function into a code that reproduces both sources:
//! each encoder sends its adapted length with an Elias header followed by a
//! random bin index of that many bits.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bits::{elias_int_encode, BitString};
use super::bounds::{BoundKind, BoundReport, Hypotheses};
use super::code::{fixed_length_index, DistributedCode};
use super::error_prob::error_probability_table;
use super::typical::{masses, v_count, DecodingSets, ProbTables, Thresholds, TypicalSetConfig};
use crate::error::{Error, Result};
use crate::funclass::VectorFunction;
use crate::sources::SourceModel;
use crate::words::Budget;

/// Adapted length `ceil(l + 2 n delta)`.
pub fn adapted_length(l: usize, n: usize, delta: f64) -> usize {
    let v = l as f64 + 2.0 * n as f64 * delta;
    ((v - 1e-9).ceil() as usize).max(1)
}

/// Pointwise cap on the length increase: `2 n delta + 2 log2(n L + 2 n delta) + 3`.
pub fn length_allowance(n: usize, max_len: usize, delta: f64) -> f64 {
    let nd = n as f64 * delta;
    2.0 * nd + 2.0 * (max_len as f64 + 2.0 * nd).log2() + 3.0
}

fn draw_bits(rng: &mut ChaCha8Rng, len: usize) -> BitString {
    BitString((0..len).map(|_| rng.gen::<bool>()).collect())
}

fn header_and_bin(l: usize, bin: &BitString) -> BitString {
    let mut w = elias_int_encode(l as u64).expect("adapted lengths are positive");
    w.extend(bin);
    w
}

/// The transformed code with its guarantees evaluated exactly.
#[derive(Debug, Clone, Serialize)]
pub struct BinningOutcome {
    pub code: DistributedCode,
    /// Error of the drawn code for reproducing `(x, y)`.
    pub realized_error: f64,
    /// Error averaged over the random bin assignment.
    pub expected_error: f64,
    pub reports: Vec<BoundReport>,
}

fn length_report(
    kind: BoundKind,
    n: usize,
    delta: f64,
    old: &[usize],
    new: &[usize],
) -> BoundReport {
    let max_len = old.iter().copied().max().unwrap_or(0);
    let excess = old
        .iter()
        .zip(new)
        .map(|(&a, &b)| b as f64 - a as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let allowance = length_allowance(n, max_len, delta);
    BoundReport::new(
        kind,
        n,
        excess,
        allowance,
        &[
            ("max_length", max_len as f64),
            ("n_delta", n as f64 * delta),
        ],
    )
}

fn group_by_bin(lens: &[usize], bins: &[BitString]) -> (Vec<BitString>, Vec<Vec<usize>>) {
    let mut ids: HashMap<BitString, usize> = HashMap::new();
    let mut words = Vec::with_capacity(lens.len());
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, (&l, b)) in lens.iter().zip(bins).enumerate() {
        let w = header_and_bin(l, b);
        let id = *ids.entry(w.clone()).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[id].push(i);
        words.push(w);
    }
    (words, members)
}

/// Probability that no competitor of `(x, y)` shares both bins.
///
/// `cands` lists the competitors `(x_hat, y_hat) != (x, y)` that lie in the
/// decoding set with matching lengths; a competitor `x_hat != x` shares the
/// bin of `x` with probability `a`, and likewise `b` for `y`.
fn no_collision_probability(
    x: usize,
    y: usize,
    cands: &[(usize, usize)],
    a: f64,
    b: f64,
) -> Result<f64> {
    // Competitors sharing y fail as soon as their x collides; those sharing
    // x fail when their y collides.
    let mut fatal_x: Vec<usize> = cands.iter().filter(|c| c.1 == y).map(|c| c.0).collect();
    fatal_x.sort_unstable();
    fatal_x.dedup();
    let mut base_y: Vec<usize> = cands.iter().filter(|c| c.0 == x).map(|c| c.1).collect();
    base_y.sort_unstable();
    base_y.dedup();
    let mut rest: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(xh, yh) in cands {
        if xh != x
            && yh != y
            && fatal_x.binary_search(&xh).is_err()
            && base_y.binary_search(&yh).is_err()
        {
            rest.entry(xh).or_default().push(yh);
        }
    }
    let mut free: Vec<(usize, Vec<usize>)> = rest.into_iter().collect();
    free.sort_unstable();
    let mut p = (1.0 - a).powi(fatal_x.len() as i32) * (1.0 - b).powi(base_y.len() as i32);
    if free.is_empty() || p == 0.0 {
        return Ok(p);
    }
    if free.len() > 24 {
        return Err(Error::BudgetExceeded {
            required: 1u128 << free.len(),
            budget: 1 << 24,
        });
    }
    // Sum over which remaining x_hat collide; their y_hat then must not.
    let mut total = 0.0;
    for mask in 0u32..(1u32 << free.len()) {
        let mut ys: Vec<usize> = Vec::new();
        let k = mask.count_ones() as i32;
        for (i, (_, yl)) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                ys.extend_from_slice(yl);
            }
        }
        ys.sort_unstable();
        ys.dedup();
        total +=
            a.powi(k) * (1.0 - a).powi(free.len() as i32 - k) * (1.0 - b).powi(ys.len() as i32);
    }
    p *= total;
    Ok(p)
}

/// Exact error of the two-encoder binning decoder averaged over bins, where
/// `collide(l)` is the probability that two words of adapted length `l`
/// share a bin.
pub fn expected_binning_error(
    tables: &ProbTables,
    lt1: &[usize],
    lt2: &[usize],
    delta: f64,
    collide: impl Fn(usize) -> f64,
) -> Result<f64> {
    let sets = DecodingSets { tables, delta };
    let mut by_len1: HashMap<usize, Vec<usize>> = HashMap::new();
    for (x, &l) in lt1.iter().enumerate() {
        by_len1.entry(l).or_default().push(x);
    }
    let mut by_len2: HashMap<usize, Vec<usize>> = HashMap::new();
    for (y, &l) in lt2.iter().enumerate() {
        by_len2.entry(l).or_default().push(y);
    }
    let mut err = 0.0;
    for x in 0..tables.nx {
        for y in 0..tables.ny {
            let p = tables.at(x, y);
            if p <= 0.0 {
                continue;
            }
            let (l1, l2) = (lt1[x], lt2[y]);
            if !sets.in_s(x, y, l1, l2) {
                err += p;
                continue;
            }
            let mut cands = Vec::new();
            for &xh in &by_len1[&l1] {
                for &yh in &by_len2[&l2] {
                    if (xh, yh) != (x, y) && sets.in_s(xh, yh, l1, l2) {
                        cands.push((xh, yh));
                    }
                }
            }
            err += p * (1.0 - no_collision_probability(x, y, &cands, collide(l1), collide(l2))?);
        }
    }
    Ok(err)
}

/// Build the binning code from the lengths of `phi` and evaluate its
/// length and error guarantees.
pub fn build_random_binning_sw(
    phi: &DistributedCode,
    source: &SourceModel,
    delta: f64,
    seed: u64,
    budget: Budget,
) -> Result<BinningOutcome> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    let n = phi.n;
    let tables = ProbTables::new(source, n, budget)?;
    budget.check(tables.nx as u128 * tables.ny as u128)?;
    let (l1, l2) = (phi.lengths1(), phi.lengths2());
    let lt1: Vec<usize> = l1.iter().map(|&l| adapted_length(l, n, delta)).collect();
    let lt2: Vec<usize> = l2.iter().map(|&l| adapted_length(l, n, delta)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins1: Vec<BitString> = lt1.iter().map(|&l| draw_bits(&mut rng, l)).collect();
    let bins2: Vec<BitString> = lt2.iter().map(|&l| draw_bits(&mut rng, l)).collect();
    let (words1, members1) = group_by_bin(&lt1, &bins1);
    let (words2, members2) = group_by_bin(&lt2, &bins2);
    let sets = DecodingSets {
        tables: &tables,
        delta,
    };
    let ny = tables.ny;
    let code = DistributedCode::from_parts(
        n,
        source.x_size(),
        source.y_size(),
        words1,
        words2,
        |c1, c2| {
            let (xs, ys) = (&members1[c1 as usize], &members2[c2 as usize]);
            let (l1, l2) = (lt1[xs[0]], lt2[ys[0]]);
            let mut found = None;
            for &x in xs {
                for &y in ys {
                    if sets.in_s(x, y, l1, l2) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some((x * ny + y) as u32);
                    }
                }
            }
            found
        },
    )?;
    let id = VectorFunction::identity(source.x_size(), source.y_size(), n, budget)?;
    let realized_error = error_probability_table(&code, &tables.p, &id);
    let expected_error =
        expected_binning_error(&tables, &lt1, &lt2, delta, |l| 2f64.powi(-(l as i32)))?;

    let th = Thresholds {
        tables: &tables,
        len1: &l1,
        len2: &l2,
        delta,
    };
    let atypical = masses(&th, None).union_complement;
    let tail = 3.0 * 2f64.powf(-(n as f64) * delta);
    let reports = vec![
        BoundReport::new(
            BoundKind::BinningError,
            n,
            expected_error,
            atypical + tail,
            &[
                ("atypical_mass", atypical),
                ("tail", tail),
                ("realized_error", realized_error),
            ],
        ),
        length_report(BoundKind::LengthX, n, delta, &l1, &code.lengths1()),
        length_report(BoundKind::LengthY, n, delta, &l2, &code.lengths2()),
    ];
    Ok(BinningOutcome {
        code,
        realized_error,
        expected_error,
        reports,
    })
}

/// Exact error of the side-information binning decoder averaged over bins.
pub fn expected_full_side_error(
    tables: &ProbTables,
    lt1: &[usize],
    delta: f64,
    collide: impl Fn(usize) -> f64,
) -> f64 {
    let sets = DecodingSets { tables, delta };
    let mut err = 0.0;
    for y in 0..tables.ny {
        for x in 0..tables.nx {
            let p = tables.at(x, y);
            if p <= 0.0 {
                continue;
            }
            let l = lt1[x];
            if !sets.in_s1(x, y, l) {
                err += p;
                continue;
            }
            let m = (0..tables.nx)
                .filter(|&xh| xh != x && lt1[xh] == l && sets.in_s1(xh, y, l))
                .count();
            err += p * (1.0 - (1.0 - collide(l)).powi(m as i32));
        }
    }
    err
}

/// Side-information version: only x is binned and the decoder sees y.
///
/// Requires sensitivity conditioned on Y and smoothness with respect to Y,
/// which enter the bound on the error through the constant `q`.
pub fn build_full_side_sw(
    phi: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    cfg: TypicalSetConfig,
    seed: u64,
    budget: Budget,
) -> Result<BinningOutcome> {
    let hyp = Hypotheses::check(f, source, budget)?;
    build_full_side_sw_with(phi, source, f, cfg, &hyp, seed, budget)
}

/// As [`build_full_side_sw`] with precomputed hypotheses.
pub fn build_full_side_sw_with(
    phi: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    cfg: TypicalSetConfig,
    hyp: &Hypotheses,
    seed: u64,
    budget: Budget,
) -> Result<BinningOutcome> {
    super::error_prob::check_shapes(phi, f)?;
    let q = hyp.require_given_y()?;
    let n = phi.n;
    let delta = cfg.delta;
    let tables = ProbTables::new(source, n, budget)?;
    budget.check(tables.nx as u128 * tables.nx as u128 * tables.ny as u128)?;
    let l1 = phi.lengths1();
    let lt1: Vec<usize> = l1.iter().map(|&l| adapted_length(l, n, delta)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bins1: Vec<BitString> = lt1.iter().map(|&l| draw_bits(&mut rng, l)).collect();
    let (words1, members1) = group_by_bin(&lt1, &bins1);
    let ny = tables.ny;
    let words2: Vec<BitString> = (0..ny).map(|y| fixed_length_index(y, ny)).collect();
    let sets = DecodingSets {
        tables: &tables,
        delta,
    };
    let code = DistributedCode::from_parts(
        n,
        source.x_size(),
        source.y_size(),
        words1,
        words2,
        |c1, y| {
            let xs = &members1[c1 as usize];
            let l = lt1[xs[0]];
            let y = y as usize;
            let mut hits = xs.iter().filter(|&&x| sets.in_s1(x, y, l));
            match (hits.next(), hits.next()) {
                (Some(&x), None) => Some((x * ny + y) as u32),
                _ => None,
            }
        },
    )?;
    let id = VectorFunction::identity(source.x_size(), source.y_size(), n, budget)?;
    let realized_error = error_probability_table(&code, &tables.p, &id);
    let expected_error = expected_full_side_error(&tables, &lt1, delta, |l| 2f64.powi(-(l as i32)));

    let zeros = vec![0usize; ny];
    let th = Thresholds {
        tables: &tables,
        len1: &l1,
        len2: &zeros,
        delta,
    };
    let t1c = masses(&th, None).given_y_complement;
    let decay = 2f64.powf(-(n as f64) * delta);
    let pe = error_probability_table(phi, &tables.p, f);
    let v = v_count(n, f.x_size(), cfg.beta);
    let coef = 1.0 + 2.0 * f.y_size() as f64 / (cfg.beta * q);
    let reports = vec![
        BoundReport::new(
            BoundKind::FullSideTypical,
            n,
            expected_error,
            t1c + decay,
            &[
                ("atypical_mass", t1c),
                ("tail", decay),
                ("realized_error", realized_error),
            ],
        ),
        BoundReport::new(
            BoundKind::FullSideError,
            n,
            expected_error,
            coef * pe + (v + 2.0) * decay,
            &[
                ("pe", pe),
                ("q", q),
                ("v", v),
                ("coefficient", coef),
                ("tail", (v + 2.0) * decay),
                ("realized_error", realized_error),
            ],
        ),
        length_report(BoundKind::LengthX, n, delta, &l1, &code.lengths1()),
    ];
    Ok(BinningOutcome {
        code,
        realized_error,
        expected_error,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::code::{random_code, RandomCodeOptions};

    fn source() -> SourceModel {
        SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap()
    }

    #[test]
    fn adapted_lengths() {
        assert_eq!(adapted_length(3, 2, 0.5), 5);
        assert_eq!(adapted_length(3, 3, 1.0 / 3.0), 5);
        assert_eq!(adapted_length(0, 2, 0.1), 1);
    }

    /// Brute force over every assignment of one of two bins per word.
    fn brute_two_bins(tables: &ProbTables, lt1: &[usize], lt2: &[usize], delta: f64) -> f64 {
        let sets = DecodingSets { tables, delta };
        let (nx, ny) = (tables.nx, tables.ny);
        let total = 1u64 << (nx + ny);
        let mut err = 0.0;
        for assign in 0..total {
            let b1 = |x: usize| assign >> x & 1;
            let b2 = |y: usize| assign >> (nx + y) & 1;
            for x in 0..nx {
                for y in 0..ny {
                    let p = tables.at(x, y);
                    if p <= 0.0 {
                        continue;
                    }
                    let mut hits = 0;
                    let mut right = false;
                    for xh in 0..nx {
                        for yh in 0..ny {
                            if lt1[xh] == lt1[x]
                                && lt2[yh] == lt2[y]
                                && b1(xh) == b1(x)
                                && b2(yh) == b2(y)
                                && sets.in_s(xh, yh, lt1[x], lt2[y])
                            {
                                hits += 1;
                                right |= (xh, yh) == (x, y);
                            }
                        }
                    }
                    if !(hits == 1 && right) {
                        err += p;
                    }
                }
            }
        }
        err / total as f64
    }

    #[test]
    fn expected_error_matches_brute_force() {
        let s = SourceModel::iid(vec![vec![0.3, 0.2], vec![0.15, 0.35]]).unwrap();
        let t = ProbTables::new(&s, 2, Budget::default()).unwrap();
        for (lt1, lt2) in [
            (vec![2, 2, 2, 2], vec![2, 2, 2, 2]),
            (vec![1, 2, 2, 3], vec![3, 2, 1, 2]),
            (vec![4, 4, 1, 1], vec![1, 1, 1, 4]),
        ] {
            for delta in [0.1, 0.3] {
                let exact = expected_binning_error(&t, &lt1, &lt2, delta, |_| 0.5).unwrap();
                let brute = brute_two_bins(&t, &lt1, &lt2, delta);
                assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
            }
        }
    }

    #[test]
    fn binning_guarantees_hold() {
        let f = VectorFunction::identity(2, 2, 2, Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..10 {
            let phi = random_code(
                &f,
                &source(),
                RandomCodeOptions::default(),
                Budget::default(),
                &mut rng,
            )
            .unwrap();
            let out =
                build_random_binning_sw(&phi, &source(), 0.5, seed, Budget::default()).unwrap();
            assert!(
                out.reports.iter().all(BoundReport::holds),
                "{:?}",
                out.reports
            );
            out.code.validate().unwrap();
        }
    }

    #[test]
    fn full_side_with_exact_code() {
        let f = VectorFunction::identity(2, 2, 2, Budget::default()).unwrap();
        let phi = crate::codes::code::binning_side_information_code(
            &f,
            &source(),
            2,
            Budget::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        let cfg = TypicalSetConfig::new(0.5, 0.4).unwrap();
        let out = build_full_side_sw(&phi, &source(), &f, cfg, 3, Budget::default()).unwrap();
        assert!(
            out.reports.iter().all(BoundReport::holds),
            "{:?}",
            out.reports
        );
        let r = &out.reports[1];
        assert_eq!(r.terms["pe"], 0.0);
        assert!((r.rhs - (r.terms["v"] + 2.0) * 0.5).abs() < 1e-12);
    }
}
