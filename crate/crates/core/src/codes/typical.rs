//! Sets of pairs whose self-information is small relative to code lengths,
//! and the counting quantities that bound them.

use serde::Serialize;

use super::code::DistributedCode;
use crate::error::{Error, Result};
use crate::regions::h2;
use crate::sources::{pmf_table, SourceModel};
use crate::words::{Budget, WordSpace};

/// Slack, in bits, allowed when comparing self-information to a threshold.
pub const INFO_TOL: f64 = 1e-9;

/// `ceil(v)` that ignores floating-point noise just above an integer.
pub fn ceil_robust(v: f64) -> usize {
    (v - 1e-9).ceil().max(0.0) as usize
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of words other than a fixed one within Hamming distance
/// `ceil(n beta) - 1`: `sum_{i=1}^{ceil(n beta)-1} (a-1)^i C(n,i)`.
pub fn v_count(n: usize, alphabet: usize, beta: f64) -> f64 {
    let top = ceil_robust(n as f64 * beta).saturating_sub(1).min(n);
    (1..=top)
        .fold(0.0, |acc, i| {
            acc + ((alphabet - 1) as f64).powi(i as i32) * binomial(n, i)
        })
        .round()
}

/// `n a^{n beta} 2^{n h(beta)}`, an upper bound on [`v_count`] for `beta <= 1/2`.
pub fn v_bound(n: usize, alphabet: usize, beta: f64) -> f64 {
    let nf = n as f64;
    nf * (alphabet as f64).powf(nf * beta) * 2f64.powf(nf * h2(beta.min(0.5)))
}

/// Slack `delta` and distance fraction `beta` shared by the bound checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalSetConfig {
    pub delta: f64,
    pub beta: f64,
}

impl TypicalSetConfig {
    pub fn new(delta: f64, beta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::invalid(format!(
                "beta must lie in (0, 1/2), got {beta}"
            )));
        }
        Ok(TypicalSetConfig { delta, beta })
    }

    /// Number of y-changes per pair, `ceil(n beta)`.
    pub fn changes(&self, n: usize) -> usize {
        ceil_robust(n as f64 * self.beta)
    }
}

/// Block probabilities with both marginals, indexed like the function tables.
#[derive(Debug, Clone)]
pub struct ProbTables {
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    pub p: Vec<f64>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
}

impl ProbTables {
    pub fn new(source: &SourceModel, n: usize, budget: Budget) -> Result<Self> {
        let p = pmf_table(source, n, budget)?;
        let nx = WordSpace::new(source.x_size(), n).count()?;
        let ny = WordSpace::new(source.y_size(), n).count()?;
        let mut px = vec![0.0; nx];
        let mut py = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                px[x] += p[x * ny + y];
                py[y] += p[x * ny + y];
            }
        }
        Ok(ProbTables {
            n,
            nx,
            ny,
            p,
            px,
            py,
        })
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    /// `-log2 P(x | y)`; infinite for zero-probability pairs.
    pub fn info_x_given_y(&self, x: usize, y: usize) -> f64 {
        let p = self.at(x, y);
        if p <= 0.0 {
            f64::INFINITY
        } else {
            (self.py[y] / p).log2()
        }
    }

    pub fn info_y_given_x(&self, x: usize, y: usize) -> f64 {
        let p = self.at(x, y);
        if p <= 0.0 {
            f64::INFINITY
        } else {
            (self.px[x] / p).log2()
        }
    }

    pub fn info_joint(&self, x: usize, y: usize) -> f64 {
        let p = self.at(x, y);
        if p <= 0.0 {
            f64::INFINITY
        } else {
            -p.log2()
        }
    }
}

/// Membership tests for the sets compared against code lengths.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds<'a> {
    pub tables: &'a ProbTables,
    pub len1: &'a [usize],
    pub len2: &'a [usize],
    pub delta: f64,
}

impl Thresholds<'_> {
    fn nd(&self) -> f64 {
        self.tables.n as f64 * self.delta
    }

    pub fn in_t1(&self, x: usize, y: usize) -> bool {
        self.tables.info_x_given_y(x, y) <= self.len1[x] as f64 + self.nd() + INFO_TOL
    }

    pub fn in_t2(&self, x: usize, y: usize) -> bool {
        self.tables.info_y_given_x(x, y) <= self.len2[y] as f64 + self.nd() + INFO_TOL
    }

    pub fn in_t0(&self, x: usize, y: usize) -> bool {
        self.tables.info_joint(x, y) <= (self.len1[x] + self.len2[y]) as f64 + self.nd() + INFO_TOL
    }

    /// Joint set widened by `n r + n delta`.
    pub fn in_t0_r(&self, x: usize, y: usize, r: f64) -> bool {
        let n = self.tables.n as f64;
        self.tables.info_joint(x, y)
            <= (self.len1[x] + self.len2[y]) as f64 + n * r + 2.0 * self.nd() + INFO_TOL
    }
}

/// Probability masses of the complements of the three sets and their union.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalMasses {
    pub given_y_complement: f64,
    pub given_x_complement: f64,
    pub joint_complement: f64,
    pub union_complement: f64,
    pub joint_r_complement: Option<f64>,
}

pub fn masses(th: &Thresholds, r: Option<f64>) -> TypicalMasses {
    let t = th.tables;
    let mut m = TypicalMasses {
        given_y_complement: 0.0,
        given_x_complement: 0.0,
        joint_complement: 0.0,
        union_complement: 0.0,
        joint_r_complement: r.map(|_| 0.0),
    };
    for x in 0..t.nx {
        for y in 0..t.ny {
            let p = t.at(x, y);
            if p <= 0.0 {
                continue;
            }
            let (a, b, c) = (!th.in_t1(x, y), !th.in_t2(x, y), !th.in_t0(x, y));
            if a {
                m.given_y_complement += p;
            }
            if b {
                m.given_x_complement += p;
            }
            if c {
                m.joint_complement += p;
            }
            if a || b || c {
                m.union_complement += p;
            }
            if let (Some(r), Some(acc)) = (r, m.joint_r_complement.as_mut()) {
                if !th.in_t0_r(x, y, r) {
                    *acc += p;
                }
            }
        }
    }
    m
}

/// Masses of the atypical sets for the lengths of `code`.
pub fn typical_masses(
    code: &DistributedCode,
    source: &SourceModel,
    delta: f64,
    r: Option<f64>,
    budget: Budget,
) -> Result<TypicalMasses> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    let t = ProbTables::new(source, code.n, budget)?;
    let (l1, l2) = (code.lengths1(), code.lengths2());
    Ok(masses(
        &Thresholds {
            tables: &t,
            len1: &l1,
            len2: &l2,
            delta,
        },
        r,
    ))
}

/// Pairs whose self-information leaves `n delta` of room below the target
/// lengths `l1`, `l2` (the decoding sets of the binning construction).
#[derive(Debug, Clone, Copy)]
pub struct DecodingSets<'a> {
    pub tables: &'a ProbTables,
    pub delta: f64,
}

impl DecodingSets<'_> {
    fn nd(&self) -> f64 {
        self.tables.n as f64 * self.delta
    }

    pub fn in_s1(&self, x: usize, y: usize, l1: usize) -> bool {
        self.tables.info_x_given_y(x, y) <= l1 as f64 - self.nd() + INFO_TOL
    }

    pub fn in_s2(&self, x: usize, y: usize, l2: usize) -> bool {
        self.tables.info_y_given_x(x, y) <= l2 as f64 - self.nd() + INFO_TOL
    }

    pub fn in_s0(&self, x: usize, y: usize, l1: usize, l2: usize) -> bool {
        self.tables.info_joint(x, y) <= (l1 + l2) as f64 - self.nd() + INFO_TOL
    }

    pub fn in_s(&self, x: usize, y: usize, l1: usize, l2: usize) -> bool {
        self.in_s1(x, y, l1) && self.in_s2(x, y, l2) && self.in_s0(x, y, l1, l2)
    }
}

/// Result of checking the counting bounds on the decoding sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CardinalityCertificate {
    pub checks: usize,
    pub violations: usize,
    /// Smallest `log2(bound) - log2(count)` over non-empty sections.
    pub min_log_slack: f64,
}

/// For every length pair in use: each y-section of the decoding set has at
/// most `2^{l1 - n delta}` elements, each x-section at most `2^{l2 - n delta}`,
/// and the whole set at most `2^{l1 + l2 - n delta}`.
pub fn cardinality_certificates(
    sets: &DecodingSets,
    l1s: &[usize],
    l2s: &[usize],
) -> CardinalityCertificate {
    let t = sets.tables;
    let nd = t.n as f64 * sets.delta;
    let mut distinct1: Vec<usize> = l1s.to_vec();
    distinct1.sort_unstable();
    distinct1.dedup();
    let mut distinct2: Vec<usize> = l2s.to_vec();
    distinct2.sort_unstable();
    distinct2.dedup();
    let mut cert = CardinalityCertificate {
        checks: 0,
        violations: 0,
        min_log_slack: f64::INFINITY,
    };
    let mut record = |count: usize, log_bound: f64| {
        cert.checks += 1;
        if count > 0 {
            let slack = log_bound - (count as f64).log2();
            if slack < -INFO_TOL {
                cert.violations += 1;
            }
            cert.min_log_slack = cert.min_log_slack.min(slack);
        }
    };
    for &l1 in &distinct1 {
        for &l2 in &distinct2 {
            let mut per_x = vec![0usize; t.nx];
            let mut per_y = vec![0usize; t.ny];
            let mut total = 0usize;
            for x in 0..t.nx {
                for y in 0..t.ny {
                    if sets.in_s(x, y, l1, l2) {
                        per_x[x] += 1;
                        per_y[y] += 1;
                        total += 1;
                    }
                }
            }
            for &c in &per_y {
                record(c, l1 as f64 - nd);
            }
            for &c in &per_x {
                record(c, l2 as f64 - nd);
            }
            record(total, (l1 + l2) as f64 - nd);
        }
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_count_examples() {
        assert_eq!(v_count(4, 2, 0.3), 4.0);
        assert_eq!(v_count(8, 2, 1.0 / 8.0), 0.0);
        assert!(v_count(8, 2, 1.0 / 8.0) <= 16.0 * 2.0 * 512.0);
        // distance <= 2 among ternary words of length 5: 2*5 + 4*10
        assert_eq!(v_count(5, 3, 0.5), 50.0);
        assert!(v_count(4, 2, 0.3) <= v_bound(4, 2, 0.3));
    }

    #[test]
    fn ceil_ignores_noise() {
        assert_eq!(ceil_robust(3.0 * (1.0 / 3.0)), 1);
        assert_eq!(ceil_robust(1.2), 2);
        assert_eq!(ceil_robust(7.0), 7);
    }

    #[test]
    fn large_delta_makes_everything_typical() {
        let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let t = ProbTables::new(&s, 2, Budget::default()).unwrap();
        let l = vec![0usize; 4];
        let m = masses(
            &Thresholds {
                tables: &t,
                len1: &l,
                len2: &l,
                delta: 100.0,
            },
            Some(0.0),
        );
        assert_eq!(m.union_complement, 0.0);
        assert_eq!(m.joint_r_complement, Some(0.0));
    }
}
