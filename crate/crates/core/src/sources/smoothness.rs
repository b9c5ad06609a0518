//! Certified smoothness constants: how much block probability can drop when
//! one symbol of one component is changed.

use serde::Serialize;

use super::model::{anti_diagonal_letter, pmf_table, SourceModel};
use crate::error::Result;
use crate::words::{Budget, WordSpace};

/// Ratios are capped at 1: a constant above 1 is never needed.
fn cap(q: f64) -> f64 {
    q.min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessVerdict {
    pub block_length_checked: usize,
    pub smooth_wrt_x: bool,
    pub smooth_wrt_y: bool,
    /// Largest constant valid for single changes of x (0 if none).
    pub q_x: f64,
    /// Largest constant valid for single changes of y (0 if none).
    pub q_y: f64,
    /// `min(q_x, q_y)`.
    pub q: f64,
    /// Constant valid at every block length, when a closed form is known.
    pub closed_form_q: Option<f64>,
    pub weakly_smooth_wrt_y: bool,
    pub weak_q_y: f64,
}

/// Minimum of `P(x, y') / P(x, y)` over single changes of y with `P(x, y) > 0`.
fn min_flip_ratio(p: &[f64], xs: WordSpace, ys: WordSpace) -> f64 {
    let ny = ys.count().unwrap_or(0);
    let nx = xs.count().unwrap_or(0);
    let mut q = f64::INFINITY;
    for x in 0..nx {
        for y in 0..ny {
            let base = p[x * ny + y];
            if base <= 0.0 {
                continue;
            }
            for i in 0..ys.len {
                let cur = ys.symbol(y, i);
                for s in (0..ys.alphabet).filter(|&s| s != cur) {
                    let r = p[x * ny + ys.replace(y, i, s)] / base;
                    if r < q {
                        q = r;
                    }
                }
            }
        }
    }
    cap(q)
}

fn transpose(p: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    let mut t = vec![0.0; p.len()];
    for x in 0..nx {
        for y in 0..ny {
            t[y * nx + x] = p[x * ny + y];
        }
    }
    t
}

/// Outcome of the weak smoothness check with respect to y.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakSmoothness {
    pub weakly_smooth: bool,
    pub q: f64,
    /// `(x, x_hat, y, index)` with no admissible change of `y` at `index`.
    pub witness: Option<WeakWitness>,
}

/// `(x, x_hat, y, index)`.
pub type WeakWitness = (Vec<usize>, Vec<usize>, Vec<usize>, usize);

fn weak_from_table(
    p: &[f64],
    xs: WordSpace,
    ys: WordSpace,
    budget: Budget,
) -> Result<WeakSmoothness> {
    let (nx, ny) = (xs.count()?, ys.count()?);
    budget.check(nx as u128 * nx as u128 * ny as u128 * xs.len as u128)?;
    let mut q = f64::INFINITY;
    for y in 0..ny {
        for x in 0..nx {
            let px = p[x * ny + y];
            if px <= 0.0 {
                continue;
            }
            for xh in 0..nx {
                let pxh = p[xh * ny + y];
                if xh == x || pxh <= 0.0 {
                    continue;
                }
                for i in 0..xs.len {
                    if xs.symbol(x, i) == xs.symbol(xh, i) {
                        continue;
                    }
                    let cur = ys.symbol(y, i);
                    let best = (0..ys.alphabet)
                        .filter(|&s| s != cur)
                        .map(|s| {
                            let yh = ys.replace(y, i, s);
                            (p[x * ny + yh] / px).min(p[xh * ny + yh] / pxh)
                        })
                        .fold(0.0f64, f64::max);
                    if best <= 0.0 {
                        return Ok(WeakSmoothness {
                            weakly_smooth: false,
                            q: 0.0,
                            witness: Some((xs.decode(x), xs.decode(xh), ys.decode(y), i)),
                        });
                    }
                    q = q.min(best);
                }
            }
        }
    }
    Ok(WeakSmoothness {
        weakly_smooth: true,
        q: cap(q),
        witness: None,
    })
}

/// Exhaustive weak smoothness check with respect to y at block length `n`.
pub fn weak_smoothness_check(
    source: &SourceModel,
    n: usize,
    budget: Budget,
) -> Result<WeakSmoothness> {
    let p = pmf_table(source, n, budget)?;
    let xs = WordSpace::new(source.x_size(), n);
    let ys = WordSpace::new(source.y_size(), n);
    weak_from_table(&p, xs, ys, budget)
}

/// Exhaustive smoothness check at block length `n`.
pub fn smoothness_check(
    source: &SourceModel,
    n: usize,
    budget: Budget,
) -> Result<SmoothnessVerdict> {
    let p = pmf_table(source, n, budget)?;
    let xs = WordSpace::new(source.x_size(), n);
    let ys = WordSpace::new(source.y_size(), n);
    let (nx, ny) = (xs.count()?, ys.count()?);
    let q_y = min_flip_ratio(&p, xs, ys);
    let q_x = min_flip_ratio(&transpose(&p, nx, ny), ys, xs);
    let weak = weak_from_table(&p, xs, ys, budget)?;
    Ok(SmoothnessVerdict {
        block_length_checked: n,
        smooth_wrt_x: q_x > 0.0,
        smooth_wrt_y: q_y > 0.0,
        q_x,
        q_y,
        q: q_x.min(q_y),
        closed_form_q: closed_form_q(source),
        weakly_smooth_wrt_y: weak.weakly_smooth,
        weak_q_y: weak.q,
    })
}

/// Minimum single-change ratio of a single-letter table, both components.
fn letter_ratio(t: &[Vec<f64>]) -> f64 {
    let mut q = f64::INFINITY;
    for (a, row) in t.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            for (b2, &p2) in row.iter().enumerate() {
                if b2 != b {
                    q = q.min(p2 / p);
                }
            }
            for (a2, row2) in t.iter().enumerate() {
                if a2 != a {
                    q = q.min(row2[b] / p);
                }
            }
        }
    }
    cap(q)
}

/// A constant valid for every block length, when the model admits one in
/// closed form. Never larger than the exhaustive constant at any length.
pub fn closed_form_q(source: &SourceModel) -> Option<f64> {
    match source {
        SourceModel::Iid { joint, .. } => Some(letter_ratio(joint)),
        SourceModel::Markov {
            initial,
            transition,
            y_size,
            ..
        } => {
            let k = transition.len();
            let min_w = transition
                .iter()
                .flatten()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let q1 = min_w * min_w;
            let mut q2 = f64::INFINITY;
            for s in 0..k {
                let p1 = initial[s / y_size][s % y_size];
                for &t in &transition[s] {
                    q2 = q2.min(t * p1);
                }
            }
            Some(cap(q1.min(q2)))
        }
        SourceModel::Mixture { components } => {
            let mut q = 1.0f64;
            for c in components {
                q = q.min(closed_form_q(&c.source)?);
            }
            Some(q)
        }
        SourceModel::TwoSymbolwise {
            x_size,
            y_size,
            joint,
        } => {
            // A single change alters one symbol inside one pair.
            let mut q = f64::INFINITY;
            for (u, row) in joint.iter().enumerate() {
                for (v, &p) in row.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    for pos in 0..2 {
                        for s in 0..*y_size {
                            let v2 = replace_in_pair(v, *y_size, pos, s);
                            if v2 != v {
                                q = q.min(row[v2] / p);
                            }
                        }
                        for s in 0..*x_size {
                            let u2 = replace_in_pair(u, *x_size, pos, s);
                            if u2 != u {
                                q = q.min(joint[u2][v] / p);
                            }
                        }
                    }
                }
            }
            Some(cap(q))
        }
        SourceModel::AntiDiagonal {
            x_size,
            y_size,
            epsilon,
            ..
        } => Some(letter_ratio(&anti_diagonal_letter(
            *x_size, *y_size, *epsilon,
        ))),
    }
}

fn replace_in_pair(w: usize, base: usize, pos: usize, s: usize) -> usize {
    let (a, b) = (w / base, w % base);
    if pos == 0 {
        s * base + b
    } else {
        a * base + s
    }
}

/// Single-letter test of weak smoothness for an i.i.d. table: every pair of
/// distinct rows must share either no column of joint support or at least
/// two. Returns `(a1, a2, b)` for a pair sharing exactly one column `b`.
pub fn is_weakly_smooth_iid(joint: &[Vec<f64>]) -> (bool, Option<(usize, usize, usize)>) {
    for a1 in 0..joint.len() {
        for a2 in a1 + 1..joint.len() {
            let shared: Vec<usize> = (0..joint[a1].len())
                .filter(|&b| joint[a1][b] > 0.0 && joint[a2][b] > 0.0)
                .collect();
            if shared.len() == 1 {
                return (false, Some((a1, a2, shared[0])));
            }
        }
    }
    (true, None)
}

/// An i.i.d. table is smooth exactly when all entries are positive.
pub fn is_smooth_iid(joint: &[Vec<f64>]) -> bool {
    joint.iter().flatten().all(|&p| p > 0.0)
}
