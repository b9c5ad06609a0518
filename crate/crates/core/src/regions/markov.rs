//! Stationary quantities of a finite Markov chain on symbol pairs.

use crate::error::{Error, Result};

use super::entropy::entropy;

/// Stationary distribution of an irreducible chain.
pub fn stationary(w: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = w.len();
    if !irreducible(w) {
        return Err(Error::Unsupported("Markov chain is not irreducible".into()));
    }
    // Solve pi (W - I) = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = vec![vec![0.0; k + 1]; k];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate().take(k) {
            *cell = w[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[k - 1].fill(1.0);
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap_or(col);
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Unsupported("singular stationary system".into()));
        }
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Ok(a.iter().map(|r| r[k].max(0.0)).collect())
}

fn irreducible(w: &[Vec<f64>]) -> bool {
    let k = w.len();
    let reach = |from: usize, fwd: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(s) = stack.pop() {
            for t in 0..k {
                let p = if fwd { w[s][t] } else { w[t][s] };
                if p > 0.0 && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen.into_iter().all(|b| b)
    };
    k > 0 && reach(0, true) && reach(0, false)
}

/// Entropy rate of the pair chain started in its stationary law.
pub fn joint_entropy_rate(w: &[Vec<f64>], pi: &[f64]) -> f64 {
    pi.iter().zip(w).map(|(p, row)| p * entropy(row)).sum()
}

/// Entropy rate of the observed component `obs(s)` of a stationary chain,
/// bracketed by the usual conditional-entropy bounds. Returns `(lower, upper)`.
pub fn observed_entropy_rate(
    w: &[Vec<f64>],
    pi: &[f64],
    obs: &dyn Fn(usize) -> usize,
    obs_size: usize,
    max_leaves: usize,
    tol: f64,
) -> (f64, f64) {
    let k = w.len();
    let mut prev_h = 0.0; // H(Y^{j-1})
    let mut prev_hc = 0.0; // H(Y^{j-1} | S_1)
    let mut best = (0.0f64, f64::INFINITY);
    let mut depth = 1;
    loop {
        let (h, hc) = block_entropies(w, pi, obs, obs_size, depth, k);
        let upper = h - prev_h;
        let lower = hc - prev_hc;
        best = (best.0.max(lower), best.1.min(upper));
        prev_h = h;
        prev_hc = hc;
        if best.1 - best.0 < tol || obs_size.pow((depth + 1) as u32) > max_leaves {
            return best;
        }
        depth += 1;
    }
}

/// `(H(Y^d), H(Y^d | S_1))` by depth-first enumeration of observed words.
fn block_entropies(
    w: &[Vec<f64>],
    pi: &[f64],
    obs: &dyn Fn(usize) -> usize,
    obs_size: usize,
    depth: usize,
    k: usize,
) -> (f64, f64) {
    struct Ctx<'a> {
        w: &'a [Vec<f64>],
        pi: &'a [f64],
        obs: &'a dyn Fn(usize) -> usize,
        obs_size: usize,
        k: usize,
        h: f64,
        hc: f64,
    }
    fn go(c: &mut Ctx, left: usize, alpha: Vec<Vec<f64>>) {
        if left == 0 {
            let per_start: Vec<f64> = alpha.iter().map(|a| a.iter().sum()).collect();
            let total: f64 = per_start.iter().sum();
            if total > 0.0 {
                c.h -= total * total.log2();
            }
            for (s0, &p) in per_start.iter().enumerate() {
                if p > 0.0 {
                    c.hc -= p * (p / c.pi[s0]).log2();
                }
            }
            return;
        }
        for y in 0..c.obs_size {
            let mut next = vec![vec![0.0; c.k]; alpha.len()];
            let mut any = false;
            for (a, nx) in alpha.iter().zip(next.iter_mut()) {
                for (s, &v) in a.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    for (t, cell) in nx.iter_mut().enumerate() {
                        let p = c.w[s][t];
                        if p > 0.0 && (c.obs)(t) == y {
                            *cell += v * p;
                            any = true;
                        }
                    }
                }
            }
            if any {
                go(c, left - 1, next);
            }
        }
    }
    let mut c = Ctx {
        w,
        pi,
        obs,
        obs_size,
        k,
        h: 0.0,
        hc: 0.0,
    };
    // Branch on the first observed symbol with the stationary start.
    for y in 0..obs_size {
        let alpha: Vec<Vec<f64>> = (0..k)
            .map(|s0| {
                let mut a = vec![0.0; k];
                if obs(s0) == y {
                    a[s0] = pi[s0];
                }
                a
            })
            .collect();
        if alpha.iter().any(|a| a.iter().any(|&v| v > 0.0)) {
            go(&mut c, depth - 1, alpha);
        }
    }
    (c.h, c.hc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_of_two_state_chain() {
        let w = vec![vec![0.9, 0.1], vec![0.3, 0.7]];
        let pi = stationary(&w).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-12 && (pi[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let w = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(stationary(&w).is_err());
    }

    #[test]
    fn fully_observed_rate_is_exact() {
        let w = vec![vec![0.9, 0.1], vec![0.3, 0.7]];
        let pi = stationary(&w).unwrap();
        let (lo, hi) = observed_entropy_rate(&w, &pi, &|s| s, 2, 1 << 12, 1e-12);
        let exact = joint_entropy_rate(&w, &pi);
        assert!((lo - exact).abs() < 1e-12 && (hi - exact).abs() < 1e-12);
    }

    #[test]
    fn iid_chain_observed_rate() {
        // Rows identical: the chain is i.i.d. with law (0.4, 0.1, 0.1, 0.4) on pairs.
        let row = vec![0.4, 0.1, 0.1, 0.4];
        let w = vec![row.clone(); 4];
        let pi = stationary(&w).unwrap();
        let (lo, hi) = observed_entropy_rate(&w, &pi, &|s| s % 2, 2, 1 << 12, 1e-12);
        assert!((lo - 1.0).abs() < 1e-9 && (hi - 1.0).abs() < 1e-9);
    }
}
