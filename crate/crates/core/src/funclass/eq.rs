//! Largest set of input pairs in one fiber with pairwise distinct x-words
//! and pairwise distinct y-words, via maximum bipartite matching.

use std::collections::HashMap;

use super::function::VectorFunction;
use crate::error::Result;
use crate::words::Budget;

/// Maximum matching size by Hopcroft-Karp. `adj[u]` lists right vertices of left vertex `u`.
pub fn max_matching(n_left: usize, n_right: usize, adj: &[Vec<usize>]) -> usize {
    const NIL: usize = usize::MAX;
    let mut match_l = vec![NIL; n_left];
    let mut match_r = vec![NIL; n_right];
    let mut dist = vec![0usize; n_left];
    let mut size = 0;
    loop {
        // BFS layering from free left vertices.
        let mut queue = Vec::with_capacity(n_left);
        for u in 0..n_left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            return size;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it)
            {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    while it[u] < adj[u].len() {
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = match_r[v];
        if w == usize::MAX
            || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist, it))
        {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

fn fiber_matching(pairs: &[(usize, usize)]) -> usize {
    let mut lx: HashMap<usize, usize> = HashMap::new();
    let mut ry: HashMap<usize, usize> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for &(x, y) in pairs {
        let nl = lx.len();
        let u = *lx.entry(x).or_insert_with(|| {
            adj.push(Vec::new());
            nl
        });
        let nr = ry.len();
        let v = *ry.entry(y).or_insert(nr);
        adj[u].push(v);
    }
    max_matching(lx.len(), ry.len(), &adj)
}

/// Pairs `(x, y)` with `f(x, y) = z`, grouped by label id.
fn fibers(f: &VectorFunction) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); f.num_labels()];
    for x in 0..f.num_x() {
        for y in 0..f.num_y() {
            out[f.at(x, y) as usize].push((x, y));
        }
    }
    out
}

/// Matching size of the fiber of label `z`; zero for labels outside the image.
pub fn eq_count(f: &VectorFunction, z: u32, budget: Budget) -> Result<usize> {
    budget.check(f.num_x() as u128 * f.num_y() as u128)?;
    if z as usize >= f.num_labels() {
        return Ok(0);
    }
    let pairs: Vec<(usize, usize)> = (0..f.num_x())
        .flat_map(|x| (0..f.num_y()).map(move |y| (x, y)))
        .filter(|&(x, y)| f.at(x, y) == z)
        .collect();
    Ok(fiber_matching(&pairs))
}

/// Largest fiber matching over all labels, with the first label attaining it.
pub fn max_eq(f: &VectorFunction, budget: Budget) -> Result<(usize, u32)> {
    budget.check(f.num_x() as u128 * f.num_y() as u128)?;
    let mut best = (0usize, 0u32);
    for (z, pairs) in fibers(f).iter().enumerate() {
        let m = fiber_matching(pairs);
        if m > best.0 {
            best = (m, z as u32);
        }
    }
    Ok(best)
}

/// `(1/n) log2 max_z EQ(z)`.
pub fn max_eq_rate(f: &VectorFunction, budget: Budget) -> Result<f64> {
    let (m, _) = max_eq(f, budget)?;
    Ok((m as f64).log2() / f.n() as f64)
}
