/// Shannon entropy in bits of a (possibly unnormalised) weight vector.
pub fn entropy(p: &[f64]) -> f64 {
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let s: f64 = p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let q = v / total;
            q * q.log2()
        })
        .sum();
    // Written as a difference so that a point mass gives +0, not -0.
    0.0 - s
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// The `p` in `[0, 1/2]` with `h2(p) = target`, by bisection.
pub fn h2_inverse(target: f64) -> f64 {
    let target = target.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(H(X,Y), H(X), H(Y))` of a single-letter joint table.
pub fn table_entropies(t: &[Vec<f64>]) -> (f64, f64, f64) {
    let joint: Vec<f64> = t.iter().flatten().copied().collect();
    let px: Vec<f64> = t.iter().map(|r| r.iter().sum()).collect();
    let cols = t.first().map_or(0, |r| r.len());
    let py: Vec<f64> = (0..cols).map(|b| t.iter().map(|r| r[b]).sum()).collect();
    (entropy(&joint), entropy(&px), entropy(&py))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert!((h2(0.11) - 0.499_915_8).abs() < 1e-6);
        assert_eq!(h2(0.0), 0.0);
        assert!((h2(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse() {
        let e = h2_inverse(0.1);
        assert!((h2(e) - 0.1).abs() < 1e-12);
        assert!(e > 0.012 && e < 0.014);
    }
}
