use serde::{Deserialize, Serialize};

use super::entropy::{h2, table_entropies};
use super::spectral::{spectral_entropies, SpectralEntropies};
use crate::error::{Error, Result};
use crate::sources::{anti_diagonal_letter, SourceModel};

/// Tolerance for region membership and inclusion.
pub const REGION_TOL: f64 = 1e-9;

/// `{(R1, R2) : R1 >= r1_min, R2 >= r2_min, R1 + R2 >= sum_min}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    pub r1_min: f64,
    pub r2_min: f64,
    pub sum_min: f64,
}

impl RateRegion {
    pub fn new(r1_min: f64, r2_min: f64, sum_min: f64) -> Self {
        RateRegion {
            r1_min,
            r2_min,
            sum_min,
        }
    }

    /// Same set with the sum constraint tightened to be active.
    pub fn canonical(&self) -> Self {
        RateRegion {
            sum_min: self.sum_min.max(self.r1_min + self.r2_min),
            ..*self
        }
    }

    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r1 >= self.r1_min - REGION_TOL
            && r2 >= self.r2_min - REGION_TOL
            && r1 + r2 >= self.sum_min - REGION_TOL
    }

    /// Whether `other` is a subset of `self`.
    pub fn includes(&self, other: &RateRegion) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.r1_min <= b.r1_min + REGION_TOL
            && a.r2_min <= b.r2_min + REGION_TOL
            && a.sum_min <= b.sum_min + REGION_TOL
    }

    pub fn equals(&self, other: &RateRegion) -> bool {
        self.includes(other) && other.includes(self)
    }

    pub fn intersect(&self, other: &RateRegion) -> RateRegion {
        RateRegion {
            r1_min: self.r1_min.max(other.r1_min),
            r2_min: self.r2_min.max(other.r2_min),
            sum_min: self.sum_min.max(other.sum_min),
        }
    }

    pub fn min_sum_rate(&self) -> f64 {
        self.canonical().sum_min
    }

    /// Vertices of the boundary, ordered by increasing `R1`.
    pub fn corner_points(&self) -> Vec<(f64, f64)> {
        let c = self.canonical();
        if c.sum_min > c.r1_min + c.r2_min + REGION_TOL {
            vec![
                (c.r1_min, c.sum_min - c.r1_min),
                (c.sum_min - c.r2_min, c.r2_min),
            ]
        } else {
            vec![(c.r1_min, c.r2_min)]
        }
    }
}

/// Fixed-length Slepian-Wolf region of a source.
pub fn sw_region_fl(source: &SourceModel) -> Result<RateRegion> {
    let e = spectral_entropies(source)?;
    Ok(region_from(&e))
}

pub fn region_from(e: &SpectralEntropies) -> RateRegion {
    RateRegion::new(e.h_x_given_y, e.h_y_given_x, e.h_joint)
}

/// Variable-length region: equal to the fixed-length one for memoryless
/// models, not computed otherwise.
pub fn sw_region_vl(source: &SourceModel) -> Result<Option<RateRegion>> {
    match source {
        SourceModel::Iid { .. } | SourceModel::TwoSymbolwise { .. } => {
            Ok(Some(sw_region_fl(source)?))
        }
        _ => Ok(None),
    }
}

/// Minimum rate of the first encoder when the decoder observes y.
pub fn sw_rate_full_side(source: &SourceModel) -> Result<f64> {
    Ok(spectral_entropies(source)?.h_x_given_y)
}

/// Outer bound for functions whose fibers hold at most `2^{n(r+o(1))}`
/// pairs with distinct words on both sides.
pub fn outer_bound_r_sensitive(e: &SpectralEntropies, r: f64) -> Result<RateRegion> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::invalid(format!(
            "r must be a non-negative number, got {r}"
        )));
    }
    Ok(RateRegion::new(e.h_x_given_y, e.h_y_given_x, e.h_joint - r))
}

/// Inner and outer regions for the mod-sum function under the anti-diagonal family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModSumRegions {
    pub inner: RateRegion,
    pub outer: RateRegion,
    pub rho: f64,
    pub min_alphabet: usize,
    /// `h2(epsilon) + epsilon log2(|X||Y| - m)`.
    pub epsilon_bound: f64,
    /// Exact entropy of the field sum of one anti-diagonal symbol pair.
    pub sum_entropy: f64,
    /// Whether `sum_entropy <= delta / rho`, so that linear coding of the
    /// sum reaches the inner corner.
    pub linear_coding_admissible: bool,
}

/// Rate regions for the mod-sum construction with `r` in `[0, log2 min(|X|,|Y|)]`.
///
/// `epsilon` is accepted when `h2(epsilon) <= delta / rho`; the stricter
/// condition that also accounts for the off-diagonal alphabet is reported
/// in `linear_coding_admissible`.
pub fn mod_sum_regions(
    x_size: usize,
    y_size: usize,
    r: f64,
    delta: f64,
    epsilon: f64,
) -> Result<ModSumRegions> {
    if x_size == 0 || y_size == 0 || x_size * y_size < 2 {
        return Err(Error::invalid("alphabets too small"));
    }
    let m = x_size.min(y_size);
    let rbar = (m as f64).log2();
    if !(r >= 0.0 && r <= rbar + REGION_TOL) {
        return Err(Error::invalid(format!(
            "r must lie in [0, {rbar}], got {r}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon must lie in [0,1)"));
    }
    let rho = if rbar > 0.0 { (r / rbar).min(1.0) } else { 0.0 };
    if rho > 0.0 && h2(epsilon) > delta / rho + REGION_TOL {
        return Err(Error::invalid(format!(
            "epsilon too large for the requested delta: h2({epsilon}) = {} > {}",
            h2(epsilon),
            delta / rho
        )));
    }
    let off = (x_size * y_size - m) as f64;
    let epsilon_bound = h2(epsilon) + epsilon * off.log2();
    let sum_entropy = field_sum_entropy(x_size, y_size, epsilon);
    let (lx, ly) = ((x_size as f64).log2(), (y_size as f64).log2());
    let inner = RateRegion::new(
        delta + (1.0 - rho) * lx,
        delta + (1.0 - rho) * ly,
        2.0 * delta + (1.0 - rho) * (lx + ly),
    );
    let outer = RateRegion::new(
        (1.0 - rho) * lx,
        (1.0 - rho) * ly,
        r - delta + (1.0 - rho) * (lx + ly),
    );
    Ok(ModSumRegions {
        inner,
        outer,
        rho,
        min_alphabet: m,
        epsilon_bound,
        sum_entropy,
        linear_coding_admissible: rho == 0.0 || sum_entropy <= delta / rho + REGION_TOL,
    })
}

/// Entropy of `X + Y mod p` for one anti-diagonal symbol pair.
pub fn field_sum_entropy(x_size: usize, y_size: usize, epsilon: f64) -> f64 {
    let p = crate::funclass::next_prime_above(x_size + y_size - 2) as usize;
    let q = anti_diagonal_letter(x_size, y_size, epsilon);
    let mut z = vec![0.0; p];
    for (a, row) in q.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            z[(a + b) % p] += v;
        }
    }
    super::entropy::entropy(&z)
}

/// Single-letter Shannon region of a joint table.
pub fn shannon_region(t: &[Vec<f64>]) -> RateRegion {
    let (hj, hx, hy) = table_entropies(t);
    RateRegion::new(hj - hy, hj - hx, hj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outer_bound_examples() {
        let e = SpectralEntropies {
            h_x_given_y: 0.5,
            h_y_given_x: 0.5,
            h_joint: 1.5,
            uncertainty: 0.0,
        };
        let o = outer_bound_r_sensitive(&e, 0.5).unwrap();
        assert_eq!(o, RateRegion::new(0.5, 0.5, 1.0));
        assert_eq!(o.min_sum_rate(), 1.0);
        let e = SpectralEntropies {
            h_x_given_y: 1.0,
            h_y_given_x: 1.0,
            h_joint: 2.0,
            uncertainty: 0.0,
        };
        assert_eq!(
            outer_bound_r_sensitive(&e, 0.5).unwrap(),
            RateRegion::new(1.0, 1.0, 1.5)
        );
        assert!(outer_bound_r_sensitive(&e, -0.1).is_err());
    }

    #[test]
    fn inclusion_after_canonicalisation() {
        let a = RateRegion::new(1.0, 1.0, 2.0);
        let b = RateRegion::new(1.0, 1.0, 1.5);
        assert!(a.equals(&b));
        let c = RateRegion::new(0.5, 0.5, 1.0);
        assert!(c.includes(&a) && !a.includes(&c));
    }

    #[test]
    fn corners() {
        let r = RateRegion::new(0.5, 0.5, 1.5);
        assert_eq!(r.corner_points(), vec![(0.5, 1.0), (1.0, 0.5)]);
        assert_eq!(
            RateRegion::new(1.0, 1.0, 0.5).corner_points(),
            vec![(1.0, 1.0)]
        );
    }

    #[test]
    fn mod_sum_gap() {
        let eps = crate::regions::entropy::h2_inverse(0.1);
        let g = mod_sum_regions(2, 2, 1.0, 0.1, eps).unwrap();
        assert!((g.inner.r1_min - 0.1).abs() < 1e-12 && (g.inner.r2_min - 0.1).abs() < 1e-12);
        assert!((g.inner.min_sum_rate() - 0.2).abs() < 1e-12);
        assert!((g.outer.sum_min - 0.9).abs() < 1e-12);
        assert!(!g.linear_coding_admissible);
        assert!(mod_sum_regions(2, 2, 1.0, 0.1, 0.2).is_err());
    }
}
