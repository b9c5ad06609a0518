use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funclass::sum_coordinate_count;

const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    #[serde(deserialize_with = "super::prob_serde::number")]
    pub weight: f64,
    pub source: SourceModel,
}

/// Joint distribution of a pair of sources over blocks of any length.
///
/// Markov states are pairs `(x, y)` numbered `x * y_size + y`; `transition[s]`
/// is the distribution of the next state given `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceModel {
    Iid {
        x_size: usize,
        y_size: usize,
        #[serde(deserialize_with = "super::prob_serde::table")]
        joint: Vec<Vec<f64>>,
    },
    Markov {
        x_size: usize,
        y_size: usize,
        #[serde(deserialize_with = "super::prob_serde::table")]
        initial: Vec<Vec<f64>>,
        #[serde(deserialize_with = "super::prob_serde::table")]
        transition: Vec<Vec<f64>>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    /// i.i.d. over pairs of consecutive symbols. `joint` is indexed by
    /// `u = x_1 * x_size + x_2` and `v = y_1 * y_size + y_2`.
    TwoSymbolwise {
        x_size: usize,
        y_size: usize,
        #[serde(deserialize_with = "super::prob_serde::table")]
        joint: Vec<Vec<f64>>,
    },
    /// First `floor(n rho)` symbol pairs follow a law concentrated on the
    /// anti-diagonal `(i, m-1-i)`, `m = min(x_size, y_size)`, with total
    /// off-diagonal mass `epsilon`; the remaining pairs are uniform.
    AntiDiagonal {
        x_size: usize,
        y_size: usize,
        #[serde(deserialize_with = "super::prob_serde::number")]
        rho: f64,
        #[serde(deserialize_with = "super::prob_serde::number")]
        epsilon: f64,
    },
}

fn check_table(t: &[Vec<f64>], rows: usize, cols: usize, what: &str) -> Result<()> {
    if t.len() != rows || t.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidTable(format!(
            "{what} must be {rows} x {cols}"
        )));
    }
    if t.iter().flatten().any(|&p| !(p.is_finite() && p >= 0.0)) {
        return Err(Error::InvalidTable(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let s: f64 = t.iter().flatten().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidTable(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Single-letter law of the anti-diagonal family, as rows indexed by x.
pub fn anti_diagonal_letter(x_size: usize, y_size: usize, epsilon: f64) -> Vec<Vec<f64>> {
    let m = x_size.min(y_size);
    let off = (x_size * y_size - m) as f64;
    let mut q = vec![vec![epsilon / off; y_size]; x_size];
    for (i, row) in q.iter_mut().enumerate().take(m) {
        row[m - 1 - i] = (1.0 - epsilon) / m as f64;
    }
    q
}

impl SourceModel {
    pub fn iid(joint: Vec<Vec<f64>>) -> Result<Self> {
        let x_size = joint.len();
        let y_size = joint.first().map_or(0, |r| r.len());
        let s = SourceModel::Iid {
            x_size,
            y_size,
            joint,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SourceModel::Iid {
                x_size,
                y_size,
                joint,
            } => {
                if *x_size == 0 || *y_size == 0 {
                    return Err(Error::InvalidTable("alphabets must be non-empty".into()));
                }
                check_table(joint, *x_size, *y_size, "joint table")
            }
            SourceModel::Markov {
                x_size,
                y_size,
                initial,
                transition,
            } => {
                if *x_size == 0 || *y_size == 0 {
                    return Err(Error::InvalidTable("alphabets must be non-empty".into()));
                }
                check_table(initial, *x_size, *y_size, "initial distribution")?;
                let k = x_size * y_size;
                if transition.len() != k {
                    return Err(Error::InvalidTable(format!(
                        "transition must have {k} rows"
                    )));
                }
                for (s, row) in transition.iter().enumerate() {
                    check_table(
                        std::slice::from_ref(row),
                        1,
                        k,
                        &format!("transition row {s}"),
                    )?;
                }
                Ok(())
            }
            SourceModel::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidTable(
                        "mixture needs at least one component".into(),
                    ));
                }
                let (x, y) = (components[0].source.x_size(), components[0].source.y_size());
                let mut total = 0.0;
                for c in components {
                    c.source.validate()?;
                    if c.source.x_size() != x || c.source.y_size() != y {
                        return Err(Error::InvalidTable(
                            "mixture components must share alphabets".into(),
                        ));
                    }
                    if !(c.weight.is_finite() && c.weight >= 0.0) {
                        return Err(Error::InvalidTable(
                            "mixture weights must be non-negative".into(),
                        ));
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > SUM_TOL {
                    return Err(Error::InvalidTable(format!(
                        "mixture weights sum to {total}"
                    )));
                }
                Ok(())
            }
            SourceModel::TwoSymbolwise {
                x_size,
                y_size,
                joint,
            } => {
                if *x_size == 0 || *y_size == 0 {
                    return Err(Error::InvalidTable("alphabets must be non-empty".into()));
                }
                check_table(joint, x_size * x_size, y_size * y_size, "pair table")
            }
            SourceModel::AntiDiagonal {
                x_size,
                y_size,
                rho,
                epsilon,
            } => {
                if x_size * y_size < 2 {
                    return Err(Error::InvalidTable(
                        "anti-diagonal family needs at least two symbol pairs".into(),
                    ));
                }
                if !(0.0..=1.0).contains(rho) {
                    return Err(Error::invalid(format!("rho must lie in [0,1], got {rho}")));
                }
                if !(0.0..1.0).contains(epsilon) {
                    return Err(Error::invalid(format!(
                        "epsilon must lie in [0,1), got {epsilon}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn x_size(&self) -> usize {
        match self {
            SourceModel::Iid { x_size, .. }
            | SourceModel::Markov { x_size, .. }
            | SourceModel::TwoSymbolwise { x_size, .. }
            | SourceModel::AntiDiagonal { x_size, .. } => *x_size,
            SourceModel::Mixture { components } => {
                components.first().map_or(0, |c| c.source.x_size())
            }
        }
    }

    pub fn y_size(&self) -> usize {
        match self {
            SourceModel::Iid { y_size, .. }
            | SourceModel::Markov { y_size, .. }
            | SourceModel::TwoSymbolwise { y_size, .. }
            | SourceModel::AntiDiagonal { y_size, .. } => *y_size,
            SourceModel::Mixture { components } => {
                components.first().map_or(0, |c| c.source.y_size())
            }
        }
    }

    /// Block lengths the model is defined for.
    pub fn check_block_length(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        match self {
            SourceModel::TwoSymbolwise { .. } if !n.is_multiple_of(2) => Err(Error::invalid(
                format!("pair-wise i.i.d. source needs an even block length, got {n}"),
            )),
            SourceModel::Mixture { components } => components
                .iter()
                .try_for_each(|c| c.source.check_block_length(n)),
            _ => Ok(()),
        }
    }

    fn check_words(&self, x: &[usize], y: &[usize]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        self.check_block_length(x.len())?;
        if let Some(&s) = x.iter().find(|&&s| s >= self.x_size()) {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.x_size(),
            });
        }
        if let Some(&s) = y.iter().find(|&&s| s >= self.y_size()) {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.y_size(),
            });
        }
        Ok(())
    }

    /// Probability of the block pair `(x, y)`.
    pub fn block_pmf(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        self.check_words(x, y)?;
        Ok(self.pmf_unchecked(x, y))
    }

    pub(crate) fn pmf_unchecked(&self, x: &[usize], y: &[usize]) -> f64 {
        match self {
            SourceModel::Iid { joint, .. } => x.iter().zip(y).map(|(&a, &b)| joint[a][b]).product(),
            SourceModel::Markov {
                y_size,
                initial,
                transition,
                ..
            } => {
                let mut p = initial[x[0]][y[0]];
                let mut s = x[0] * y_size + y[0];
                for (&a, &b) in x.iter().zip(y).skip(1) {
                    let t = a * y_size + b;
                    p *= transition[s][t];
                    s = t;
                }
                p
            }
            SourceModel::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.source.pmf_unchecked(x, y))
                .sum(),
            SourceModel::TwoSymbolwise {
                x_size,
                y_size,
                joint,
            } => x
                .chunks(2)
                .zip(y.chunks(2))
                .map(|(u, v)| joint[u[0] * x_size + u[1]][v[0] * y_size + v[1]])
                .product(),
            SourceModel::AntiDiagonal {
                x_size,
                y_size,
                rho,
                epsilon,
            } => {
                let k = sum_coordinate_count(x.len(), *rho);
                let q = anti_diagonal_letter(*x_size, *y_size, *epsilon);
                let head: f64 = x[..k].iter().zip(&y[..k]).map(|(&a, &b)| q[a][b]).product();
                head * (1.0 / (x_size * y_size) as f64).powi((x.len() - k) as i32)
            }
        }
    }

    /// Probability of the x-block alone.
    pub fn marginal_x(&self, x: &[usize]) -> Result<f64> {
        self.check_words(x, &vec![0; x.len()])?;
        Ok(self.marginal(x, true))
    }

    /// Probability of the y-block alone.
    pub fn marginal_y(&self, y: &[usize]) -> Result<f64> {
        self.check_words(&vec![0; y.len()], y)?;
        Ok(self.marginal(y, false))
    }

    pub(crate) fn marginal(&self, w: &[usize], is_x: bool) -> f64 {
        let (nx, ny) = (self.x_size(), self.y_size());
        let row_sum = |t: &Vec<Vec<f64>>, s: usize| -> f64 {
            if is_x {
                t[s].iter().sum()
            } else {
                t.iter().map(|r| r[s]).sum()
            }
        };
        match self {
            SourceModel::Iid { joint, .. } => w.iter().map(|&s| row_sum(joint, s)).product(),
            SourceModel::Markov {
                y_size,
                initial,
                transition,
                ..
            } => {
                // Forward recursion over the unobserved component.
                let other = if is_x { ny } else { nx };
                let state = |obs: usize, hid: usize| {
                    if is_x {
                        obs * y_size + hid
                    } else {
                        hid * y_size + obs
                    }
                };
                let mut alpha: Vec<f64> = (0..other)
                    .map(|h| {
                        if is_x {
                            initial[w[0]][h]
                        } else {
                            initial[h][w[0]]
                        }
                    })
                    .collect();
                for i in 1..w.len() {
                    let mut next = vec![0.0; other];
                    for (h, a) in alpha.iter().enumerate() {
                        if *a == 0.0 {
                            continue;
                        }
                        let s = state(w[i - 1], h);
                        for (h2, nv) in next.iter_mut().enumerate() {
                            *nv += a * transition[s][state(w[i], h2)];
                        }
                    }
                    alpha = next;
                }
                alpha.iter().sum()
            }
            SourceModel::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.source.marginal(w, is_x))
                .sum(),
            SourceModel::TwoSymbolwise {
                x_size,
                y_size,
                joint,
            } => {
                let base = if is_x { *x_size } else { *y_size };
                w.chunks(2)
                    .map(|u| row_sum(joint, u[0] * base + u[1]))
                    .product()
            }
            SourceModel::AntiDiagonal { rho, epsilon, .. } => {
                let k = sum_coordinate_count(w.len(), *rho);
                let q = anti_diagonal_letter(nx, ny, *epsilon);
                let head: f64 = w[..k].iter().map(|&s| row_sum(&q, s)).product();
                let other = if is_x { nx } else { ny };
                head * (1.0 / other as f64).powi((w.len() - k) as i32)
            }
        }
    }

    /// Draw one block pair of length `n`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<(Vec<usize>, Vec<usize>)> {
        self.check_block_length(n)?;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        self.sample_into(n, rng, &mut x, &mut y);
        Ok((x, y))
    }

    fn sample_into<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
        x: &mut Vec<usize>,
        y: &mut Vec<usize>,
    ) {
        match self {
            SourceModel::Iid { y_size, joint, .. } => {
                let flat: Vec<f64> = joint.iter().flatten().copied().collect();
                for _ in 0..n {
                    let s = draw(&flat, rng);
                    x.push(s / y_size);
                    y.push(s % y_size);
                }
            }
            SourceModel::Markov {
                y_size,
                initial,
                transition,
                ..
            } => {
                let flat: Vec<f64> = initial.iter().flatten().copied().collect();
                let mut s = draw(&flat, rng);
                for i in 0..n {
                    if i > 0 {
                        s = draw(&transition[s], rng);
                    }
                    x.push(s / y_size);
                    y.push(s % y_size);
                }
            }
            SourceModel::Mixture { components } => {
                let w: Vec<f64> = components.iter().map(|c| c.weight).collect();
                let k = draw(&w, rng);
                components[k].source.sample_into(n, rng, x, y);
            }
            SourceModel::TwoSymbolwise {
                x_size,
                y_size,
                joint,
            } => {
                let cols = y_size * y_size;
                let flat: Vec<f64> = joint.iter().flatten().copied().collect();
                for _ in 0..n / 2 {
                    let s = draw(&flat, rng);
                    let (u, v) = (s / cols, s % cols);
                    x.extend([u / x_size, u % x_size]);
                    y.extend([v / y_size, v % y_size]);
                }
            }
            SourceModel::AntiDiagonal {
                x_size,
                y_size,
                rho,
                epsilon,
            } => {
                let k = sum_coordinate_count(n, *rho);
                let flat: Vec<f64> = anti_diagonal_letter(*x_size, *y_size, *epsilon)
                    .into_iter()
                    .flatten()
                    .collect();
                for i in 0..n {
                    if i < k {
                        let s = draw(&flat, rng);
                        x.push(s / y_size);
                        y.push(s % y_size);
                    } else {
                        x.push(rng.gen_range(0..*x_size));
                        y.push(rng.gen_range(0..*y_size));
                    }
                }
            }
        }
    }
}

/// Inverse-CDF draw from unnormalised non-negative weights.
pub(crate) fn draw<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

/// Full table of block probabilities, indexed `x_index * |Y^n| + y_index`.
pub fn pmf_table(source: &SourceModel, n: usize, budget: crate::words::Budget) -> Result<Vec<f64>> {
    source.check_block_length(n)?;
    let xs = crate::words::WordSpace::new(source.x_size(), n);
    let ys = crate::words::WordSpace::new(source.y_size(), n);
    let (nx, ny) = (xs.count()?, ys.count()?);
    budget.check(nx as u128 * ny as u128)?;
    let ywords: Vec<Vec<usize>> = (0..ny).map(|j| ys.decode(j)).collect();
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x = xs.decode(i);
        for y in &ywords {
            out.push(source.pmf_unchecked(&x, y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn markov() -> SourceModel {
        SourceModel::Markov {
            x_size: 2,
            y_size: 2,
            initial: vec![vec![0.25, 0.25], vec![0.25, 0.25]],
            transition: vec![
                vec![0.7, 0.1, 0.1, 0.1],
                vec![0.1, 0.7, 0.1, 0.1],
                vec![0.1, 0.1, 0.7, 0.1],
                vec![0.1, 0.1, 0.1, 0.7],
            ],
        }
    }

    #[test]
    fn block_pmf_sums_to_one() {
        let sources = vec![
            SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap(),
            markov(),
            SourceModel::AntiDiagonal {
                x_size: 2,
                y_size: 3,
                rho: 0.5,
                epsilon: 0.1,
            },
            SourceModel::TwoSymbolwise {
                x_size: 2,
                y_size: 2,
                joint: vec![vec![1.0 / 16.0; 4]; 4],
            },
        ];
        for s in sources {
            let t = pmf_table(&s, 2, Default::default()).unwrap();
            let total: f64 = t.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn marginals_match_sums() {
        let s = markov();
        let n = 3;
        let ws = crate::words::WordSpace::new(2, n);
        for j in 0..8 {
            let y = ws.decode(j);
            let direct: f64 = (0..8)
                .map(|i| s.block_pmf(&ws.decode(i), &y).unwrap())
                .sum();
            assert!((s.marginal_y(&y).unwrap() - direct).abs() < 1e-12);
            let xdirect: f64 = (0..8)
                .map(|i| s.block_pmf(&y, &ws.decode(i)).unwrap())
                .sum();
            assert!((s.marginal_x(&y).unwrap() - xdirect).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SourceModel::iid(vec![vec![0.5, 0.6]]).is_err());
        let s = SourceModel::TwoSymbolwise {
            x_size: 2,
            y_size: 2,
            joint: vec![vec![1.0 / 16.0; 4]; 4],
        };
        assert!(s.block_pmf(&[0], &[0]).is_err());
        let s = SourceModel::iid(vec![vec![0.5, 0.5]]).unwrap();
        assert!(s.block_pmf(&[1], &[0]).is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let s = SourceModel::iid(vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (x, y) = s.sample(20_000, &mut rng).unwrap();
        let agree = x.iter().zip(&y).filter(|(a, b)| a == b).count() as f64 / 20_000.0;
        assert!((agree - 0.8).abs() < 0.02);
    }

    #[test]
    fn json_round_trip() {
        let s = markov();
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.starts_with(r#"{"kind":"markov""#));
        let back: SourceModel = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
