use rand::Rng;
use serde::Serialize;

use super::entropy::table_entropies;
use super::markov::{joint_entropy_rate, observed_entropy_rate, stationary};
use crate::error::{Error, Result};
use crate::sources::{anti_diagonal_letter, SourceModel};

/// Largest observed-word tree explored when bracketing hidden entropy rates.
const MAX_LEAVES: usize = 1 << 16;

/// Upper limits in probability of the normalised self-information densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEntropies {
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub h_joint: f64,
    /// Half-width of the interval known to contain each value (0 when exact).
    pub uncertainty: f64,
}

fn from_table(t: &[Vec<f64>]) -> SpectralEntropies {
    let (hj, hx, hy) = table_entropies(t);
    SpectralEntropies {
        h_x_given_y: hj - hy,
        h_y_given_x: hj - hx,
        h_joint: hj,
        uncertainty: 0.0,
    }
}

/// Spectral entropies of the supported source models.
pub fn spectral_entropies(source: &SourceModel) -> Result<SpectralEntropies> {
    source.validate()?;
    match source {
        SourceModel::Iid { joint, .. } => Ok(from_table(joint)),
        SourceModel::TwoSymbolwise { joint, .. } => {
            let e = from_table(joint);
            Ok(SpectralEntropies {
                h_x_given_y: e.h_x_given_y / 2.0,
                h_y_given_x: e.h_y_given_x / 2.0,
                h_joint: e.h_joint / 2.0,
                uncertainty: 0.0,
            })
        }
        SourceModel::AntiDiagonal {
            x_size,
            y_size,
            rho,
            epsilon,
        } => {
            let q = from_table(&anti_diagonal_letter(*x_size, *y_size, *epsilon));
            let (lx, ly) = ((*x_size as f64).log2(), (*y_size as f64).log2());
            Ok(SpectralEntropies {
                h_x_given_y: rho * q.h_x_given_y + (1.0 - rho) * lx,
                h_y_given_x: rho * q.h_y_given_x + (1.0 - rho) * ly,
                h_joint: rho * q.h_joint + (1.0 - rho) * (lx + ly),
                uncertainty: 0.0,
            })
        }
        SourceModel::Markov {
            y_size,
            x_size,
            transition,
            ..
        } => {
            let pi = stationary(transition)?;
            let hj = joint_entropy_rate(transition, &pi);
            let ys = *y_size;
            let (ylo, yhi) =
                observed_entropy_rate(transition, &pi, &|s| s % ys, ys, MAX_LEAVES, 1e-10);
            let (xlo, xhi) =
                observed_entropy_rate(transition, &pi, &|s| s / ys, *x_size, MAX_LEAVES, 1e-10);
            let (hy, hx) = ((ylo + yhi) / 2.0, (xlo + xhi) / 2.0);
            Ok(SpectralEntropies {
                h_x_given_y: hj - hy,
                h_y_given_x: hj - hx,
                h_joint: hj,
                uncertainty: ((yhi - ylo) / 2.0).max((xhi - xlo) / 2.0),
            })
        }
        SourceModel::Mixture { components } => {
            let mut out: Option<SpectralEntropies> = None;
            for c in components.iter().filter(|c| c.weight > 0.0) {
                let e = spectral_entropies(&c.source)?;
                out = Some(match out {
                    None => e,
                    Some(o) => SpectralEntropies {
                        h_x_given_y: o.h_x_given_y.max(e.h_x_given_y),
                        h_y_given_x: o.h_y_given_x.max(e.h_y_given_x),
                        h_joint: o.h_joint.max(e.h_joint),
                        uncertainty: o.uncertainty.max(e.uncertainty),
                    },
                });
            }
            out.ok_or_else(|| {
                Error::InvalidTable("mixture has no component with positive weight".into())
            })
        }
    }
}

/// Monte Carlo quantiles of the normalised self-information densities at
/// block length `n`, for cross-checking the closed forms.
pub fn empirical_spectrum<R: Rng + ?Sized>(
    source: &SourceModel,
    n: usize,
    samples: usize,
    quantile: f64,
    rng: &mut R,
) -> Result<SpectralEntropies> {
    if samples == 0 || !(0.0..=1.0).contains(&quantile) {
        return Err(Error::invalid("need samples > 0 and quantile in [0,1]"));
    }
    let mut cx = Vec::with_capacity(samples);
    let mut cy = Vec::with_capacity(samples);
    let mut cj = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (x, y) = source.sample(n, rng)?;
        let pj = source.block_pmf(&x, &y)?;
        let px = source.marginal_x(&x)?;
        let py = source.marginal_y(&y)?;
        let nf = n as f64;
        cj.push(-pj.log2() / nf);
        cx.push((py / pj).log2() / nf);
        cy.push((px / pj).log2() / nf);
    }
    let q = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        let idx = ((quantile * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
        v[idx]
    };
    Ok(SpectralEntropies {
        h_x_given_y: q(&mut cx),
        h_y_given_x: q(&mut cy),
        h_joint: q(&mut cj),
        uncertainty: 0.0,
    })
}
