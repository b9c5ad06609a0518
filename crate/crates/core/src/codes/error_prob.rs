use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::code::DistributedCode;
use crate::error::{Error, Result};
use crate::funclass::VectorFunction;
use crate::sources::{pmf_table, SourceModel};
use crate::words::Budget;

/// Trials per independent random stream; fixes the partition so estimates
/// do not depend on how the work is scheduled.
pub const MC_PARTITION: usize = 4096;

/// Exact probability that the decoder output differs from `f(x, y)`.
pub fn error_probability_exact(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    budget: Budget,
) -> Result<f64> {
    check_shapes(code, f)?;
    let p = pmf_table(source, f.n(), budget)?;
    Ok(error_probability_table(code, &p, f))
}

pub(crate) fn check_shapes(code: &DistributedCode, f: &VectorFunction) -> Result<()> {
    if code.n != f.n() || code.x_size != f.x_size() || code.y_size != f.y_size() {
        return Err(Error::invalid(
            "code and function have different block length or alphabets",
        ));
    }
    Ok(())
}

/// Exact error with a precomputed probability table.
pub fn error_probability_table(code: &DistributedCode, p: &[f64], f: &VectorFunction) -> f64 {
    let ny = f.num_y();
    let mut e = 0.0;
    for x in 0..f.num_x() {
        for y in 0..ny {
            if code.output(x, y) != Some(f.at(x, y)) {
                e += p[x * ny + y];
            }
        }
    }
    e
}

/// Monte Carlo estimate with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: usize,
    pub errors: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) / n) + z * z / (4.0 * n * n)).sqrt() / denom;
    let low = if errors == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let high = if errors == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (low, high)
}

/// Count failures of `trial` over `trials` seeded draws. Trial `t` uses
/// stream `t / MC_PARTITION` of a ChaCha generator seeded with `seed`.
pub fn monte_carlo<F>(trials: usize, seed: u64, mut trial: F) -> Result<McEstimate>
where
    F: FnMut(&mut ChaCha8Rng) -> Result<bool>,
{
    let mut errors = 0;
    let mut done = 0;
    let mut stream = 0u64;
    while done < trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let chunk = MC_PARTITION.min(trials - done);
        for _ in 0..chunk {
            if trial(&mut rng)? {
                errors += 1;
            }
        }
        done += chunk;
        stream += 1;
    }
    let (ci_low, ci_high) = wilson_interval(errors, trials);
    Ok(McEstimate {
        trials,
        errors,
        estimate: if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        },
        ci_low,
        ci_high,
    })
}

/// Monte Carlo error estimate of a table code.
pub fn error_probability_mc(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_shapes(code, f)?;
    let (xs, ys) = (f.x_space(), f.y_space());
    monte_carlo(trials, seed, |rng| {
        let (x, y) = source.sample(f.n(), rng)?;
        let (xi, yi) = (xs.encode(&x)?, ys.encode(&y)?);
        Ok(code.output(xi, yi) != Some(f.at(xi, yi)))
    })
}
