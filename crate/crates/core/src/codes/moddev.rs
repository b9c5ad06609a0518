//! Finite-n view of the moderate-deviation schedule: rates
//! `H(X|Y) + gamma n^{-t}`, `beta = 1/n` and `delta = n^{-3t/2}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::binning::{build_full_side_sw_with, length_allowance};
use super::bounds::{BoundKind, Hypotheses};
use super::code::binning_side_information_code;
use super::error_prob::error_probability_table;
use super::typical::{v_count, ProbTables, TypicalSetConfig};
use crate::error::{Error, Result};
use crate::funclass::{SingleLetterFunction, VectorFunction};
use crate::regions::table_entropies;
use crate::sources::SourceModel;
use crate::words::Budget;

/// Cap on `v_n(1/n)` used by the schedule: `16 |X| n^3`.
pub fn v_schedule_cap(n: usize, x_size: usize) -> f64 {
    16.0 * x_size as f64 * (n as f64).powi(3)
}

/// One block length of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub beta: f64,
    pub delta: f64,
    /// Bits of the fixed-length base code, `floor(n H + gamma n^{1-t})`.
    pub base_bits: usize,
    pub base_error: f64,
    /// `E |phi_hat(X)|` of the transformed code.
    pub expected_length: f64,
    /// `n H(X|Y)`.
    pub entropy_bits: f64,
    /// `(E|phi_hat| - n H) / n^{1-t}`.
    pub normalized_excess: f64,
    /// `(2 n delta + 2 log2(n L + 2 n delta) + 3) / n^{1-t}`.
    pub o_term: f64,
    /// `normalized_excess - o_term`, to be compared with `gamma`.
    pub surrogate: f64,
    pub expected_error: f64,
    pub error_bound: f64,
    /// `-log2(error_bound) / n^{1-2t}`, or infinity when the bound is 0.
    pub normalized_exponent: f64,
    pub v: f64,
    pub v_cap: f64,
    pub bounds_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTable {
    pub t: f64,
    pub gamma: f64,
    pub conditional_entropy: f64,
    pub rows: Vec<ScalingRow>,
}

/// Run the schedule on an i.i.d. positive source for each `n` in `ns`.
pub fn moderate_deviation_run(
    source: &SourceModel,
    f: &SingleLetterFunction,
    t: f64,
    gamma: f64,
    ns: &[usize],
    seed: u64,
    budget: Budget,
) -> Result<ScalingTable> {
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::invalid(format!("t must lie in (0, 1/2), got {t}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let joint = match source {
        SourceModel::Iid { joint, .. } => joint,
        _ => return Err(Error::invalid("the schedule is run on i.i.d. sources")),
    };
    if joint.iter().flatten().any(|&p| p <= 0.0) {
        return Err(Error::hypothesis(
            "positivity of the joint table",
            "some letter pair has zero probability",
        ));
    }
    if f.x_size() != source.x_size() || f.y_size() != source.y_size() {
        return Err(Error::invalid("function and source alphabets differ"));
    }
    let (hj, _, hy) = table_entropies(joint);
    let h = hj - hy;
    let mut rows = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let nf = n as f64;
        let beta = 1.0 / nf;
        let delta = nf.powf(-1.5 * t);
        let cfg = TypicalSetConfig::new(delta, beta)?;
        let fv = VectorFunction::lift(f, n, budget)?;
        let hyp = Hypotheses::check(&fv, source, budget)?;
        let scale = nf.powf(1.0 - t);
        let base_bits = (nf * h + gamma * scale + 1e-9).floor() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let phi = binning_side_information_code(&fv, source, base_bits, budget, &mut rng)?;
        let out = build_full_side_sw_with(
            &phi,
            source,
            &fv,
            cfg,
            &hyp,
            seed.wrapping_add(1000 + i as u64),
            budget,
        )?;
        let tables = ProbTables::new(source, n, budget)?;
        let lens = out.code.lengths1();
        let expected_length: f64 = tables
            .px
            .iter()
            .zip(&lens)
            .map(|(&p, &l)| p * l as f64)
            .sum();
        let error_bound = out
            .reports
            .iter()
            .find(|r| r.bound == BoundKind::FullSideError)
            .map(|r| r.rhs)
            .unwrap_or(f64::NAN);
        let o_term = length_allowance(n, base_bits, delta) / scale;
        let normalized_excess = (expected_length - nf * h) / scale;
        let v = v_count(n, f.x_size(), beta);
        rows.push(ScalingRow {
            n,
            beta,
            delta,
            base_bits,
            base_error: error_probability_table(&phi, &tables.p, &fv),
            expected_length,
            entropy_bits: nf * h,
            normalized_excess,
            o_term,
            surrogate: normalized_excess - o_term,
            expected_error: out.expected_error,
            error_bound,
            normalized_exponent: if error_bound > 0.0 {
                -error_bound.log2() / nf.powf(1.0 - 2.0 * t)
            } else {
                f64::INFINITY
            },
            v,
            v_cap: v_schedule_cap(n, f.x_size()),
            bounds_hold: out.reports.iter().all(|r| r.holds()),
        });
    }
    Ok(ScalingTable {
        t,
        gamma,
        conditional_entropy: h,
        rows,
    })
}
