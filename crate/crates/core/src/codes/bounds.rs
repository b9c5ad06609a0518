//! Exact checks of the bounds relating atypical mass of correctly decoded
//! pairs to the error probability of a code.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::code::DistributedCode;
use super::error_prob::{check_shapes, error_probability_table};
use super::typical::{v_count, ProbTables, Thresholds, TypicalSetConfig};
use crate::error::{Error, Result};
use crate::funclass::{classify, max_eq, SensitivityReport, VectorFunction};
use crate::sources::{smoothness_check, SmoothnessVerdict, SourceModel};
use crate::words::Budget;

/// Absolute tolerance on `rhs - lhs` for floating-point summation noise.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Correct pairs whose x-information exceeds the first length.
    GivenY,
    /// Correct pairs whose y-information exceeds the second length.
    GivenX,
    /// Correct pairs whose joint information exceeds the sum of lengths.
    Joint,
    /// Joint bound with the threshold widened by `n r + n delta`.
    JointR,
    /// Expected error of the binning code against the atypical mass.
    BinningError,
    /// Expected error of the side-information binning code against the
    /// atypical mass of the first set.
    FullSideTypical,
    /// Expected error of the side-information binning code against the
    /// error of the original code.
    FullSideError,
    /// Largest codeword-length increase of the first encoder.
    LengthX,
    /// Largest codeword-length increase of the second encoder.
    LengthY,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::GivenY => "given_y",
            BoundKind::GivenX => "given_x",
            BoundKind::Joint => "joint",
            BoundKind::JointR => "joint_r",
            BoundKind::BinningError => "binning_error",
            BoundKind::FullSideTypical => "full_side_typical",
            BoundKind::FullSideError => "full_side_error",
            BoundKind::LengthX => "length_x",
            BoundKind::LengthY => "length_y",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One inequality `lhs <= rhs` evaluated exactly, with the named terms that
/// make up the right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: BoundKind,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub terms: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(bound: BoundKind, n: usize, lhs: f64, rhs: f64, terms: &[(&str, f64)]) -> Self {
        BoundReport {
            bound,
            n,
            lhs,
            rhs,
            slack: rhs - lhs,
            terms: terms.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn holds(&self) -> bool {
        self.slack >= -BOUND_TOL
    }
}

/// Sensitivity and smoothness facts needed by the bounds, computed once.
#[derive(Debug, Clone)]
pub struct Hypotheses {
    pub sensitivity: SensitivityReport,
    pub smoothness: SmoothnessVerdict,
}

impl Hypotheses {
    pub fn check(f: &VectorFunction, source: &SourceModel, budget: Budget) -> Result<Self> {
        super::code::check_alphabets(f, source)?;
        Ok(Hypotheses {
            sensitivity: classify(f, budget)?,
            smoothness: smoothness_check(source, f.n(), budget)?,
        })
    }

    pub fn require_given_y(&self) -> Result<f64> {
        if !self.sensitivity.sensitive_given_y {
            return Err(Error::hypothesis(
                "sensitivity conditioned on Y",
                "a collision survives every change of y",
            ));
        }
        if !self.smoothness.smooth_wrt_y {
            return Err(Error::hypothesis(
                "smoothness with respect to Y",
                "some change of y has zero probability",
            ));
        }
        Ok(self.smoothness.q_y)
    }

    pub fn require_given_x(&self) -> Result<f64> {
        if !self.sensitivity.sensitive_given_x {
            return Err(Error::hypothesis(
                "sensitivity conditioned on X",
                "a collision survives every change of x",
            ));
        }
        if !self.smoothness.smooth_wrt_x {
            return Err(Error::hypothesis(
                "smoothness with respect to X",
                "some change of x has zero probability",
            ));
        }
        Ok(self.smoothness.q_x)
    }

    pub fn require_total(&self) -> Result<f64> {
        self.require_given_y()?;
        self.require_given_x()?;
        if !self.sensitivity.jointly_sensitive {
            return Err(Error::hypothesis(
                "joint sensitivity",
                "two pairs differing in both components collide",
            ));
        }
        Ok(self.smoothness.q)
    }
}

/// Inputs shared by the four bounds.
struct Setup<'a> {
    code: &'a DistributedCode,
    f: &'a VectorFunction,
    tables: ProbTables,
    len1: Vec<usize>,
    len2: Vec<usize>,
    cfg: TypicalSetConfig,
    pe: f64,
    v: f64,
    u: f64,
}

impl Setup<'_> {
    fn thresholds(&self) -> Thresholds<'_> {
        Thresholds {
            tables: &self.tables,
            len1: &self.len1,
            len2: &self.len2,
            delta: self.cfg.delta,
        }
    }

    /// Mass of correctly decoded pairs outside the set given by `inside`.
    fn correct_outside(&self, inside: impl Fn(&Thresholds, usize, usize) -> bool) -> f64 {
        let th = self.thresholds();
        let t = &self.tables;
        let mut m = 0.0;
        for x in 0..t.nx {
            for y in 0..t.ny {
                let p = t.at(x, y);
                if p > 0.0 && self.code.output(x, y) == Some(self.f.at(x, y)) && !inside(&th, x, y)
                {
                    m += p;
                }
            }
        }
        m
    }

    fn decay(&self) -> f64 {
        2f64.powf(-(self.tables.n as f64) * self.cfg.delta)
    }

    fn given_y(&self, q: f64) -> BoundReport {
        let lhs = self.correct_outside(|th, x, y| th.in_t1(x, y));
        let ay = self.f.y_size() as f64;
        let coef = 2.0 * ay / (self.cfg.beta * q);
        let tail = (self.v + 1.0) * self.decay();
        BoundReport::new(
            BoundKind::GivenY,
            self.tables.n,
            lhs,
            coef * self.pe + tail,
            &[
                ("pe", self.pe),
                ("q", q),
                ("v", self.v),
                ("coefficient", coef),
                ("tail", tail),
            ],
        )
    }

    fn given_x(&self, q: f64) -> BoundReport {
        let lhs = self.correct_outside(|th, x, y| th.in_t2(x, y));
        let ax = self.f.x_size() as f64;
        let coef = 2.0 * ax / (self.cfg.beta * q);
        let tail = (self.u + 1.0) * self.decay();
        BoundReport::new(
            BoundKind::GivenX,
            self.tables.n,
            lhs,
            coef * self.pe + tail,
            &[
                ("pe", self.pe),
                ("q", q),
                ("u", self.u),
                ("coefficient", coef),
                ("tail", tail),
            ],
        )
    }

    fn joint_terms(&self, q: f64) -> (f64, f64) {
        let a = (self.f.x_size() + self.f.y_size()) as f64;
        let coef = 2.0 * a / (self.cfg.beta * q);
        let tail = (self.v + 1.0 + self.u + 1.0) * self.decay();
        (coef, tail)
    }

    fn joint(&self, q: f64) -> BoundReport {
        let lhs = self.correct_outside(|th, x, y| th.in_t0(x, y));
        let (coef, tail) = self.joint_terms(q);
        BoundReport::new(
            BoundKind::Joint,
            self.tables.n,
            lhs,
            coef * self.pe + tail,
            &[
                ("pe", self.pe),
                ("q", q),
                ("v", self.v),
                ("u", self.u),
                ("coefficient", coef),
                ("tail", tail),
            ],
        )
    }

    fn joint_r(&self, q: f64, r: f64) -> BoundReport {
        let lhs = self.correct_outside(|th, x, y| th.in_t0_r(x, y, r));
        let (coef, tail) = self.joint_terms(q);
        BoundReport::new(
            BoundKind::JointR,
            self.tables.n,
            lhs,
            coef * self.pe + tail,
            &[
                ("pe", self.pe),
                ("q", q),
                ("r", r),
                ("v", self.v),
                ("u", self.u),
                ("coefficient", coef),
                ("tail", tail),
            ],
        )
    }
}

/// Evaluate the atypicality bounds for `code` exactly.
///
/// Always reports the bounds conditioned on y and on x. The joint bound is
/// reported when `r` is `None` or the function is jointly sensitive; the
/// widened joint bound is reported when `r` is given, after checking that
/// every fiber of `f` has at most `2^{n(r + delta)}` matched pairs.
/// Fails with a named hypothesis when a required property is missing.
pub fn atypicality_bounds(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    cfg: TypicalSetConfig,
    r: Option<f64>,
    budget: Budget,
) -> Result<Vec<BoundReport>> {
    let hyp = Hypotheses::check(f, source, budget)?;
    atypicality_bounds_with(code, source, f, cfg, r, &hyp, budget)
}

/// As [`atypicality_bounds`] with precomputed hypotheses.
pub fn atypicality_bounds_with(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    cfg: TypicalSetConfig,
    r: Option<f64>,
    hyp: &Hypotheses,
    budget: Budget,
) -> Result<Vec<BoundReport>> {
    check_shapes(code, f)?;
    if let Some(r) = r {
        if !(r >= 0.0) {
            return Err(Error::invalid(format!("r must be nonnegative, got {r}")));
        }
    }
    let q_y = hyp.require_given_y()?;
    let q_x = hyp.require_given_x()?;
    let n = f.n();
    let tables = ProbTables::new(source, n, budget)?;
    let pe = error_probability_table(code, &tables.p, f);
    let setup = Setup {
        code,
        f,
        len1: code.lengths1(),
        len2: code.lengths2(),
        cfg,
        pe,
        v: v_count(n, f.x_size(), cfg.beta),
        u: v_count(n, f.y_size(), cfg.beta),
        tables,
    };
    let mut out = vec![setup.given_y(q_y), setup.given_x(q_x)];
    if r.is_none() || hyp.sensitivity.jointly_sensitive {
        out.push(setup.joint(hyp.require_total()?));
    }
    if let Some(r) = r {
        let (eq, _) = max_eq(f, budget)?;
        let cap = 2f64.powf(n as f64 * (r + cfg.delta));
        if eq as f64 > cap * (1.0 + 1e-12) {
            return Err(Error::hypothesis(
                "fiber matching size at most 2^{n(r+delta)}",
                format!("a fiber has {eq} matched pairs, more than {cap}"),
            ));
        }
        out.push(setup.joint_r(hyp.smoothness.q, r));
    }
    Ok(out)
}
