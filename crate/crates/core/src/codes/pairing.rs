//! Greedy pairing of correctly decoded words that share a codeword and a
//! y-word. Each pair of far-apart words yields, through sensitivity and
//! smoothness, probability mass in the error set; the transcript records the
//! witnesses and checks every inequality along the way.

use std::collections::HashMap;

use serde::Serialize;

use super::bounds::Hypotheses;
use super::code::DistributedCode;
use super::error_prob::{check_shapes, error_probability_table};
use super::typical::{v_count, ProbTables, TypicalSetConfig};
use crate::error::{Error, Result};
use crate::funclass::VectorFunction;
use crate::sources::SourceModel;
use crate::words::{Budget, WordSpace};

const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// Every single change of y keeps a fraction `q` of the mass.
    Strong,
    /// Some change at each position keeps a fraction `q` for both words.
    Weak,
}

/// One change of y at `position` that separates the two words of a pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub position: usize,
    pub y_hat: usize,
    /// The member of the pair decoded wrongly at `y_hat`.
    pub x_star: usize,
    pub prob: f64,
    /// `q` times the reference probability the witness must reach.
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStep {
    pub first: usize,
    pub second: usize,
    pub distance: usize,
    /// True when one of the pair has zero probability, so nothing is needed.
    pub skipped: bool,
    pub witnesses: Vec<PairWitness>,
}

/// Pairing of `D(a, y)`, the words with codeword `a` decoded correctly at `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingTranscript {
    pub codeword: u32,
    pub y: usize,
    pub members: usize,
    /// Number of pairs the counting argument guarantees, `[(|D| - v)/2]^+`.
    pub guaranteed: usize,
    pub steps: Vec<PairStep>,
    /// Sum of `P(x_{v+2k}, y)` over the guaranteed pairs.
    pub reference_mass: f64,
}

impl PairingTranscript {
    pub fn holds(&self) -> bool {
        self.steps.len() >= self.guaranteed
            && self
                .steps
                .iter()
                .all(|s| s.witnesses.iter().all(|w| w.holds))
    }
}

/// `[a]^+`: 0 below 1, otherwise the floor.
fn bracket_plus(a: f64) -> usize {
    if a < 1.0 {
        0
    } else {
        a.floor() as usize
    }
}

struct Ctx<'a> {
    code: &'a DistributedCode,
    f: &'a VectorFunction,
    t: ProbTables,
    xs: WordSpace,
    ys: WordSpace,
    mode: PairingMode,
    q: f64,
    changes: usize,
    v: f64,
}

impl Ctx<'_> {
    fn correct(&self, x: usize, y: usize) -> bool {
        self.code.output(x, y) == Some(self.f.at(x, y))
    }

    fn choose_y_hat(&self, x1: usize, x2: usize, y: usize, i: usize) -> Option<usize> {
        let cur = self.ys.symbol(y, i);
        let cands = (0..self.ys.alphabet)
            .filter(|&s| s != cur)
            .map(|s| self.ys.replace(y, i, s));
        match self.mode {
            PairingMode::Strong => cands
                .into_iter()
                .find(|&yh| self.f.at(x1, yh) != self.f.at(x2, yh)),
            PairingMode::Weak => {
                let (p1, p2) = (self.t.at(x1, y), self.t.at(x2, y));
                let mut best: Option<(f64, usize)> = None;
                for yh in cands {
                    let r = (self.t.at(x1, yh) / p1).min(self.t.at(x2, yh) / p2);
                    if best.is_none_or(|(b, _)| r > b) {
                        best = Some((r, yh));
                    }
                }
                best.map(|(_, yh)| yh)
            }
        }
    }

    fn transcript(&self, a: u32, y: usize, members: &[usize]) -> Result<PairingTranscript> {
        let mut sorted: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&x| self.correct(x, y))
            .collect();
        sorted.sort_by(|&p, &q| self.t.at(q, y).total_cmp(&self.t.at(p, y)).then(p.cmp(&q)));
        let d = sorted.len();
        let guaranteed = bracket_plus((d as f64 - self.v) / 2.0);
        let v = self.v.min(d as f64) as usize;
        let mut used = vec![false; d];
        let mut steps = Vec::new();
        let mut reference_mass = 0.0;
        while let Some(i1) = used.iter().position(|u| !u) {
            let x1 = sorted[i1];
            let partner = (0..d)
                .find(|&j| j != i1 && !used[j] && self.xs.hamming(x1, sorted[j]) >= self.changes);
            let Some(i2) = partner else { break };
            used[i1] = true;
            used[i2] = true;
            let x2 = sorted[i2];
            let k = steps.len() + 1;
            let reference = if k <= guaranteed {
                let p = self.t.at(sorted[v + 2 * k - 1], y);
                reference_mass += p;
                Some(p)
            } else {
                None
            };
            let skipped = self.t.at(x1, y) <= 0.0 || self.t.at(x2, y) <= 0.0;
            let mut witnesses = Vec::new();
            if !skipped {
                for &pos in self.xs.diff_positions(x1, x2).iter().take(self.changes) {
                    let yh = self.choose_y_hat(x1, x2, y, pos).ok_or_else(|| {
                        Error::hypothesis(
                            match self.mode {
                                PairingMode::Strong => "sensitivity conditioned on Y",
                                PairingMode::Weak => "weak smoothness with respect to Y",
                            },
                            format!("no change of y at position {pos} separates the pair"),
                        )
                    })?;
                    if self.f.at(x1, yh) == self.f.at(x2, yh) {
                        return Err(Error::hypothesis(
                            "high sensitivity conditioned on Y",
                            format!(
                                "the chosen change at position {pos} does not separate the pair"
                            ),
                        ));
                    }
                    // Both words share the codeword, so the decoder gives one answer.
                    let x_star = if !self.correct(x1, yh) { x1 } else { x2 };
                    let prob = self.t.at(x_star, yh);
                    let base = reference.unwrap_or_else(|| self.t.at(x_star, y));
                    let mut holds =
                        !self.correct(x_star, yh) && prob >= self.q * base * (1.0 - REL_TOL);
                    if self.mode == PairingMode::Weak {
                        holds &= self.t.at(x1, yh) >= self.q * self.t.at(x1, y) * (1.0 - REL_TOL)
                            && self.t.at(x2, yh) >= self.q * self.t.at(x2, y) * (1.0 - REL_TOL);
                    }
                    witnesses.push(PairWitness {
                        position: pos,
                        y_hat: yh,
                        x_star,
                        prob,
                        required: self.q * base,
                        holds,
                    });
                }
            }
            steps.push(PairStep {
                first: x1,
                second: x2,
                distance: self.xs.hamming(x1, x2),
                skipped,
                witnesses,
            });
        }
        Ok(PairingTranscript {
            codeword: a,
            y,
            members: d,
            guaranteed,
            steps,
            reference_mass,
        })
    }
}

/// Aggregate outcome of pairing every `(codeword, y)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingCheck {
    pub mode: PairingMode,
    pub n: usize,
    pub q: f64,
    pub v: f64,
    pub pe: f64,
    pub cells: usize,
    pub pairs: usize,
    pub failed_instances: usize,
    /// Most times one error pair is used as a witness, and its cap `n |Y|`.
    pub max_multiplicity: usize,
    pub multiplicity_cap: usize,
    /// `sum P(x_{v+2k}, y)` over all cells and guaranteed pairs.
    pub aggregate: f64,
    /// `|Y| / (beta q) * P_e`.
    pub aggregate_bound: f64,
    pub transcripts: Vec<PairingTranscript>,
}

impl PairingCheck {
    pub fn holds(&self) -> bool {
        self.failed_instances == 0
            && self.max_multiplicity <= self.multiplicity_cap
            && self.aggregate <= self.aggregate_bound + 1e-12
    }
}

fn context<'a>(
    code: &'a DistributedCode,
    source: &SourceModel,
    f: &'a VectorFunction,
    cfg: TypicalSetConfig,
    mode: PairingMode,
    hyp: &Hypotheses,
    budget: Budget,
) -> Result<Ctx<'a>> {
    check_shapes(code, f)?;
    let q = match mode {
        PairingMode::Strong => hyp.require_given_y()?,
        PairingMode::Weak => {
            if !hyp.sensitivity.highly_sensitive_given_y {
                return Err(Error::hypothesis(
                    "high sensitivity conditioned on Y",
                    "a collision is not broken at some position",
                ));
            }
            if !hyp.smoothness.weakly_smooth_wrt_y {
                return Err(Error::hypothesis(
                    "weak smoothness with respect to Y",
                    "no admissible change of y at some position",
                ));
            }
            hyp.smoothness.weak_q_y
        }
    };
    let n = f.n();
    Ok(Ctx {
        code,
        f,
        t: ProbTables::new(source, n, budget)?,
        xs: f.x_space(),
        ys: f.y_space(),
        mode,
        q,
        changes: cfg.changes(n),
        v: v_count(n, f.x_size(), cfg.beta),
    })
}

fn members_by_codeword(code: &DistributedCode) -> Vec<Vec<usize>> {
    let mut m = vec![Vec::new(); code.codebook1.len()];
    for (x, &c) in code.enc1.iter().enumerate() {
        m[c as usize].push(x);
    }
    m
}

/// Pair the cell `(a, y)` of `code`.
#[allow(clippy::too_many_arguments)]
pub fn pairing_construction(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    a: u32,
    y: usize,
    cfg: TypicalSetConfig,
    mode: PairingMode,
    budget: Budget,
) -> Result<PairingTranscript> {
    let hyp = Hypotheses::check(f, source, budget)?;
    let ctx = context(code, source, f, cfg, mode, &hyp, budget)?;
    let members = members_by_codeword(code);
    let cell = members
        .get(a as usize)
        .ok_or_else(|| Error::invalid(format!("codeword index {a} out of range")))?;
    if y >= ctx.t.ny {
        return Err(Error::invalid(format!("y index {y} out of range")));
    }
    ctx.transcript(a, y, cell)
}

/// Pair every cell and check the per-instance inequalities, the witness
/// multiplicity, and the aggregate bound against the error probability.
pub fn pairing_check(
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    cfg: TypicalSetConfig,
    mode: PairingMode,
    hyp: &Hypotheses,
    budget: Budget,
) -> Result<PairingCheck> {
    let ctx = context(code, source, f, cfg, mode, hyp, budget)?;
    let members = members_by_codeword(code);
    let mut transcripts = Vec::new();
    for (a, cell) in members.iter().enumerate() {
        for y in 0..ctx.t.ny {
            transcripts.push(ctx.transcript(a as u32, y, cell)?);
        }
    }
    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = 0;
    let mut failed = 0;
    let mut aggregate = 0.0;
    for t in &transcripts {
        pairs += t.steps.len();
        if !t.holds() {
            failed += 1;
        }
        aggregate += t.reference_mass;
        for w in t.steps.iter().flat_map(|s| &s.witnesses) {
            *uses.entry((w.x_star, w.y_hat)).or_default() += 1;
        }
    }
    let pe = error_probability_table(code, &ctx.t.p, f);
    let n = f.n();
    Ok(PairingCheck {
        mode,
        n,
        q: ctx.q,
        v: ctx.v,
        pe,
        cells: transcripts.len(),
        pairs,
        failed_instances: failed,
        max_multiplicity: uses.values().copied().max().unwrap_or(0),
        multiplicity_cap: n * f.y_size(),
        aggregate,
        aggregate_bound: f.y_size() as f64 / (cfg.beta * ctx.q) * pe,
        transcripts,
    })
}
