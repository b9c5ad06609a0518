//! Linear coding of the field sum: both encoders apply the same random
//! linear map over GF(p) to their first coordinates, so the decoder can add
//! the two syndromes and decode `z = x + y` alone. Remaining coordinates are
//! sent as they are.
//!
//! The map is block diagonal so that maximum-likelihood decoding of each
//! block reduces to a coset-leader table.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bits::BitString;
use super::code::DistributedCode;
use super::error_prob::{monte_carlo, McEstimate};
use crate::error::{Error, Result};
use crate::funclass::{mod_sum_params, mod_sum_value, OutputSymbol, VectorFunction};
use crate::sources::{anti_diagonal_letter, SourceModel};
use crate::words::{Budget, WordSpace};

/// Largest coset-leader table, in syndromes.
pub const MAX_SYNDROMES: u64 = 1 << 21;
/// Longest block handled by one table.
pub const MAX_BLOCK_LEN: usize = 64;
/// Most deviation patterns enumerated per table.
pub const PATTERN_LIMIT: u64 = 20_000_000;
const MAX_DEVIATIONS: usize = 11;

/// A deviation pattern packed 11 bits per entry: `(pos << 5 | symbol) + 1`.
type Packed = u128;

fn unpack(mut code: Packed) -> impl Iterator<Item = (usize, usize)> {
    std::iter::from_fn(move || {
        let e = (code & 0x7ff) as usize;
        if e == 0 {
            return None;
        }
        code >>= 11;
        Some(((e - 1) >> 5, (e - 1) & 31))
    })
}

/// Coset leaders of one `rows x len` parity map.
#[derive(Clone)]
struct LeaderTable {
    len: usize,
    /// The map is the identity, so the syndrome is the word itself.
    identity: bool,
    rows: usize,
    /// `rows x len` entries in GF(p), row-major.
    matrix: Vec<u32>,
    cost: Vec<f32>,
    leader: Vec<Packed>,
    /// Deviations enumerated; leaders with at most this many are certified.
    depth: usize,
    certified: u64,
    reached: u64,
}

/// Summary of one leader table for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockSummary {
    pub len: usize,
    pub rows: usize,
    pub copies: usize,
    pub depth: usize,
    pub syndromes: u64,
    pub reached: u64,
    pub certified: u64,
}

#[derive(Clone)]
struct Law {
    p: usize,
    mode: usize,
    /// Extra cost in bits of each symbol over the mode; infinite if impossible.
    extra: Vec<f64>,
}

impl LeaderTable {
    fn build(len: usize, rows: usize, law: &Law, rng: &mut ChaCha8Rng) -> Result<Self> {
        let p = law.p;
        let matrix: Vec<u32> = if rows >= len {
            (0..len * len)
                .map(|i| u32::from(i / len == i % len))
                .collect()
        } else {
            (0..rows * len)
                .map(|_| rng.gen_range(0..p as u32))
                .collect()
        };
        let identity = rows >= len;
        let rows = rows.min(len);
        if identity {
            let size = (p as u64).pow(rows as u32);
            return Ok(LeaderTable {
                len,
                identity,
                rows,
                matrix,
                cost: Vec::new(),
                leader: Vec::new(),
                depth: len,
                certified: size,
                reached: size,
            });
        }
        let size = (p as u64).pow(rows as u32);
        let mut table = LeaderTable {
            len,
            identity,
            rows,
            matrix,
            cost: vec![f32::INFINITY; size as usize],
            leader: vec![0; size as usize],
            depth: 0,
            certified: 0,
            reached: 0,
        };
        let alts: Vec<usize> = (0..p)
            .filter(|&s| s != law.mode && law.extra[s].is_finite())
            .collect();
        // Deepest full enumeration within the pattern limit.
        let mut depth = 0;
        let mut total: u64 = 1;
        let mut binom: u64 = 1;
        while depth < len.min(MAX_DEVIATIONS) {
            let d = depth as u64 + 1;
            binom = binom.saturating_mul(len as u64 - depth as u64) / d;
            let add = binom.saturating_mul((alts.len() as u64).saturating_pow(d as u32));
            if add == 0 || total.saturating_add(add) > PATTERN_LIMIT {
                break;
            }
            total += add;
            depth += 1;
        }
        table.depth = depth;
        let mut syn = vec![0u32; rows];
        table.visit(0, 0, 0.0, 0, &mut syn, law, &alts);
        let min_extra = alts
            .iter()
            .map(|&s| law.extra[s])
            .fold(f64::INFINITY, f64::min);
        let bound = (depth as f64 + 1.0) * min_extra;
        table.reached = table.cost.iter().filter(|c| c.is_finite()).count() as u64;
        table.certified = table
            .cost
            .iter()
            .filter(|&&c| (c as f64) < bound - 1e-6 || depth == len)
            .count() as u64;
        Ok(table)
    }

    fn index(&self, syn: &[u32], p: usize) -> usize {
        syn.iter()
            .rev()
            .fold(0usize, |acc, &d| acc * p + d as usize)
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &mut self,
        start: usize,
        used: usize,
        cost: f64,
        code: Packed,
        syn: &mut [u32],
        law: &Law,
        alts: &[usize],
    ) {
        let p = law.p;
        let idx = self.index(syn, p);
        if (cost as f32) < self.cost[idx] {
            self.cost[idx] = cost as f32;
            self.leader[idx] = code;
        }
        if used == self.depth {
            return;
        }
        for pos in start..self.len {
            for &s in alts {
                let delta = (s + p - law.mode) % p;
                for r in 0..self.rows {
                    syn[r] = (syn[r] + self.matrix[r * self.len + pos] * delta as u32) % p as u32;
                }
                let entry = ((pos << 5 | s) + 1) as Packed;
                self.visit(
                    pos + 1,
                    used + 1,
                    cost + law.extra[s],
                    code | entry << (11 * used),
                    syn,
                    law,
                    alts,
                );
                for r in 0..self.rows {
                    syn[r] =
                        (syn[r] + self.matrix[r * self.len + pos] * (p - delta) as u32) % p as u32;
                }
            }
        }
    }

    fn syndrome(&self, word: &[usize], p: usize) -> Vec<u32> {
        (0..self.rows)
            .map(|r| {
                let row = &self.matrix[r * self.len..(r + 1) * self.len];
                (row.iter()
                    .zip(word)
                    .map(|(&h, &w)| h as u64 * w as u64)
                    .sum::<u64>()
                    % p as u64) as u32
            })
            .collect()
    }

    /// Most likely block `z` with the given syndrome of `z`, relative to the
    /// all-mode word's syndrome `mode_syn`.
    fn decode(&self, syn_z: &[u32], mode_syn: &[u32], law: &Law) -> Vec<usize> {
        let p = law.p as u32;
        if self.identity {
            return syn_z.iter().map(|&d| d as usize).collect();
        }
        let diff: Vec<u32> = syn_z
            .iter()
            .zip(mode_syn)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        let mut z = vec![law.mode; self.len];
        let idx = self.index(&diff, law.p);
        if self.cost[idx].is_finite() {
            for (pos, s) in unpack(self.leader[idx]) {
                z[pos] = s;
            }
        }
        z
    }
}

/// Block-diagonal linear code for the mod-sum function.
#[derive(Clone)]
pub struct KmCode {
    pub x_size: usize,
    pub y_size: usize,
    pub n: usize,
    pub prime: u32,
    pub sum_coords: usize,
    /// Requested rate in bits per sum coordinate.
    pub rate: f64,
    /// Total syndrome digits over GF(p).
    pub rows: usize,
    /// `(start, len, table index)` for each block.
    blocks: Vec<(usize, usize, usize)>,
    tables: Vec<LeaderTable>,
    mode_syn: Vec<Vec<u32>>,
    law: Law,
    syndrome_bits: usize,
    rest_bits1: usize,
    rest_bits2: usize,
}

fn bits_for(count_log2: f64) -> usize {
    (count_log2 - 1e-9).ceil().max(0.0) as usize
}

/// Split `total` into `parts` nearly equal pieces, larger pieces first.
fn split_even(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| total / parts + usize::from(i < total % parts))
        .collect()
}

/// Law of `x + y mod p` for one sum coordinate of the anti-diagonal source.
pub fn sum_law(x_size: usize, y_size: usize, epsilon: f64, prime: u32) -> Vec<f64> {
    let q = anti_diagonal_letter(x_size, y_size, epsilon);
    let mut z = vec![0.0; prime as usize];
    for (a, row) in q.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            z[(a + b) % prime as usize] += v;
        }
    }
    z
}

impl KmCode {
    /// Build the code for an anti-diagonal `source` with matching alphabets
    /// and `rho`, compressing the sum coordinates at `rate` bits each.
    pub fn new(source: &SourceModel, n: usize, rho: f64, rate: f64, seed: u64) -> Result<Self> {
        let (x_size, y_size, epsilon) = match *source {
            SourceModel::AntiDiagonal {
                x_size,
                y_size,
                rho: r,
                epsilon,
            } => {
                if (r - rho).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "source has rho {r}, code requested {rho}"
                    )));
                }
                (x_size, y_size, epsilon)
            }
            _ => {
                return Err(Error::invalid(
                    "linear sum coding needs the anti-diagonal source family",
                ))
            }
        };
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::invalid(format!(
                "rate must be nonnegative, got {rate}"
            )));
        }
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        let params = mod_sum_params(x_size, y_size, n, rho)?;
        let p = params.prime as usize;
        if p > 31 {
            return Err(Error::Unsupported(format!(
                "field size {p} is too large for the leader tables"
            )));
        }
        let m = params.sum_coords;
        let lp = (p as f64).log2();
        let rows = ((m as f64 * rate / lp) - 1e-9).ceil().max(0.0) as usize;
        let rows = rows.min(m);

        let zlaw = sum_law(x_size, y_size, epsilon, params.prime);
        let mode = (0..p).fold(0, |b, s| if zlaw[s] > zlaw[b] { s } else { b });
        let extra: Vec<f64> = zlaw
            .iter()
            .map(|&q| {
                if q > 0.0 {
                    (zlaw[mode] / q).log2()
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let law = Law { p, mode, extra };

        let max_rows = ((MAX_SYNDROMES as f64).log2() / lp).floor() as usize;
        let mut count = if m == 0 { 0 } else { 1 };
        while count > 0 && (m.div_ceil(count) > MAX_BLOCK_LEN || rows.div_ceil(count) > max_rows) {
            count += 1;
        }
        let lens = split_even(m, count);
        let block_rows = split_even(rows, count);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tables: Vec<LeaderTable> = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut blocks = Vec::new();
        let mut start = 0;
        for (&len, &r) in lens.iter().zip(&block_rows) {
            let t = match index.get(&(len, r)) {
                Some(&t) => t,
                None => {
                    tables.push(LeaderTable::build(len, r, &law, &mut rng)?);
                    index.insert((len, r), tables.len() - 1);
                    tables.len() - 1
                }
            };
            blocks.push((start, len, t));
            start += len;
        }
        let mode_syn = tables
            .iter()
            .map(|t| t.syndrome(&vec![mode; t.len], p))
            .collect();
        let total_rows: usize = blocks.iter().map(|&(_, _, t)| tables[t].rows).sum();
        Ok(KmCode {
            x_size,
            y_size,
            n,
            prime: params.prime,
            sum_coords: m,
            rate,
            rows: total_rows,
            blocks,
            tables,
            mode_syn,
            law,
            syndrome_bits: bits_for(total_rows as f64 * lp),
            rest_bits1: bits_for((n - m) as f64 * (x_size as f64).log2()),
            rest_bits2: bits_for((n - m) as f64 * (y_size as f64).log2()),
        })
    }

    pub fn block_summaries(&self) -> Vec<BlockSummary> {
        self.tables
            .iter()
            .enumerate()
            .map(|(i, t)| BlockSummary {
                len: t.len,
                rows: t.rows,
                copies: self.blocks.iter().filter(|b| b.2 == i).count(),
                depth: t.depth,
                syndromes: (self.law.p as u64).pow(t.rows as u32),
                reached: t.reached,
                certified: t.certified,
            })
            .collect()
    }

    /// Codeword lengths in bits of the two encoders.
    pub fn lengths(&self) -> (usize, usize) {
        (
            self.syndrome_bits + self.rest_bits1,
            self.syndrome_bits + self.rest_bits2,
        )
    }

    /// Rates in bits per source symbol of the two encoders.
    pub fn rates(&self) -> (f64, f64) {
        let (a, b) = self.lengths();
        (a as f64 / self.n as f64, b as f64 / self.n as f64)
    }

    fn syndromes(&self, w: &[usize]) -> Vec<u32> {
        let p = self.law.p;
        let mut out = Vec::with_capacity(self.rows);
        for &(start, len, t) in &self.blocks {
            let word: Vec<usize> = w[start..start + len].iter().map(|&s| s % p).collect();
            out.extend(self.tables[t].syndrome(&word, p));
        }
        out
    }

    fn pack(digits: &[u32], base: u32, bits: usize) -> BitString {
        let mut v = BigUint::from(0u32);
        for &d in digits.iter().rev() {
            v = v * base + d;
        }
        let mut out = BitString::new();
        for i in (0..bits).rev() {
            out.push(v.bit(i as u64));
        }
        out
    }

    fn unpack_digits(bits: &[bool], base: u32, count: usize) -> Vec<u32> {
        let mut v = BigUint::from(0u32);
        for &b in bits {
            v = (v << 1u32) + u32::from(b);
        }
        let b = BigUint::from(base);
        (0..count)
            .map(|_| {
                let d = (&v % &b).iter_u32_digits().next().unwrap_or(0);
                v /= &b;
                d
            })
            .collect()
    }

    fn encode(&self, w: &[usize], alphabet: usize, rest_bits: usize) -> Result<BitString> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        if let Some(&s) = w.iter().find(|&&s| s >= alphabet) {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                size: alphabet,
            });
        }
        let m = self.sum_coords;
        let mut out = Self::pack(&self.syndromes(w), self.prime, self.syndrome_bits);
        let rest: Vec<u32> = w[m..].iter().map(|&s| s as u32).collect();
        out.extend(&Self::pack(&rest, alphabet as u32, rest_bits));
        Ok(out)
    }

    pub fn encode1(&self, x: &[usize]) -> Result<BitString> {
        self.encode(x, self.x_size, self.rest_bits1)
    }

    pub fn encode2(&self, y: &[usize]) -> Result<BitString> {
        self.encode(y, self.y_size, self.rest_bits2)
    }

    /// Recover the function value from the two codewords.
    pub fn decode(&self, w1: &BitString, w2: &BitString) -> Result<Vec<OutputSymbol>> {
        let (l1, l2) = self.lengths();
        if w1.len() != l1 || w2.len() != l2 {
            return Err(Error::Decode("codeword has the wrong length".into()));
        }
        let sb = self.syndrome_bits;
        let p = self.prime;
        let s1 = Self::unpack_digits(&w1.0[..sb], p, self.rows);
        let s2 = Self::unpack_digits(&w2.0[..sb], p, self.rows);
        let rest_n = self.n - self.sum_coords;
        let r1 = Self::unpack_digits(&w1.0[sb..], self.x_size as u32, rest_n);
        let r2 = Self::unpack_digits(&w2.0[sb..], self.y_size as u32, rest_n);
        let mut out = Vec::with_capacity(self.n);
        let mut offset = 0;
        for &(_, _, t) in &self.blocks {
            let table = &self.tables[t];
            let sz: Vec<u32> = (0..table.rows)
                .map(|r| (s1[offset + r] + s2[offset + r]) % p)
                .collect();
            offset += table.rows;
            for z in table.decode(&sz, &self.mode_syn[t], &self.law) {
                out.push(OutputSymbol::Sum(z as u32));
            }
        }
        out.extend(
            r1.into_iter()
                .zip(r2)
                .map(|(a, b)| OutputSymbol::Pair(a, b)),
        );
        Ok(out)
    }

    /// Whether the code reproduces the function on `(x, y)`.
    pub fn is_correct(&self, x: &[usize], y: &[usize]) -> Result<bool> {
        let out = self.decode(&self.encode1(x)?, &self.encode2(y)?)?;
        Ok(out == mod_sum_value(x, y, self.prime, self.sum_coords))
    }

    /// Tabulate as a general code for small block lengths.
    pub fn to_table_code(&self, budget: Budget) -> Result<(DistributedCode, VectorFunction)> {
        let f = VectorFunction::mod_sum(
            self.x_size,
            self.y_size,
            self.n,
            self.prime,
            self.sum_coords,
            budget,
        )?;
        let xs = WordSpace::new(self.x_size, self.n);
        let ys = WordSpace::new(self.y_size, self.n);
        let words1 = (0..f.num_x())
            .map(|i| self.encode1(&xs.decode(i)))
            .collect::<Result<Vec<_>>>()?;
        let words2 = (0..f.num_y())
            .map(|i| self.encode2(&ys.decode(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut labels: HashMap<Vec<OutputSymbol>, u32> = HashMap::new();
        for id in 0..f.num_labels() as u32 {
            labels.insert(f.label(id).to_vec(), id);
        }
        let (b1, _) = super::code::index_codewords(words1.clone());
        let (b2, _) = super::code::index_codewords(words2.clone());
        let code = DistributedCode::from_parts(
            self.n,
            self.x_size,
            self.y_size,
            words1,
            words2,
            |c1, c2| {
                self.decode(&b1[c1 as usize], &b2[c2 as usize])
                    .ok()
                    .and_then(|z| labels.get(&z).copied())
            },
        )?;
        Ok((code, f))
    }
}

/// Monte Carlo estimate of the function error of `code` on `source`.
pub fn km_error_mc(
    code: &KmCode,
    source: &SourceModel,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    monte_carlo(trials, seed, |rng| {
        let (x, y) = source.sample(code.n, rng)?;
        Ok(!code.is_correct(&x, &y)?)
    })
}

fn log2_factorials(m: usize) -> Vec<f64> {
    let mut t = vec![0.0; m + 1];
    for i in 1..=m {
        t[i] = t[i - 1] + (i as f64).log2();
    }
    t
}

fn compositions(
    m: usize,
    parts: usize,
    out: &mut Vec<Vec<usize>>,
    cur: &mut Vec<usize>,
    budget: &mut u64,
) -> Result<()> {
    if cur.len() + 1 == parts {
        cur.push(m);
        out.push(cur.clone());
        cur.pop();
        *budget = budget.checked_sub(1).ok_or(Error::BudgetExceeded {
            required: 0,
            budget: 0,
        })?;
        return Ok(());
    }
    for k in 0..=m {
        cur.push(k);
        compositions(m - k, parts, out, cur, budget)?;
        cur.pop();
    }
    Ok(())
}

/// Least error of any decoder that sees only `log2_messages` bits about an
/// i.i.d. word of length `m` with letter law `law`: one minus the largest
/// probability of a set with `2^{log2_messages}` words.
pub fn min_error_fixed_length(
    law: &[f64],
    m: usize,
    log2_messages: f64,
    budget: Budget,
) -> Result<f64> {
    let support: Vec<f64> = law.iter().copied().filter(|&q| q > 0.0).collect();
    if support.is_empty() {
        return Err(Error::invalid("law has no support"));
    }
    let mut left = u64::try_from(budget.0.min(u64::MAX as u128)).unwrap_or(u64::MAX);
    let mut types = Vec::new();
    compositions(m, support.len(), &mut types, &mut Vec::new(), &mut left).map_err(|_| {
        Error::BudgetExceeded {
            required: u128::MAX,
            budget: budget.0,
        }
    })?;
    let lf = log2_factorials(m);
    // (log2 probability of one word, log2 number of words) per type.
    let mut classes: Vec<(f64, f64)> = types
        .iter()
        .map(|t| {
            let lp: f64 = t
                .iter()
                .zip(&support)
                .map(|(&k, &q)| k as f64 * q.log2())
                .sum();
            let lc = lf[m] - t.iter().map(|&k| lf[k]).sum::<f64>();
            (lp, lc)
        })
        .collect();
    classes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut mass = 0.0;
    let mut remaining = 2f64.powf(log2_messages);
    for (lp, lc) in classes {
        if remaining <= 0.0 {
            break;
        }
        let count = 2f64.powf(lc);
        let take = count.min(remaining);
        mass += 2f64.powf(lp + take.log2());
        remaining -= take;
    }
    Ok((1.0 - mass).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::error_prob::error_probability_exact;

    fn source(rho: f64, eps: f64) -> SourceModel {
        SourceModel::AntiDiagonal {
            x_size: 2,
            y_size: 2,
            rho,
            epsilon: eps,
        }
    }

    #[test]
    fn sum_law_binary() {
        let z = sum_law(2, 2, 0.1, 3);
        assert!((z[1] - 0.9).abs() < 1e-12);
        assert!((z[0] - 0.05).abs() < 1e-12 && (z[2] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn round_trip_bits() {
        let code = KmCode::new(&source(0.5, 0.1), 12, 0.5, 0.8, 3).unwrap();
        let digits = vec![2, 0, 1, 2, 2];
        let b = KmCode::pack(&digits, 3, 8);
        assert_eq!(KmCode::unpack_digits(&b.0, 3, 5), digits);
        let x = vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1];
        assert_eq!(code.encode1(&x).unwrap().len(), code.lengths().0);
    }

    #[test]
    fn no_sum_part_is_lossless() {
        let s = source(0.0, 0.1);
        let code = KmCode::new(&s, 4, 0.0, 0.5, 1).unwrap();
        let (c, f) = code.to_table_code(Budget::default()).unwrap();
        assert_eq!(
            error_probability_exact(&c, &s, &f, Budget::default()).unwrap(),
            0.0
        );
        assert_eq!(code.rates(), (1.0, 1.0));
    }

    #[test]
    fn full_rate_is_lossless() {
        let s = source(1.0, 0.2);
        let code = KmCode::new(&s, 4, 1.0, 2.0, 1).unwrap();
        let (c, f) = code.to_table_code(Budget::default()).unwrap();
        assert_eq!(
            error_probability_exact(&c, &s, &f, Budget::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn monte_carlo_matches_table() {
        let s = source(1.0, 0.15);
        let code = KmCode::new(&s, 6, 1.0, 0.9, 5).unwrap();
        let (c, f) = code.to_table_code(Budget::default()).unwrap();
        let exact = error_probability_exact(&c, &s, &f, Budget::default()).unwrap();
        let mc = km_error_mc(&code, &s, 20_000, 2).unwrap();
        assert!(
            (mc.estimate - exact).abs() < 5.0 * (exact * (1.0 - exact) / 2e4).sqrt() + 1e-9,
            "{exact} {mc:?}"
        );
    }

    #[test]
    fn converse_examples() {
        // Two words of a fair bit: one message gives error 1/2.
        assert!(
            (min_error_fixed_length(&[0.5, 0.5], 1, 0.0, Budget::default()).unwrap() - 0.5).abs()
                < 1e-12
        );
        assert!(min_error_fixed_length(&[0.5, 0.5], 3, 3.0, Budget::default()).unwrap() < 1e-12);
        // Most likely word of a biased pair of letters.
        let e = min_error_fixed_length(&[0.9, 0.1], 2, 0.0, Budget::default()).unwrap();
        assert!((e - (1.0 - 0.81)).abs() < 1e-12);
    }
}
