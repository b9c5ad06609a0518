use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Budget, WordSpace};

/// One coordinate of a vector output label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputSymbol {
    /// Dense label id of a single-letter function.
    Label(u32),
    /// Sum of the two inputs in a prime field.
    Sum(u32),
    /// The pair of inputs, passed through.
    Pair(u32, u32),
}

/// A function `X x Y -> Z` on finite alphabets, stored as a dense table.
///
/// Output labels are renumbered to `0..m` in order of first appearance
/// (row-major), so the label set is exactly the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleLetterFunction {
    x_size: usize,
    y_size: usize,
    table: Vec<u32>,
    labels: Vec<String>,
}

impl SingleLetterFunction {
    /// Build from rows indexed by x; each row lists outputs for every y.
    pub fn from_rows<L: ToString>(rows: &[Vec<L>]) -> Result<Self> {
        let x_size = rows.len();
        if x_size == 0 {
            return Err(Error::InvalidTable("function table has no rows".into()));
        }
        let y_size = rows[0].len();
        if y_size == 0 {
            return Err(Error::InvalidTable("function table has empty rows".into()));
        }
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut labels = Vec::new();
        let mut table = Vec::with_capacity(x_size * y_size);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != y_size {
                return Err(Error::InvalidTable(format!(
                    "row {a} has {} entries, expected {y_size}",
                    row.len()
                )));
            }
            for v in row {
                let key = v.to_string();
                let next = ids.len() as u32;
                let id = *ids.entry(key.clone()).or_insert_with(|| {
                    labels.push(key);
                    next
                });
                table.push(id);
            }
        }
        Ok(SingleLetterFunction {
            x_size,
            y_size,
            table,
            labels,
        })
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn image_size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn eval(&self, a: usize, b: usize) -> u32 {
        self.table[a * self.y_size + b]
    }

    pub fn label(&self, a: usize, b: usize) -> &str {
        &self.labels[self.eval(a, b) as usize]
    }

    /// Rows of dense label ids.
    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.y_size).map(|r| r.to_vec()).collect()
    }
}

/// Wire format: `{"x_size":2,"y_size":3,"table":[[0,1,2],[0,3,3]]}`.
/// Entries may be integers or strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    pub x_size: usize,
    pub y_size: usize,
    pub table: Vec<Vec<serde_json::Value>>,
}

impl FunctionFile {
    pub fn into_function(self) -> Result<SingleLetterFunction> {
        if self.table.len() != self.x_size {
            return Err(Error::InvalidTable(format!(
                "x_size is {} but table has {} rows",
                self.x_size,
                self.table.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.table.len());
        for row in &self.table {
            if row.len() != self.y_size {
                return Err(Error::InvalidTable(format!(
                    "y_size is {} but a row has {} entries",
                    self.y_size,
                    row.len()
                )));
            }
            let mut r = Vec::with_capacity(row.len());
            for v in row {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                    other => {
                        return Err(Error::InvalidTable(format!(
                            "labels must be integers or strings, got {other}"
                        )))
                    }
                };
                r.push(s);
            }
            rows.push(r);
        }
        SingleLetterFunction::from_rows(&rows)
    }

    pub fn from_function(f: &SingleLetterFunction) -> Self {
        let table = (0..f.x_size)
            .map(|a| {
                (0..f.y_size)
                    .map(|b| {
                        let l = f.label(a, b);
                        match l.parse::<i64>() {
                            Ok(v) if v.to_string() == l => serde_json::Value::from(v),
                            _ => serde_json::Value::String(l.to_string()),
                        }
                    })
                    .collect()
            })
            .collect();
        FunctionFile {
            x_size: f.x_size,
            y_size: f.y_size,
            table,
        }
    }
}

/// How a block function was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    SymbolWise(SingleLetterFunction),
    /// First `sum_coords` coordinates are sums modulo `prime`, the rest are pairs.
    ModSum {
        prime: u32,
        sum_coords: usize,
    },
    Identity,
    Explicit,
}

/// A function on `X^n x Y^n`, stored as a dense table of label ids.
#[derive(Debug, Clone)]
pub struct VectorFunction {
    n: usize,
    xs: WordSpace,
    ys: WordSpace,
    nx: usize,
    ny: usize,
    table: Vec<u32>,
    labels: Vec<Vec<OutputSymbol>>,
    origin: Origin,
}

impl VectorFunction {
    fn build(
        n: usize,
        x_size: usize,
        y_size: usize,
        budget: Budget,
        origin: Origin,
        mut value: impl FnMut(&[usize], &[usize]) -> Vec<OutputSymbol>,
    ) -> Result<Self> {
        let xs = WordSpace::new(x_size, n);
        let ys = WordSpace::new(y_size, n);
        let nx = xs.count()?;
        let ny = ys.count()?;
        budget.check(nx as u128 * ny as u128)?;
        let mut ids: HashMap<Vec<OutputSymbol>, u32> = HashMap::new();
        let mut labels = Vec::new();
        let mut table = Vec::with_capacity(nx * ny);
        let ywords: Vec<Vec<usize>> = (0..ny).map(|j| ys.decode(j)).collect();
        for i in 0..nx {
            let x = xs.decode(i);
            for y in &ywords {
                let z = value(&x, y);
                let next = ids.len() as u32;
                let id = match ids.get(&z) {
                    Some(&id) => id,
                    None => {
                        ids.insert(z.clone(), next);
                        labels.push(z);
                        next
                    }
                };
                table.push(id);
            }
        }
        Ok(VectorFunction {
            n,
            xs,
            ys,
            nx,
            ny,
            table,
            labels,
            origin,
        })
    }

    /// Symbol-wise extension `(f(x_1,y_1), ..., f(x_n,y_n))`.
    pub fn lift(f: &SingleLetterFunction, n: usize, budget: Budget) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        Self::build(
            n,
            f.x_size,
            f.y_size,
            budget,
            Origin::SymbolWise(f.clone()),
            |x, y| {
                x.iter()
                    .zip(y)
                    .map(|(&a, &b)| OutputSymbol::Label(f.eval(a, b)))
                    .collect()
            },
        )
    }

    /// The identity `(x, y) -> (x, y)`; label id equals `x_index * |Y^n| + y_index`.
    pub fn identity(x_size: usize, y_size: usize, n: usize, budget: Budget) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("block length must be at least 1"));
        }
        Self::build(n, x_size, y_size, budget, Origin::Identity, |x, y| {
            x.iter()
                .zip(y)
                .map(|(&a, &b)| OutputSymbol::Pair(a as u32, b as u32))
                .collect()
        })
    }

    /// Function with the first `sum_coords` coordinates replaced by sums mod `prime`.
    pub fn mod_sum(
        x_size: usize,
        y_size: usize,
        n: usize,
        prime: u32,
        sum_coords: usize,
        budget: Budget,
    ) -> Result<Self> {
        if n == 0 || sum_coords > n {
            return Err(Error::invalid("need 1 <= n and sum_coords <= n"));
        }
        Self::build(
            n,
            x_size,
            y_size,
            budget,
            Origin::ModSum { prime, sum_coords },
            |x, y| mod_sum_value(x, y, prime, sum_coords),
        )
    }

    /// Function given by an explicit table of label ids (`x_index * |Y^n| + y_index`).
    pub fn from_table(n: usize, x_size: usize, y_size: usize, table: Vec<u32>) -> Result<Self> {
        let xs = WordSpace::new(x_size, n);
        let ys = WordSpace::new(y_size, n);
        let nx = xs.count()?;
        let ny = ys.count()?;
        if table.len() != nx * ny {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, got {}",
                nx * ny,
                table.len()
            )));
        }
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut labels = Vec::new();
        let table = table
            .into_iter()
            .map(|v| {
                let next = remap.len() as u32;
                *remap.entry(v).or_insert_with(|| {
                    labels.push(vec![OutputSymbol::Label(v)]);
                    next
                })
            })
            .collect();
        Ok(VectorFunction {
            n,
            xs,
            ys,
            nx,
            ny,
            table,
            labels,
            origin: Origin::Explicit,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn x_size(&self) -> usize {
        self.xs.alphabet
    }
    pub fn y_size(&self) -> usize {
        self.ys.alphabet
    }
    pub fn x_space(&self) -> WordSpace {
        self.xs
    }
    pub fn y_space(&self) -> WordSpace {
        self.ys
    }
    pub fn num_x(&self) -> usize {
        self.nx
    }
    pub fn num_y(&self) -> usize {
        self.ny
    }
    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }
    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    /// Label id at word indices.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u32 {
        self.table[x * self.ny + y]
    }

    pub fn eval(&self, x: &[usize], y: &[usize]) -> Result<u32> {
        Ok(self.at(self.xs.encode(x)?, self.ys.encode(y)?))
    }

    pub fn label(&self, id: u32) -> &[OutputSymbol] {
        &self.labels[id as usize]
    }

    /// Human-readable rendering of a label, using base labels when available.
    pub fn render(&self, id: u32) -> Vec<String> {
        self.label(id)
            .iter()
            .map(|s| match (s, &self.origin) {
                (OutputSymbol::Label(l), Origin::SymbolWise(f)) => f.labels()[*l as usize].clone(),
                (OutputSymbol::Label(l), _) => l.to_string(),
                (OutputSymbol::Sum(v), _) => v.to_string(),
                (OutputSymbol::Pair(a, b), _) => format!("({a},{b})"),
            })
            .collect()
    }

    /// The same function with the roles of the two inputs exchanged.
    pub fn transposed(&self) -> VectorFunction {
        let mut table = vec![0u32; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                table[y * self.nx + x] = self.at(x, y);
            }
        }
        VectorFunction {
            n: self.n,
            xs: self.ys,
            ys: self.xs,
            nx: self.ny,
            ny: self.nx,
            table,
            labels: self.labels.clone(),
            origin: Origin::Explicit,
        }
    }
}

/// Output of the mod-sum family on one pair of words, without tabulation.
pub fn mod_sum_value(x: &[usize], y: &[usize], prime: u32, sum_coords: usize) -> Vec<OutputSymbol> {
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&a, &b))| {
            if i < sum_coords {
                OutputSymbol::Sum(((a + b) as u32) % prime)
            } else {
                OutputSymbol::Pair(a as u32, b as u32)
            }
        })
        .collect()
}

/// Smallest prime strictly greater than `k`.
pub fn next_prime_above(k: usize) -> u32 {
    let mut p = k + 1;
    loop {
        if p >= 2
            && (2..p)
                .take_while(|d| d * d <= p)
                .all(|d| !p.is_multiple_of(d))
        {
            return p as u32;
        }
        p += 1;
    }
}

/// Number of sum coordinates `floor(n * rho)`, robust to rounding of `rho`.
pub fn sum_coordinate_count(n: usize, rho: f64) -> usize {
    ((n as f64) * rho + 1e-9).floor().max(0.0) as usize
}

/// Parameters of the mod-sum construction for the given alphabets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModSumParams {
    pub prime: u32,
    pub sum_coords: usize,
    pub min_alphabet: usize,
}

pub fn mod_sum_params(x_size: usize, y_size: usize, n: usize, rho: f64) -> Result<ModSumParams> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho must lie in [0,1], got {rho}")));
    }
    Ok(ModSumParams {
        prime: next_prime_above(x_size + y_size - 2),
        sum_coords: sum_coordinate_count(n, rho),
        min_alphabet: x_size.min(y_size),
    })
}

/// Tabulate the mod-sum function whose first `floor(n rho)` coordinates are
/// field sums and whose remaining coordinates pass both inputs through.
pub fn mod_sum_function(
    x_size: usize,
    y_size: usize,
    n: usize,
    rho: f64,
    budget: Budget,
) -> Result<VectorFunction> {
    let p = mod_sum_params(x_size, y_size, n, rho)?;
    VectorFunction::mod_sum(x_size, y_size, n, p.prime, p.sum_coords, budget)
}
