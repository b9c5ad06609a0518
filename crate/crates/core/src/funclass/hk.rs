//! Single-letter conditions that decide total sensitivity of symbol-wise
//! extensions.

use serde::Serialize;

use super::function::SingleLetterFunction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HkViolation {
    /// Two rows are identical.
    EqualRows { a1: usize, a2: usize },
    /// Two columns are identical.
    EqualColumns { b1: usize, b2: usize },
    /// `f(a1,b1) = f(a2,b2)` with `a1 != a2` and `b1 != b2`.
    Cross {
        a1: usize,
        b1: usize,
        a2: usize,
        b2: usize,
    },
}

/// First violated condition of the HK-class, or `None` if `f` is in the class.
pub fn hk_violation(f: &SingleLetterFunction) -> Option<HkViolation> {
    let (nx, ny) = (f.x_size(), f.y_size());
    for a1 in 0..nx {
        for a2 in a1 + 1..nx {
            if (0..ny).all(|b| f.eval(a1, b) == f.eval(a2, b)) {
                return Some(HkViolation::EqualRows { a1, a2 });
            }
        }
    }
    for b1 in 0..ny {
        for b2 in b1 + 1..ny {
            if (0..nx).all(|a| f.eval(a, b1) == f.eval(a, b2)) {
                return Some(HkViolation::EqualColumns { b1, b2 });
            }
        }
    }
    for a1 in 0..nx {
        for b1 in 0..ny {
            for a2 in (0..nx).filter(|&a| a != a1) {
                for b2 in (0..ny).filter(|&b| b != b1) {
                    if f.eval(a1, b1) == f.eval(a2, b2) {
                        return Some(HkViolation::Cross { a1, b1, a2, b2 });
                    }
                }
            }
        }
    }
    None
}

pub fn is_hk(f: &SingleLetterFunction) -> bool {
    hk_violation(f).is_none()
}

/// Every row `f(a, .)` is injective. Returns a collision `(a, b1, b2)` otherwise.
pub fn row_collision(f: &SingleLetterFunction) -> Option<(usize, usize, usize)> {
    for a in 0..f.x_size() {
        for b1 in 0..f.y_size() {
            for b2 in b1 + 1..f.y_size() {
                if f.eval(a, b1) == f.eval(a, b2) {
                    return Some((a, b1, b2));
                }
            }
        }
    }
    None
}

/// Every column `f(., b)` is injective. Returns a collision `(a1, a2, b)` otherwise.
pub fn column_collision(f: &SingleLetterFunction) -> Option<(usize, usize, usize)> {
    for b in 0..f.y_size() {
        for a1 in 0..f.x_size() {
            for a2 in a1 + 1..f.x_size() {
                if f.eval(a1, b) == f.eval(a2, b) {
                    return Some((a1, a2, b));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Injectivity {
    Rows,
    Columns,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolwiseVerdict {
    /// Whether the extension to any block length `n >= 2` is totally sensitive.
    pub totally_sensitive: bool,
    pub hk: bool,
    pub hk_violation: Option<HkViolation>,
    pub rows_injective: bool,
    pub columns_injective: bool,
    /// Which injectivity property supports a positive verdict.
    pub via: Option<Injectivity>,
}

/// Decide total sensitivity of the symbol-wise extension (block length at
/// least 2) from the single-letter table alone.
pub fn symbolwise_totally_sensitive(f: &SingleLetterFunction) -> SymbolwiseVerdict {
    let hk_violation = hk_violation(f);
    let rows_injective = row_collision(f).is_none();
    let columns_injective = column_collision(f).is_none();
    let via = match (rows_injective, columns_injective) {
        (true, true) => Some(Injectivity::Both),
        (true, false) => Some(Injectivity::Rows),
        (false, true) => Some(Injectivity::Columns),
        (false, false) => None,
    };
    let hk = hk_violation.is_none();
    SymbolwiseVerdict {
        totally_sensitive: hk && via.is_some(),
        hk,
        hk_violation,
        rows_injective,
        columns_injective,
        via: if hk { via } else { None },
    }
}

/// Two pairs of length-2 words with equal output under the symbol-wise
/// extension, where both words differ between the pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quadruple {
    pub x: [usize; 2],
    pub x_hat: [usize; 2],
    pub y: [usize; 2],
    pub y_hat: [usize; 2],
    /// Common output, as base labels.
    pub value: [String; 2],
}

/// Joint-sensitivity counterexample for a function with a row collision
/// and a column collision.
///
/// The first coordinate uses the column collision `f(a1,b0) = f(a2,b0)` and
/// the second the row collision `f(a0,b1) = f(a0,b2)`.
pub fn counterexample_quadruple(f: &SingleLetterFunction) -> Result<Quadruple> {
    let Some((a0, b1, b2)) = row_collision(f) else {
        return Err(Error::hypothesis(
            "non-injective row",
            "every row of the table is injective",
        ));
    };
    let Some((a1, a2, b0)) = column_collision(f) else {
        return Err(Error::hypothesis(
            "non-injective column",
            "every column of the table is injective",
        ));
    };
    let q = Quadruple {
        x: [a1, a0],
        x_hat: [a2, a0],
        y: [b0, b1],
        y_hat: [b0, b2],
        value: [f.label(a1, b0).to_string(), f.label(a0, b1).to_string()],
    };
    debug_assert_eq!(f.eval(a2, b0), f.eval(a1, b0));
    debug_assert_eq!(f.eval(a0, b2), f.eval(a0, b1));
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(rows: &[Vec<u32>]) -> SingleLetterFunction {
        SingleLetterFunction::from_rows(rows).unwrap()
    }

    #[test]
    fn mod_two_sum_is_not_hk() {
        let f = t(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(
            hk_violation(&f),
            Some(HkViolation::Cross {
                a1: 0,
                b1: 0,
                a2: 1,
                b2: 1
            })
        );
    }

    #[test]
    fn worked_tables() {
        let t1 = t(&[vec![0, 1, 2], vec![0, 3, 3]]);
        let v = symbolwise_totally_sensitive(&t1);
        assert!(v.hk && !v.totally_sensitive && v.via.is_none());
        let q = counterexample_quadruple(&t1).unwrap();
        assert_eq!(
            (q.x, q.x_hat, q.y, q.y_hat),
            ([0, 1], [1, 1], [0, 1], [0, 2])
        );
        assert_eq!(q.value, ["0".to_string(), "3".to_string()]);

        let t2 = t(&[vec![0, 1, 2], vec![0, 3, 4]]);
        let v = symbolwise_totally_sensitive(&t2);
        assert!(v.totally_sensitive);
        assert_eq!(v.via, Some(Injectivity::Rows));

        let t3 = t(&[vec![0, 1, 2], vec![3, 3, 3]]);
        let v = symbolwise_totally_sensitive(&t3);
        assert!(v.totally_sensitive);
        assert_eq!(v.via, Some(Injectivity::Columns));
    }

    #[test]
    fn quadruple_needs_both_collisions() {
        let t2 = t(&[vec![0, 1, 2], vec![0, 3, 4]]);
        assert!(matches!(
            counterexample_quadruple(&t2),
            Err(Error::Hypothesis { .. })
        ));
    }
}
