use serde::Serialize;

use super::function::VectorFunction;
use crate::error::Result;
use crate::words::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SensitiveGivenY,
    SensitiveGivenX,
    JointlySensitive,
    HighlySensitiveGivenY,
    HighlySensitiveGivenX,
}

/// A tuple that violates `property`.
///
/// Conditioned on Y: `f(x,y) = f(x_hat,y)`, `x` and `x_hat` differ at `index`,
/// and `y_hat` is `y` changed at `index` (equal to `y` when no change helps).
/// Conditioned on X the roles of the words are exchanged. For joint
/// sensitivity `index` is `None` and `f(x,y) = f(x_hat,y_hat)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub property: Property,
    pub x: Vec<usize>,
    pub x_hat: Vec<usize>,
    pub y: Vec<usize>,
    pub y_hat: Vec<usize>,
    pub index: Option<usize>,
}

impl Witness {
    /// Re-evaluate the function to confirm this tuple really violates the property.
    pub fn confirms(&self, f: &VectorFunction) -> bool {
        let ev = |x: &[usize], y: &[usize]| f.eval(x, y).ok();
        match self.property {
            Property::JointlySensitive => {
                self.x != self.x_hat
                    && self.y != self.y_hat
                    && ev(&self.x, &self.y).is_some()
                    && ev(&self.x, &self.y) == ev(&self.x_hat, &self.y_hat)
            }
            Property::SensitiveGivenY | Property::HighlySensitiveGivenY => {
                let Some(i) = self.index else { return false };
                confirm_conditional(
                    f,
                    self.property,
                    &self.x,
                    &self.x_hat,
                    &self.y,
                    &self.y_hat,
                    i,
                )
            }
            Property::SensitiveGivenX | Property::HighlySensitiveGivenX => {
                let Some(i) = self.index else { return false };
                let t = f.transposed();
                confirm_conditional(
                    &t,
                    self.property,
                    &self.y,
                    &self.y_hat,
                    &self.x,
                    &self.x_hat,
                    i,
                )
            }
        }
    }

    fn swapped(self, property: Property) -> Witness {
        Witness {
            property,
            x: self.y,
            x_hat: self.y_hat,
            y: self.x,
            y_hat: self.x_hat,
            index: self.index,
        }
    }
}

fn confirm_conditional(
    f: &VectorFunction,
    property: Property,
    a: &[usize],
    a_hat: &[usize],
    b: &[usize],
    b_hat: &[usize],
    i: usize,
) -> bool {
    let (Ok(ai), Ok(ahi), Ok(bi)) = (
        f.x_space().encode(a),
        f.x_space().encode(a_hat),
        f.y_space().encode(b),
    ) else {
        return false;
    };
    if i >= f.n()
        || f.x_space().symbol(ai, i) == f.x_space().symbol(ahi, i)
        || f.at(ai, bi) != f.at(ahi, bi)
    {
        return false;
    }
    let ys = f.y_space();
    let bi_sym = ys.symbol(bi, i);
    match property {
        Property::SensitiveGivenY | Property::SensitiveGivenX => {
            (0..ys.alphabet).filter(|&s| s != bi_sym).all(|s| {
                let yh = ys.replace(bi, i, s);
                f.at(ai, yh) == f.at(ahi, yh)
            })
        }
        _ => {
            let Ok(bh) = ys.encode(b_hat) else {
                return false;
            };
            ys.hamming(bi, bh) == 1 && ys.symbol(bh, i) != bi_sym && f.at(ai, bh) == f.at(ahi, bh)
        }
    }
}

/// Conditional check with the y-word fixed. `strict` selects the "every
/// change" variant; otherwise one change at the differing position suffices.
fn conditional_violations(
    f: &VectorFunction,
    strict: bool,
    property: Property,
    budget: Budget,
    limit: usize,
) -> Result<Vec<Witness>> {
    let nx = f.num_x();
    let ny = f.num_y();
    budget.check(nx as u128 * ny as u128)?;
    let xs = f.x_space();
    let ys = f.y_space();
    let mut out = Vec::new();
    let mut order: Vec<usize> = (0..nx).collect();
    // Work is charged per colliding pair, so injective slices cost nothing.
    let mut work = 0u128;
    for y in 0..ny {
        order.sort_by_key(|&x| (f.at(x, y), x));
        let mut start = 0;
        while start < nx {
            let z = f.at(order[start], y);
            let mut end = start + 1;
            while end < nx && f.at(order[end], y) == z {
                end += 1;
            }
            let size = (end - start) as u128;
            work += size * (size - 1) / 2 * f.n() as u128;
            budget.check(work)?;
            for p in start..end {
                for q in p + 1..end {
                    let (x, xh) = (order[p], order[q]);
                    for i in 0..f.n() {
                        if xs.symbol(x, i) == xs.symbol(xh, i) {
                            continue;
                        }
                        let yi = ys.symbol(y, i);
                        let mut bad: Option<usize> = None;
                        let mut any_good = false;
                        for s in (0..ys.alphabet).filter(|&s| s != yi) {
                            let yh = ys.replace(y, i, s);
                            if f.at(x, yh) != f.at(xh, yh) {
                                any_good = true;
                            } else if bad.is_none() {
                                bad = Some(yh);
                            }
                        }
                        let violated = if strict { bad.is_some() } else { !any_good };
                        if violated {
                            out.push(Witness {
                                property,
                                x: xs.decode(x),
                                x_hat: xs.decode(xh),
                                y: ys.decode(y),
                                y_hat: ys.decode(if strict { bad.unwrap_or(y) } else { y }),
                                index: Some(i),
                            });
                            if out.len() >= limit {
                                return Ok(out);
                            }
                        }
                    }
                }
            }
            start = end;
        }
    }
    Ok(out)
}

fn first(v: Vec<Witness>) -> Option<Witness> {
    v.into_iter().next()
}

/// `None` when sensitive conditioned on Y; otherwise a violating tuple.
pub fn sensitive_given_y_witness(f: &VectorFunction, budget: Budget) -> Result<Option<Witness>> {
    Ok(first(conditional_violations(
        f,
        false,
        Property::SensitiveGivenY,
        budget,
        1,
    )?))
}

pub fn sensitive_given_x_witness(f: &VectorFunction, budget: Budget) -> Result<Option<Witness>> {
    let t = f.transposed();
    Ok(first(conditional_violations(
        &t,
        false,
        Property::SensitiveGivenX,
        budget,
        1,
    )?)
    .map(|w| w.swapped(Property::SensitiveGivenX)))
}

pub fn highly_sensitive_given_y_witness(
    f: &VectorFunction,
    budget: Budget,
) -> Result<Option<Witness>> {
    Ok(first(conditional_violations(
        f,
        true,
        Property::HighlySensitiveGivenY,
        budget,
        1,
    )?))
}

pub fn highly_sensitive_given_x_witness(
    f: &VectorFunction,
    budget: Budget,
) -> Result<Option<Witness>> {
    let t = f.transposed();
    Ok(first(conditional_violations(
        &t,
        true,
        Property::HighlySensitiveGivenX,
        budget,
        1,
    )?)
    .map(|w| w.swapped(Property::HighlySensitiveGivenX)))
}

pub fn jointly_sensitive_witness(f: &VectorFunction, budget: Budget) -> Result<Option<Witness>> {
    let nx = f.num_x();
    let ny = f.num_y();
    budget.check(nx as u128 * ny as u128)?;
    // For each label remember one entry, plus any entry with a different x
    // and any entry with a different y.
    let m = f.num_labels();
    let mut anchor: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut other_x: Vec<Option<(usize, usize)>> = vec![None; m];
    let mut other_y: Vec<Option<(usize, usize)>> = vec![None; m];
    let pack = |a: (usize, usize), b: (usize, usize)| Witness {
        property: Property::JointlySensitive,
        x: f.x_space().decode(a.0),
        x_hat: f.x_space().decode(b.0),
        y: f.y_space().decode(a.1),
        y_hat: f.y_space().decode(b.1),
        index: None,
    };
    for x in 0..nx {
        for y in 0..ny {
            let z = f.at(x, y) as usize;
            let Some(a) = anchor[z] else {
                anchor[z] = Some((x, y));
                continue;
            };
            if x != a.0 && y != a.1 {
                return Ok(Some(pack(a, (x, y))));
            }
            if x != a.0 {
                // same y as the anchor
                if let Some(o) = other_y[z] {
                    return Ok(Some(pack((x, y), o)));
                }
                other_x[z].get_or_insert((x, y));
            } else if y != a.1 {
                if let Some(o) = other_x[z] {
                    return Ok(Some(pack((x, y), o)));
                }
                other_y[z].get_or_insert((x, y));
            }
        }
    }
    Ok(None)
}

pub fn is_sensitive_given_y(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(sensitive_given_y_witness(f, budget)?.is_none())
}

pub fn is_sensitive_given_x(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(sensitive_given_x_witness(f, budget)?.is_none())
}

pub fn is_jointly_sensitive(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(jointly_sensitive_witness(f, budget)?.is_none())
}

pub fn is_totally_sensitive(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(is_jointly_sensitive(f, budget)?
        && is_sensitive_given_x(f, budget)?
        && is_sensitive_given_y(f, budget)?)
}

pub fn is_highly_sensitive_given_y(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(highly_sensitive_given_y_witness(f, budget)?.is_none())
}

pub fn is_highly_sensitive_given_x(f: &VectorFunction, budget: Budget) -> Result<bool> {
    Ok(highly_sensitive_given_x_witness(f, budget)?.is_none())
}

/// All sensitivity verdicts for one block function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SensitivityReport {
    pub n: usize,
    pub jointly_sensitive: bool,
    pub sensitive_given_x: bool,
    pub sensitive_given_y: bool,
    pub totally_sensitive: bool,
    pub highly_sensitive_given_x: bool,
    pub highly_sensitive_given_y: bool,
    pub witnesses: Vec<Witness>,
}

pub fn classify(f: &VectorFunction, budget: Budget) -> Result<SensitivityReport> {
    let j = jointly_sensitive_witness(f, budget)?;
    let sx = sensitive_given_x_witness(f, budget)?;
    let sy = sensitive_given_y_witness(f, budget)?;
    let hx = highly_sensitive_given_x_witness(f, budget)?;
    let hy = highly_sensitive_given_y_witness(f, budget)?;
    let report = SensitivityReport {
        n: f.n(),
        jointly_sensitive: j.is_none(),
        sensitive_given_x: sx.is_none(),
        sensitive_given_y: sy.is_none(),
        totally_sensitive: j.is_none() && sx.is_none() && sy.is_none(),
        highly_sensitive_given_x: hx.is_none(),
        highly_sensitive_given_y: hy.is_none(),
        witnesses: [j, sx, sy, hx, hy].into_iter().flatten().collect(),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funclass::function::SingleLetterFunction;

    fn lift(rows: &[Vec<u32>], n: usize) -> VectorFunction {
        VectorFunction::lift(
            &SingleLetterFunction::from_rows(rows).unwrap(),
            n,
            Budget::default(),
        )
        .unwrap()
    }

    #[test]
    fn identity_is_totally_sensitive() {
        let f = VectorFunction::identity(2, 2, 2, Budget::default()).unwrap();
        assert!(is_totally_sensitive(&f, Budget::default()).unwrap());
    }

    #[test]
    fn xor_is_not_jointly_sensitive() {
        let f = lift(&[vec![0, 1], vec![1, 0]], 1);
        let w = jointly_sensitive_witness(&f, Budget::default())
            .unwrap()
            .unwrap();
        assert!(w.confirms(&f));
        assert!(is_sensitive_given_x(&f, Budget::default()).unwrap());
        assert!(is_sensitive_given_y(&f, Budget::default()).unwrap());
    }

    #[test]
    fn constant_is_not_highly_sensitive() {
        let f = lift(&[vec![0, 0], vec![0, 0]], 1);
        let w = highly_sensitive_given_y_witness(&f, Budget::default())
            .unwrap()
            .unwrap();
        assert!(w.confirms(&f));
        let w = sensitive_given_x_witness(&f, Budget::default())
            .unwrap()
            .unwrap();
        assert!(w.confirms(&f));
        assert_eq!(w.property, Property::SensitiveGivenX);
    }

    #[test]
    fn table_one_lift_fails_joint_sensitivity() {
        let f = lift(&[vec![0, 1, 2], vec![0, 3, 3]], 2);
        let r = classify(&f, Budget::default()).unwrap();
        assert!(!r.jointly_sensitive);
        assert!(r.sensitive_given_x && r.sensitive_given_y);
        assert!(r.witnesses.iter().all(|w| w.confirms(&f)));
    }

    #[test]
    fn budget_is_enforced() {
        let f = lift(&[vec![0, 1, 2], vec![0, 3, 3]], 2);
        assert!(is_sensitive_given_y(&f, Budget(10)).is_err());
    }
}
