//! Lifting a function that is not jointly sensitive after extension into a
//! pair-wise i.i.d. setting where the pair function breaks the cross
//! condition of the HK-class while the source stays smooth.

use serde::Serialize;

use super::model::SourceModel;
use crate::error::{Error, Result};
use crate::funclass::{counterexample_quadruple, Quadruple, SingleLetterFunction};

#[derive(Debug, Clone, Serialize)]
pub struct TwoSymbolwiseTemplate {
    #[serde(skip)]
    pub pair_function: SingleLetterFunction,
    pub x_size: usize,
    pub y_size: usize,
    pub quadruple: Quadruple,
    /// Pair-alphabet indices `(u, v)` and `(u_hat, v_hat)` with equal output.
    pub colliding: [(usize, usize); 2],
}

impl TwoSymbolwiseTemplate {
    /// Attach a distribution on pairs of symbols to obtain a source.
    pub fn complete(&self, joint: Vec<Vec<f64>>) -> Result<SourceModel> {
        let s = SourceModel::TwoSymbolwise {
            x_size: self.x_size,
            y_size: self.y_size,
            joint,
        };
        s.validate()?;
        Ok(s)
    }

    /// Completion with the uniform pair distribution.
    pub fn uniform(&self) -> SourceModel {
        let (u, v) = (self.x_size * self.x_size, self.y_size * self.y_size);
        SourceModel::TwoSymbolwise {
            x_size: self.x_size,
            y_size: self.y_size,
            joint: vec![vec![1.0 / (u * v) as f64; v]; u],
        }
    }
}

/// Build the pair function `g(u, v) = (f(u_1, v_1), f(u_2, v_2))` on the
/// squared alphabets, together with the colliding quadruple of `f`.
pub fn two_symbolwise_from_function(f: &SingleLetterFunction) -> Result<TwoSymbolwiseTemplate> {
    let quadruple = counterexample_quadruple(f)?;
    let (nx, ny) = (f.x_size(), f.y_size());
    let rows: Vec<Vec<String>> = (0..nx * nx)
        .map(|u| {
            (0..ny * ny)
                .map(|v| format!("({},{})", f.label(u / nx, v / ny), f.label(u % nx, v % ny)))
                .collect()
        })
        .collect();
    let pair_function = SingleLetterFunction::from_rows(&rows)?;
    let idx = |w: [usize; 2], base: usize| w[0] * base + w[1];
    let colliding = [
        (idx(quadruple.x, nx), idx(quadruple.y, ny)),
        (idx(quadruple.x_hat, nx), idx(quadruple.y_hat, ny)),
    ];
    if pair_function.eval(colliding[0].0, colliding[0].1)
        != pair_function.eval(colliding[1].0, colliding[1].1)
    {
        return Err(Error::Unsupported(
            "quadruple does not collide under the pair function".into(),
        ));
    }
    Ok(TwoSymbolwiseTemplate {
        pair_function,
        x_size: nx,
        y_size: ny,
        quadruple,
        colliding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funclass::{hk_violation, HkViolation};
    use crate::sources::smoothness_check;
    use crate::words::Budget;

    #[test]
    fn table_one_template() {
        let f = SingleLetterFunction::from_rows(&[vec![0, 1, 2], vec![0, 3, 3]]).unwrap();
        let t = two_symbolwise_from_function(&f).unwrap();
        assert_eq!(t.pair_function.x_size(), 4);
        assert_eq!(t.pair_function.y_size(), 9);
        let ((u, v), (uh, vh)) = (t.colliding[0], t.colliding[1]);
        assert!(u != uh && v != vh);
        assert!(matches!(
            hk_violation(&t.pair_function),
            Some(HkViolation::Cross { .. })
        ));
        let s = t.uniform();
        for n in [2, 4] {
            let v = smoothness_check(&s, n, Budget::default()).unwrap();
            assert!(v.smooth_wrt_x && v.smooth_wrt_y);
        }
    }
}
