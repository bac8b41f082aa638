use serde::Serialize;

use super::number::{FuzzyNCell, Side};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Relation {
    Le,
    Ge,
    Eq,
    Incomparable,
}

/// Place where an endpoint comparison fails: `u` exceeds `v` there by `excess`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderWitness {
    pub cell: usize,
    pub level: usize,
    pub r: f64,
    pub side: Side,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderResult {
    pub relation: Relation,
    pub witness: Option<OrderWitness>,
}

impl OrderResult {
    pub fn is_le(&self) -> bool {
        matches!(self.relation, Relation::Le | Relation::Eq)
    }

    pub fn is_ge(&self) -> bool {
        matches!(self.relation, Relation::Ge | Relation::Eq)
    }
}

/// First endpoint (cell-major, then level, lower before upper) where
/// `u <= v` fails by more than `tol`.
pub fn first_le_violation(u: &FuzzyNCell, v: &FuzzyNCell, tol: f64) -> Result<Option<OrderWitness>> {
    u.check_compatible(v)?;
    let grid = u.grid();
    for i in 0..u.dim() {
        for k in 0..grid.len() {
            for side in [Side::Lower, Side::Upper] {
                let excess = u.endpoint(i, k, side) - v.endpoint(i, k, side);
                if excess > tol {
                    return Ok(Some(OrderWitness {
                        cell: i,
                        level: k,
                        r: grid.level(k),
                        side,
                        excess,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Partial order of fuzzy n-cell numbers: `u <= v` iff every lower and every
/// upper endpoint of `u` is at most the matching endpoint of `v`.
///
/// An incomparable result carries the first place where `u <= v` fails.
pub fn order(u: &FuzzyNCell, v: &FuzzyNCell, tol: f64) -> Result<OrderResult> {
    let le_fail = first_le_violation(u, v, tol)?;
    let ge_fail = first_le_violation(v, u, tol)?;
    let (relation, witness) = match (le_fail, ge_fail) {
        (None, None) => (Relation::Eq, None),
        (None, Some(_)) => (Relation::Le, None),
        (Some(_), None) => (Relation::Ge, None),
        (Some(w), Some(_)) => (Relation::Incomparable, Some(w)),
    };
    Ok(OrderResult { relation, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelsets::LevelGrid;
    use crate::TAU_ORD;

    #[test]
    fn reflexive_eq() {
        let g = LevelGrid::standard();
        let u = FuzzyNCell::triangular(-1.0, 0.5, 3.0, g).unwrap();
        assert_eq!(order(&u, &u, TAU_ORD).unwrap().relation, Relation::Eq);
    }

    #[test]
    fn crisp_zero_below_triangle() {
        let g = LevelGrid::standard();
        let z = FuzzyNCell::zero(1, g.clone());
        let t = FuzzyNCell::triangular(0.0, 4.0, 8.0, g).unwrap();
        assert_eq!(order(&z, &t, TAU_ORD).unwrap().relation, Relation::Le);
        assert_eq!(order(&t, &z, TAU_ORD).unwrap().relation, Relation::Ge);
    }

    #[test]
    fn nested_rectangles_are_incomparable() {
        let g = LevelGrid::standard();
        let a = FuzzyNCell::rectangular(0.0, 1.0, g.clone()).unwrap();
        let b = FuzzyNCell::rectangular(-1.0, 2.0, g).unwrap();
        let res = order(&a, &b, TAU_ORD).unwrap();
        assert_eq!(res.relation, Relation::Incomparable);
        let w = res.witness.unwrap();
        assert_eq!((w.cell, w.level, w.side), (0, 0, Side::Lower));
        assert_eq!(w.excess, 1.0);
    }

    #[test]
    fn tolerance_absorbs_tiny_gaps() {
        let g = LevelGrid::uniform(3).unwrap();
        let a = FuzzyNCell::crisp(&[1.0], g.clone());
        let b = FuzzyNCell::crisp(&[1.0 + 1e-12], g);
        assert_eq!(order(&a, &b, TAU_ORD).unwrap().relation, Relation::Eq);
        assert_eq!(order(&a, &b, 0.0).unwrap().relation, Relation::Le);
    }
}
