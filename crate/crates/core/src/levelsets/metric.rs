use super::interval::d_l;
use super::number::FuzzyNCell;
use crate::error::Result;

/// Supremum over grid levels of the box metric between level sets.
pub fn big_d_l(u: &FuzzyNCell, v: &FuzzyNCell) -> Result<f64> {
    u.check_compatible(v)?;
    let mut best = 0.0_f64;
    for k in 0..u.levels() {
        best = best.max(d_l(&u.level_box(k), &v.level_box(k))?);
    }
    Ok(best)
}
