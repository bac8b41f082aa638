use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FuzzyError, Result};

/// Default number of levels on a uniform grid.
pub const DEFAULT_LEVELS: usize = 101;

/// Strictly increasing membership levels `0 = r_0 < ... < r_{L-1} = 1`.
///
/// Every fuzzy number carries an `Arc<LevelGrid>`; binary operations refuse
/// operands whose grids differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelGrid {
    levels: Vec<f64>,
}

impl LevelGrid {
    pub fn uniform(len: usize) -> Result<Arc<Self>> {
        if len < 2 {
            return Err(FuzzyError::InvalidGrid(format!(
                "need at least 2 levels, got {len}"
            )));
        }
        let last = (len - 1) as f64;
        let levels = (0..len).map(|k| k as f64 / last).collect();
        Ok(Arc::new(Self { levels }))
    }

    /// The 101-level uniform grid.
    pub fn standard() -> Arc<Self> {
        Self::uniform(DEFAULT_LEVELS).expect("default grid is valid")
    }

    pub fn from_levels(levels: Vec<f64>) -> Result<Arc<Self>> {
        if levels.len() < 2 {
            return Err(FuzzyError::InvalidGrid(format!(
                "need at least 2 levels, got {}",
                levels.len()
            )));
        }
        if levels[0] != 0.0 || levels[levels.len() - 1] != 1.0 {
            return Err(FuzzyError::InvalidGrid(
                "first level must be 0 and last level must be 1".into(),
            ));
        }
        if levels.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(FuzzyError::InvalidGrid(
                "levels must be strictly increasing".into(),
            ));
        }
        Ok(Arc::new(Self { levels }))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> f64 {
        self.levels[k]
    }

    /// Index `k` with `r_k <= r < r_{k+1}` (clamped to the last interval).
    pub(crate) fn bracket(&self, r: f64) -> usize {
        let pos = self.levels.partition_point(|&x| x <= r);
        pos.saturating_sub(1).min(self.levels.len() - 2)
    }
}

/// Two grids are compatible when they are the same object or carry
/// bit-identical levels.
pub fn same_grid(a: &Arc<LevelGrid>, b: &Arc<LevelGrid>) -> bool {
    Arc::ptr_eq(a, b) || a.levels == b.levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_endpoints_exactly() {
        let g = LevelGrid::uniform(101).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g.level(0), 0.0);
        assert_eq!(g.level(100), 1.0);
        assert_eq!(g.level(50), 0.5);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(LevelGrid::uniform(1).is_err());
        assert!(LevelGrid::from_levels(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(LevelGrid::from_levels(vec![0.1, 1.0]).is_err());
        assert!(LevelGrid::from_levels(vec![0.0, 0.9]).is_err());
        assert!(LevelGrid::from_levels(vec![0.0, 0.3, 1.0]).is_ok());
    }

    #[test]
    fn bracket_finds_enclosing_interval() {
        let g = LevelGrid::uniform(5).unwrap();
        assert_eq!(g.bracket(0.0), 0);
        assert_eq!(g.bracket(0.3), 1);
        assert_eq!(g.bracket(1.0), 3);
    }
}
