//! Fuzzy n-cell numbers on a discretized level grid: arithmetic, metrics,
//! partial order and generalized differences.

mod arith;
mod csvio;
mod grid;
mod interval;
mod metric;
mod number;
mod order;

pub use arith::FuzzyVector;
pub use csvio::{read_csv, write_csv, CSV_HEADER};
pub use grid::{same_grid, LevelGrid, DEFAULT_LEVELS};
pub use interval::{d_l, gh_diff_interval, Interval, LevelBox};
pub use metric::big_d_l;
pub use number::{FuzzyNCell, Side};
pub use order::{first_le_violation, order, OrderResult, OrderWitness, Relation};

pub(crate) use arith::not_representable;
