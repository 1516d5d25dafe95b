//! Exact integer linear algebra: sparse matrices, Smith normal form,
//! homology of integer chain complexes and integer linear solving.
//!
//! Everything here is generic over the ring of integers used for the
//! entries. The rest of the crate works with arbitrary-precision
//! [`Int`](crate::Int); machine integers are useful for quick experiments
//! and for tests that compare the two.

mod chain;
mod matrix;
mod smith;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::Signed;

pub use chain::{Chain, ChainComplex, HomologyClass, HomologyGroup};
pub use matrix::SparseMatrix;
pub use smith::{invariant_factors, smith_normal_form, solve_integer, SmithForm};

/// Integer-like scalar usable as a matrix entry.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Integer + Signed + From<i64> + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Ord + Hash + Integer + Signed + From<i64> + Send + Sync + 'static
{
}
