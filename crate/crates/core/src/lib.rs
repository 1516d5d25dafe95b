//! Exact integral homology of moment-angle complexes `Z_K`, realisability of
//! iterated higher Whitehead products, and Taylor cycles.
//!
//! The homology of `Z_K` is available through three independent routes:
//! the cellular chain complex ([`moment_angle::zk_homology`]), the Hochster
//! decomposition over full subcomplexes ([`moment_angle::hochster_table`]) and
//! the Taylor complex of the face coalgebra ([`taylor::taylor_homology`]).
//! [`zigzag::koszul_to_taylor`] carries cellular cycles over to Taylor cycles.
//!
//! All arithmetic is exact. Linear algebra in [`exactalg`] is generic over the
//! integer type; everything else uses the arbitrary-precision [`Int`].

pub mod complexes;
pub mod error;
pub mod exactalg;
pub mod moment_angle;
pub mod taylor;
pub mod text;
pub mod whitehead;
pub mod zigzag;

pub use complexes::{Face, SimplicialComplex, Vertex};
pub use error::{Error, Result};
pub use exactalg::{Chain, ChainComplex, HomologyClass, HomologyGroup, Scalar, SparseMatrix, SmithForm};
pub use moment_angle::{Cell, CellChain};
pub use taylor::{MonomialIdeal, TaylorChain, TaylorMonomial};
pub use whitehead::WhiteheadExpr;
pub use zigzag::{BicomplexElement, ZigzagTrace};

/// Arbitrary-precision integer used throughout.
pub type Int = num_bigint::BigInt;

pub type IntMatrix = SparseMatrix<Int>;
pub type IntSmithForm = SmithForm<Int>;
pub type IntHomologyGroup = HomologyGroup<Int>;

/// Version string embedded in reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
