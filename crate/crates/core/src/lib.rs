//! Hypergraph quasirandomness toolkit.
//!
//! The crate works with k-uniform hypergraphs (optionally with loop edges,
//! i.e. edges that are k-multisets) and provides:
//!
//! * [`hypergraph`] — the core representation, deterministic generators,
//!   coregularity analysis, and a plain-text file format;
//! * [`templates`] — the pattern hypergraphs built from binary-code
//!   labelings: steps, paths, even cycles, partial steps, plus small-instance
//!   isomorphism and pi-linearity certification;
//! * [`multilinear`] — dense multilinear maps, the adjacency map, grouping by
//!   an ordered partition, star products and their power chain, the flattened
//!   square matrix, a Jacobi eigensolver, and an alternating power method for
//!   spectral-norm lower bounds;
//! * [`spectra`] — the first/second hypergraph eigenvalues with respect to a
//!   partition, reported as certified intervals;
//! * [`counting`] — exact subgraph, homomorphism, circuit (trace-based),
//!   partite-edge, and extension-recursion counts;
//! * [`quasicheck`] — residual-based checkers for the equivalent quasirandom
//!   properties and the experiment runner behind the `hyperquasi` CLI.
//!
//! All randomness is counter-based and keyed by explicit seeds, so every
//! result is reproducible across platforms.

pub mod counting;
pub mod error;
pub mod hypergraph;
pub mod multilinear;
pub mod quasicheck;
pub mod rng;
pub mod spectra;
pub mod templates;

pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use templates::OrderedPartition;

/// Size limits for the search- and matrix-based operations.
///
/// The flat-matrix side grows as n^(k1 * 2^(t-2)); everything here is dense
/// and desk-scale by design, so oversized requests are refused instead of
/// thrashing.
#[derive(Clone, Debug)]
pub struct Caps {
    /// Maximum side length of the flattened square matrix.
    pub matrix_dim: usize,
    /// Maximum template vertex count for copy/homomorphism counting.
    pub count_vertices: usize,
    /// Maximum vertex count for the isomorphism search.
    pub iso_vertices: usize,
    /// Maximum edge count for the pi-linearity search.
    pub pilinear_edges: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            matrix_dim: 4096,
            count_vertices: 12,
            iso_vertices: 16,
            pilinear_edges: 12,
        }
    }
}

impl Caps {
    /// Defaults, with the matrix cap overridable through `HYPERQUASI_CAP`.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Ok(v) = std::env::var("HYPERQUASI_CAP") {
            if let Ok(dim) = v.trim().parse::<usize>() {
                caps.matrix_dim = dim;
            }
        }
        caps
    }
}
