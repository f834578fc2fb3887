//! Determinants computed and factored through directed graphs.
//!
//! A square matrix maps onto a weighted multidigraph whose arborescence
//! weights sum to the determinant. This crate provides that bridge, the two
//! sum-preserving graph transformations (moving an arc's source across the
//! graph and merging parallel arcs), and two strategies that apply them
//! recursively until the determinant falls apart into a sum of products of
//! linear factors. A brute-force arborescence enumeration acts as the ground
//! truth for everything else, and a seeded randomized harness checks the
//! library against it.
//!
//! Weights are generic over a small ring trait with implementations for
//! `f64`, exact rationals, and symbolic expressions, so the same code path
//! yields numeric determinants and factored polynomial identities.

pub mod arborescence;
pub mod error;
pub mod expr;
pub mod graph;
pub mod io;
pub mod isolation;
pub mod matrix;
pub mod transforms;
pub mod verify;
pub mod weight;

pub use num_rational::BigRational;

pub use arborescence::{
    arborescence_sum, arborescence_weight, enumerate_arborescences, Arborescence, ENUMERATION_LIMIT,
};
pub use error::{Error, Result};
pub use expr::{parse as parse_expr, Expr, MAX_MONOMIALS};
pub use graph::{Arc, ArcId, Digraph, SccPartition, VertexId};
pub use isolation::{
    isolate_vertex, ordered_bell, partitioned_factor, partitioned_factor_ordered,
    partitioned_factor_traced, root_split, rooted_subset_count, sequential_factor,
    sequential_factor_ordered, sequential_factor_traced, FactorEvent, FactorTerm, Factorization,
    Strategy,
};
pub use matrix::{
    det_reference, det_via_arborescences, digraph_to_matrix, matrix_to_digraph, u_name, u_var,
    Matrix, UDecomposition, PIVOT_EPSILON,
};
pub use transforms::{combine_all_parallel, combine_arcs, move_arc};
pub use verify::{run_all, SuiteReport, VerifyReport};
pub use weight::Weight;
