//! Polynomial functions over finite bounded distributive lattices.
//!
//! A lattice polynomial function is anything you can build from variables and
//! constants using meet and join. On a bounded distributive lattice every such
//! function has a disjunctive normal form
//!
//! ```text
//!     f(x1, ..., xn)  =  \/_{I ⊆ [n]} ( alpha(I) /\ (/\_{i in I} xi) )
//! ```
//!
//! and that representation makes questions about these functions finitely
//! checkable: whether an arbitrary function table is polynomial, whether a
//! polynomial is associative in the n-ary sense, and how associative
//! polynomials extend to functions on strings of every length.
//!
//! The crate is organized around that pipeline:
//!
//! * [`lattice`]: finite bounded distributive lattices, validated eagerly at
//!   construction, with precomputed meet/join/order tables.
//! * [`poly`]: polynomial functions as coefficient maps, function tables,
//!   canonical and minimal normal forms, and decision procedures for
//!   polynomiality.
//! * [`assoc`]: n-ary and variadic associativity checkers, the four-parameter
//!   normal form of associative polynomials, classification, enumeration, and
//!   extension of n-ary associative polynomials to variadic ones.
//! * [`expr`]: a small term-expression language (`x1 /\ 'a' \/ med(...)`)
//!   that parses to an AST and lowers to a polynomial.
//! * [`theorems`]: a verification harness that confirms the structural results
//!   underpinning the crate on concrete lattices and emits pass/fail reports.
//! * [`io`]: JSON file formats for lattices, polynomials, tables, and
//!   variadic families.

pub mod assoc;
pub mod expr;
pub mod io;
pub mod lattice;
pub mod poly;
pub mod theorems;

/// Outcome of a property check: either the property holds everywhere in the
/// searched space, or it fails and we keep one concrete counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(f(w)),
        }
    }
}
