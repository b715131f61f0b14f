//! Fully worked multiplicity-free triples on GL(2): the Cartan-induced
//! family, the cross-field induction of a cuspidal representation, the
//! Gelfand-Graev triples, and the boundary examples (a non-Gelfand pair
//! whose nontrivial twists are multiplicity-free, and the subfield Gelfand
//! pair).

pub mod special;
pub mod triple1;
pub mod triple2;

pub use special::{gelfand_graev_verify, gow_report, ricci_samanta_report};
pub use triple1::Triple1;
pub use triple2::Triple2;
