//! Static symmetry breaking for CNF formulas by unit clauses, with
//! substitution-redundancy proofs and a checker for them.

pub mod bench;
pub mod checker;
pub mod cnf;
pub mod fixing;
pub mod group;
pub mod preprocess;
pub mod proof;
pub mod structure;
pub mod symmetry;
