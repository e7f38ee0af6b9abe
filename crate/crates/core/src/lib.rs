//! Checking kernel for recursive systems and for mathematical systems with
//! a structural induction rule.
//!
//! The crate is organised in layers:
//!
//! * [`syntax`] — symbols, variables, argument lists, formulas and the
//!   bit-exact s-expression wire format;
//! * [`binding`] — variable analysis, collision-free substitution,
//!   generalization, degree and class descriptors;
//! * [`langset`] — restricted argument-list languages given by a
//!   single-nonterminal grammar;
//! * [`rsys`] — recursive systems, R-derivation checking and bounded
//!   forward-chaining saturation;
//! * [`kernel`] — the proof checker for mathematical systems (axiom
//!   recognizers and inference rules (a)–(e));
//! * [`transform`] — proof-to-proof transformers (connective elimination,
//!   prime-formula elimination, deduction, generalization of constants,
//!   guard relativization);
//! * [`semantics`] — bounded three-valued evaluation of statements.

pub mod binding;
pub mod kernel;
#[cfg(test)]
pub(crate) mod testsys;
pub mod langset;
pub mod rsys;
pub mod semantics;
pub mod syntax;
pub mod transform;
