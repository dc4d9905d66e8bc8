//! Functionality testing and bimachine compilation for monoidal finite-state
//! transducers whose outputs live in an effective mge monoid.
//!
//! The pipeline is:
//!
//! 1. parse or build a [`Transducer`] ([`io`], [`tn`]),
//! 2. decide functionality with [`functionality::test_functionality`], which
//!    builds the squared output automaton and its valuation,
//! 3. compile into a [`Bimachine`] with [`compile::compile`] (equalizer
//!    accumulation) or [`classical::classical_compile`] (unambiguous
//!    expansion, free monoids only),
//! 4. evaluate words with [`Bimachine::evaluate`].

pub mod bimachine;
pub mod classical;
pub mod cli;
pub mod compile;
pub mod error;
pub mod fsa;
pub mod functionality;
pub mod io;
pub mod monoid;
pub mod squared;
pub mod tn;

pub use bimachine::Bimachine;
pub use error::{Error, Result};
pub use fsa::{Automaton, Dfa, InputAlphabet, StateSet, Transducer, Transition};
pub use monoid::{MgeMonoid, MonoidDescriptor, MonoidError, MonoidValue};
