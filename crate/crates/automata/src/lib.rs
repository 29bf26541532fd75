//! Executable textbook automata: DFAs, PDAs and Turing machines.
//!
//! This library reads machine definitions written as S-expression `gen-dfa`,
//! `gen-pda` and `gen-tm` forms, validates them against their textbook
//! definitions, runs them with bounded semantics, and tests semantic
//! equivalence between two machines of the same kind, reporting misclassified
//! words as counterexamples. On top of that sits a small grading layer that
//! scores a submitted machine against a reference solution plus optional unit
//! checks and properties, and renders the result as a Gradescope-style JSON
//! report.
//!
//! The pieces compose in pipeline order:
//!
//! * [`sexpr`] — the S-expression reader and printer shared by every input
//!   format.
//! * [`model`] — validated [`Dfa`](model::Dfa), [`Pda`](model::Pda) and
//!   [`Tm`](model::Tm) values built from `gen-x` forms, with accumulated
//!   validation errors and student-facing messages.
//! * [`exec`] — the three interpreters: a total DFA runner, a breadth-first
//!   bounded PDA runner over execution tuples, and a fuel-bounded TM runner
//!   with the reversed-left tape convention.
//! * [`equiv`] — deterministic word generation, randomized differential
//!   equivalence testing, the complete DFA equivalence decision procedure,
//!   and a small declarative property language.
//! * [`grade`] — assignments, unit checks, grading and JSON reports.

pub mod equiv;
pub mod exec;
pub mod grade;
pub mod model;
pub mod sexpr;
