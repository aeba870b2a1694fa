//! Counting polynomials of absolutely simple, simple and semisimple
//! representations of virtually free groups, presented as finite graphs of
//! finite groups.
//!
//! The pipeline runs from [`groupgraph`] (input data) through [`dimmonoid`]
//! (dimension vectors, Euler form) and [`series`] (graded series, plethystic
//! calculus, counting tables). [`fforacle`] recounts small cases by brute
//! force over finite fields.

pub mod dimmonoid;
pub mod exactalg;
pub mod fforacle;
pub mod groupgraph;
pub mod series;
