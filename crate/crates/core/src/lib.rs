//! Discrete length and area on surfaces.
//!
//! Walls on a surface measure curves by counting crossings; the area of a
//! wallsystem is its number of self-crossings. The crate covers wallsystems,
//! their dual square-celled surfaces, the disk reduction engine, discrete
//! forms, integral norms on the torus and Klein bottle, and directed fine
//! surfaces.

pub mod combmap;
pub mod fillsearch;
pub mod fine;
pub mod forms;
pub mod lattice;
pub mod squarecell;
pub mod steinitz;
pub mod wallsystem;
