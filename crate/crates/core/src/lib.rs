//! Coherence and sign calculus for invertible objects in symmetric
//! monoidal categories.

pub mod cohomology;
pub mod composites;
pub mod kl;
pub mod models;
pub mod parse;
pub mod words;
pub mod group;
pub mod signs;
