//! Call-by-need evaluation with skeletal sharing.
//!
//! The crate provides the terms and their arena ([`term`]), skeleton
//! extraction ([`skeleton`]), the reference calculi ([`calculus`]) and the
//! abstract machines that implement them ([`machine`]), together with the
//! cross-checks between them ([`check`]) and the family benchmark ([`bench`]).

pub mod bench;
pub mod calculus;
pub mod check;
pub mod gen;
pub mod machine;
pub mod skeleton;
pub mod term;
