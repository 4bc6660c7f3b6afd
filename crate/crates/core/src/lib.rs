//! Quivers with labeled arrows, their representations over finite fields, and
//! multi-Gieseker stability for sheaves on the projective line.

pub mod error;
pub mod linalg;
pub mod quiver;
pub mod rational;
pub mod rep;
pub mod replab;
pub mod poly;
pub mod sheaf;
pub mod p1;
pub mod embedding;
pub mod lp;
pub mod walls;
pub mod io;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quivers.md")]
    mod quivers {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/sheaves.md")]
    mod sheaves {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/walls.md")]
    mod walls {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
