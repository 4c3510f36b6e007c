//! Volumetric denoising of scanning acoustic microscopy data.

pub mod bm4d;
pub mod error;
pub mod filters;
pub mod io;
pub mod metrics;
pub mod phantom;
pub mod rng;
pub mod volume;

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/volumes.md")]
    mod volumes {}
    #[doc = include_str!("../../../book/src/phantom.md")]
    mod phantom {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/collaborative.md")]
    mod collaborative {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
