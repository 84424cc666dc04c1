//! Numerical certificates for inequalities between the zeros and critical
//! points of complex polynomials, built on the differentiator matrix
//! `Q diag(z) Q`. See `book/` for a guided tour.

pub mod certs;
pub mod densela;
pub mod error;
pub mod harness;
mod optim;
pub mod polyzero;
pub mod serial;
pub mod sharpness;
pub mod symfun;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/critical-points.md")]
    mod critical_points {}
    #[doc = include_str!("../../../book/src/differentiator.md")]
    mod differentiator {}
    #[doc = include_str!("../../../book/src/symmetric-functions.md")]
    mod symmetric_functions {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/sharpness.md")]
    mod sharpness {}
    #[doc = include_str!("../../../book/src/audits.md")]
    mod audits {}
}
