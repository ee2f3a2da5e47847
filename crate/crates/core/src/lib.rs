//! Numerical workbench for the natural almost Hermitian structure that a
//! metric `g` and an affine connection `D` induce on the tangent bundle.
//!
//! Every field is evaluated with exact derivatives through truncated Taylor
//! jets ([`jet::ScalarJet`]), so curvature of the Sasaki metric can be
//! computed both from closed-form lifted formulas and from a brute-force
//! chart computation on `TM`, and the two compared.
//!
//! ```
//! use tmk::zoo;
//!
//! let model = zoo::exp_diagonal();
//! let spec = tmk::SampleSpec::new(7, 4);
//! let report = tmk::classify(&model, &spec).unwrap();
//! assert!(report.flag("kahler"));
//! ```

pub mod bundle;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod symplectic;
pub mod zoo;

pub use bundle::classify::{classify, FlagEntry, StructureReport};
pub use bundle::sampling::{SampleBox, SampleSpec};
pub use bundle::TangentPoint;
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use geometry::{ConnectionField, LocalGeometry, MetricField, TensorValue};
pub use jet::ScalarJet;
pub use zoo::Model;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/jets.md")]
    struct Jets;
    #[doc = include_str!("../../../book/src/connections.md")]
    struct Connections;
    #[doc = include_str!("../../../book/src/tangent-bundle.md")]
    struct TangentBundle;
    #[doc = include_str!("../../../book/src/models.md")]
    struct Models;
}
