pub mod corpus;
pub mod driver;
pub mod error;
pub mod factorbase;
pub mod fixedreal;
pub mod fpoly;
pub mod intlinalg;
pub mod numfield;
pub mod params;
pub mod poly;
pub mod regulator;
pub mod relations;
pub mod serde_big;
pub mod util;
pub mod verify;
pub mod zfactor;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/number-fields.md")]
    mod number_fields {}
    #[doc = include_str!("../../../book/src/relations.md")]
    mod relations {}
    #[doc = include_str!("../../../book/src/class-group.md")]
    mod class_group {}
    #[doc = include_str!("../../../book/src/fixed-point.md")]
    mod fixed_point {}
    #[doc = include_str!("../../../book/src/regulator.md")]
    mod regulator {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
