//! Exact verification of the tame local Langlands correspondence for `PGL(2, Q_p)`.

pub mod characters;
pub mod constants;
pub mod cover;
pub mod exact;
pub mod gl2;
pub mod group;
pub mod padic;
pub mod quotient;
pub mod verifier;

pub use exact::{cyclo_add, cyclo_eq, cyclo_mul, CycloValue, ExactError, OpaqueScale, OpaqueTag, Rat, ReducedKernel, RootOfUnity};
pub use padic::{sqrt_hensel, ExtOp, ExtValue, FieldConfig, PadicElem, PadicError, QuadExtElem};
pub use quotient::{unit_quotient_structure, FQuotient, QElem, UnitQuotient};
