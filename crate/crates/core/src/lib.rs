#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod certificate;
pub mod davis;
pub mod error;
pub mod filtration;
pub mod harness;
pub mod kfunc;
pub mod norms;
pub mod orlicz;
pub mod random;
pub mod tolerance;

pub use algebra::{Operator, SingularProfile, TracialAlgebra, C64};
pub use certificate::{Certificate, Check, Relation};
pub use error::{Error, Result};
pub use filtration::{AdaptedSequence, Filtration, FiltrationSpec, Martingale};
pub use kfunc::{Couple, KValue};
pub use norms::{Side, SymmetricSpace};
pub use orlicz::OrliczFunction;
