//! Exact arithmetic over the rationals and quadratic number fields.

pub mod counting;
pub mod enumerate;
pub mod exactnum;
pub mod heights;
pub mod quadfield;

pub use exactnum::{compare_surd, rational_height, Surd};
pub use heights::{preper_height_bound_holds, relative_height, HeightValue};
pub use quadfield::{make_field, PrimeIdealData, QuadElement, QuadField, Splitting};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
