//! Structure vectors of n-dimensional algebras under the general linear group.

pub mod exactla;
pub mod canon;
pub mod degen;
pub mod gamma2;
pub mod gfield;
pub mod report;
pub mod spinmx;
pub mod structvec;
pub mod suite;
