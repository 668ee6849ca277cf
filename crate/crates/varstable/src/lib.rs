pub mod coeffs;
pub mod error;
pub mod kernels;
pub mod point;
pub mod quad;
pub mod report;
pub mod symbol;
