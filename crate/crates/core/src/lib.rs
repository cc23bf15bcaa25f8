//! Scalar curvature functional on compact homogeneous spaces: Einstein
//! metrics as critical points, the second variation along diagonal
//! directions, and a catalog of worked examples.

pub mod algebra;
pub mod error;
pub mod homspace;
pub mod linalg;
pub mod curvature;
pub mod criticality;
pub mod oracle;
pub mod catalog;
pub mod spacefile;
pub mod analysis;
