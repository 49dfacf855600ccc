//! Exact verification engine for curvature identities of hypersurfaces in
//! the homogeneous six-dimensional nearly Kaehler manifolds.

pub mod scalar;
pub mod linform;
pub mod parse;
pub mod tensor;
pub mod curvature;
pub mod pointmodel;
pub mod frames;
pub mod report;
pub mod tables;
pub mod almostcontact;
pub mod numeric_s6;
pub mod cli;
