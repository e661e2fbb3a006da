//! Intersecting algebraic-geometry codes and binary (2,1)-separating codes.
pub mod agcodes;
pub mod codes;
pub mod concat;
pub mod curves;
pub mod gf;
pub mod io;
pub mod matrix;
pub mod nordrob;
pub mod series;
