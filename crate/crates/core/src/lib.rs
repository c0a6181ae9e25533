pub mod field;
pub mod poset;
pub mod boolean_endo;
pub mod algebra;
pub mod gates;
pub mod preserver;
pub mod sample;
pub mod verifier;
pub mod io;
