pub mod error;
pub mod function;
pub mod linalg;
pub mod padic;
pub mod masks;
pub mod mra;
pub mod wavelets;
pub mod io;
