pub mod ar;
pub mod error;
pub mod fullmeasure;
pub mod gdv;
pub mod json;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod reconstruct;
pub mod sos;
pub mod space;
pub mod splitshift;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
