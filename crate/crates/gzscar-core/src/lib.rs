//! Product-state scars of spin-S XYZ chains built from Jacobi elliptic
//! functions, and the machinery to test their dynamical stability.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is on.
//! The `std` feature only switches on faster kernels inside the linear
//! algebra backend and `std::error::Error` impls; results are identical.

#![cfg_attr(not(feature = "std"), no_std)]
// f64 math resolves to inherent methods whenever std is linked anywhere in
// the build graph, and to libm through num_traits::Float otherwise
#![allow(unused_imports)]

extern crate alloc;

pub mod bogoliubov;
pub mod ed_oracle;
pub mod elliptic;
pub mod lattice_classical;
pub mod linalg;
pub mod quad;
pub mod rotframe;
pub mod scars;
pub mod spinwave;
pub mod vec3;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
