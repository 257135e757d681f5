#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("enable either the `std` feature or the `libm` feature for floating-point math");

extern crate alloc;

pub mod numerics;
pub mod scenario;
pub mod linkmath;
pub mod allocator;
pub mod selection;
