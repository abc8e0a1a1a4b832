//! Core algebra and compilation for simulating the Fermi-Hubbard model with
//! the Derby-Klassen fermion-to-qubit encoding.
//!
//! This crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod circuits;
pub mod compile;
pub mod dk_mapping;
pub mod embed;
pub mod model;
pub mod pauli;
