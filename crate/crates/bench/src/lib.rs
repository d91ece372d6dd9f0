//! Shared fixtures for the benchmarks.

use ncmart::harness::{Family, Instance, Shape};

/// Ginibre instance on the filtration described by `shape`.
pub fn instance(shape: &str, seed: u64) -> Instance {
    let shape: Shape = shape.parse().expect("valid shape");
    Instance::generate(0, seed, &shape, Family::Ginibre).expect("instance generates")
}

/// Shapes of increasing dimension used across benchmark groups.
pub const SHAPES: [&str; 3] = ["tensor:2x2x2", "tensor:2x2x4", "tensor:4x4x4"];
