//! Fixtures shared by the benchmarks.

use margulis_core::{Cocycle, DeformationSpace, SchottkyGroup, Word};
use nalgebra::DVector;

pub fn sphere(r: usize) -> DeformationSpace {
    DeformationSpace::new(
        SchottkyGroup::three_holed_sphere(4.0, 4.0).expect("preset certifies"),
        r,
    )
    .expect("rank is full")
}

pub fn torus() -> DeformationSpace {
    let g = SchottkyGroup::one_holed_torus(5.0, 5.0, std::f64::consts::FRAC_PI_3)
        .expect("preset certifies");
    DeformationSpace::new(g, 1).expect("rank is full")
}

/// A fixed cocycle with all entries nonzero.
pub fn cocycle(space: &DeformationSpace) -> Cocycle {
    let n = space.dim();
    let values = (0..space.rank())
        .map(|i| DVector::from_fn(n, |j, _| ((i * n + j) as f64 * 0.7).sin()))
        .collect();
    space.cocycle(values).expect("dimensions match")
}

/// `(ab⁻¹)^{n/2}`-style word of length `n` that is cyclically reduced.
pub fn word(n: usize) -> Word {
    "aBAb"
        .chars()
        .cycle()
        .take(n)
        .collect::<String>()
        .parse()
        .expect("valid letters")
}
