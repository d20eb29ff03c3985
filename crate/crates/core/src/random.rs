//! Seeded random draws of matrices and fields.
//!
//! All generators take an explicit [`ChaCha20Rng`] so that a `(name, seed)`
//! pair written into a config header regenerates the same payload.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::field::{LinkField, MatrixField, ScalarKind};
use crate::lattice::Lattice;
use crate::linalg::{self, Mat};

/// Name recorded in config headers next to the seed.
pub const RNG_NAME: &str = "chacha20";

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn entry(rng: &mut impl Rng, kind: ScalarKind, half_width: f64) -> Complex64 {
    let re = rng.random_range(-half_width..=half_width);
    let im = match kind {
        ScalarKind::Real => 0.0,
        ScalarKind::Complex => rng.random_range(-half_width..=half_width),
    };
    Complex64::new(re, im)
}

/// Entries uniform in `[-0.5, 0.5]` (real and imaginary parts independently).
pub fn uniform_matrix(rng: &mut impl Rng, m: usize, kind: ScalarKind) -> Mat {
    Mat::from_fn(m, m, |_, _| entry(rng, kind, 0.5))
}

/// Uniform entries, redrawn until the matrix is invertible.
pub fn random_gl(rng: &mut impl Rng, m: usize, kind: ScalarKind) -> Mat {
    loop {
        let a = uniform_matrix(rng, m, kind);
        if linalg::is_invertible(&a) {
            return a;
        }
    }
}

/// `I + E` with `|E_ij| ≤ 0.5/m` per part, so `‖E‖_∞ < 1` and the result is
/// invertible with a bounded condition number.
pub fn near_identity(rng: &mut impl Rng, m: usize, kind: ScalarKind) -> Mat {
    let w = 0.5 / m as f64;
    linalg::identity(m) + Mat::from_fn(m, m, |_, _| entry(rng, kind, w))
}

/// Phase uniform in `(-π, π]`.
pub fn phase(rng: &mut impl Rng) -> f64 {
    -rng.random_range(-PI..PI)
}

pub fn u1(rng: &mut impl Rng) -> Mat {
    linalg::scalar(Complex64::from_polar(1.0, phase(rng)))
}

pub fn uniform_site_field(rng: &mut impl Rng, lattice: &Lattice, m: usize, kind: ScalarKind) -> MatrixField {
    MatrixField::from_fn(lattice, m, kind, |_| uniform_matrix(rng, m, kind))
}

pub fn uniform_link_field(rng: &mut impl Rng, lattice: &Lattice, m: usize, kind: ScalarKind) -> LinkField {
    LinkField::from_fn(lattice, m, kind, |_, _| uniform_matrix(rng, m, kind))
}

/// Well-conditioned invertible gauge function, one [`near_identity`] matrix
/// per site.
pub fn gauge_field(rng: &mut impl Rng, lattice: &Lattice, m: usize, kind: ScalarKind) -> MatrixField {
    MatrixField::from_fn(lattice, m, kind, |_| near_identity(rng, m, kind))
}

/// Site-wise U(1) phases.
pub fn u1_gauge_field(rng: &mut impl Rng, lattice: &Lattice) -> MatrixField {
    MatrixField::from_fn(lattice, 1, ScalarKind::Complex, |_| u1(rng))
}
