//! Pauli matrices and 2×2 / 4×4 block helpers.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli(j: usize) -> Mat2 {
    match j {
        0 => Mat2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
        1 => Mat2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
        2 => Mat2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
        _ => panic!("pauli index {j}"),
    }
}

/// `σ(v) = v_j σ_j`.
pub fn sigma_dot(v: [f64; 3]) -> Mat2 {
    pauli(0) * c(v[0], 0.) + pauli(1) * c(v[1], 0.) + pauli(2) * c(v[2], 0.)
}

pub fn id2() -> Mat2 {
    Mat2::identity()
}

/// Assemble `[[a, b], [c, d]]` from 2×2 blocks.
pub fn blocks(a: Mat2, b: Mat2, cc: Mat2, d: Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&cc);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&d);
    m
}

pub fn max_abs4(m: &Mat4) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_abs2(m: &Mat2) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
