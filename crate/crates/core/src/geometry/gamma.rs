use num_complex::Complex64 as C64;

use super::pauli::{blocks, id2, max_abs4, sigma_dot, Mat2, Mat4};
use super::{MetricBlock, PotentialData};
use crate::Result;

/// Upper- and lower-index gamma matrices at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSet {
    pub upper: [Mat4; 5],
    pub lower: [Mat4; 5],
}

fn ci(v: f64) -> C64 {
    C64::new(0.0, v)
}

impl GammaSet {
    pub fn from_potentials(u: f64, varpi: [f64; 3]) -> Self {
        let z = Mat2::zeros();
        let one = id2();
        let sw = sigma_dot(varpi);
        let mut upper = [Mat4::zeros(); 5];
        for (j, gj) in upper.iter_mut().enumerate().take(3) {
            let s = super::pauli::pauli(j);
            *gj = blocks(s * ci(-1.0), z, z, s * ci(1.0));
        }
        upper[3] = blocks(z, z, one, z);
        upper[4] = blocks(sw * ci(1.0), one * C64::new(-2.0, 0.0), one * C64::new(u, 0.0), sw * ci(-1.0));
        let lower = lower_gammas(u, varpi);
        GammaSet { upper, lower }
    }
}

/// The lower-index set, affine in `(U, ϖ)`.
pub fn lower_gammas(u: f64, varpi: [f64; 3]) -> [Mat4; 5] {
    let z = Mat2::zeros();
    let one = id2();
    let mut lower = [Mat4::zeros(); 5];
    for (j, gj) in lower.iter_mut().enumerate().take(3) {
        let s = super::pauli::pauli(j);
        *gj = blocks(s * ci(-1.0), z, one * C64::new(varpi[j], 0.0), s * ci(1.0));
    }
    lower[3] = blocks(z, one * C64::new(-2.0, 0.0), one * C64::new(-u, 0.0), z);
    lower[4] = blocks(z, z, one, z);
    lower
}

pub fn gamma_set(p: &PotentialData, x: [f64; 3], t: f64) -> Result<GammaSet> {
    let pt = p.point(x, t)?;
    Ok(GammaSet::from_potentials(pt.u, pt.varpi))
}

/// Max-norm of `{γ^μ, γ^ν} + 2g^{μν}` and `{γ_μ, γ_ν} + 2g_{μν}` over all pairs.
pub fn clifford_residual(gs: &GammaSet, mb: &MetricBlock) -> f64 {
    let mut r: f64 = 0.0;
    for mu in 0..5 {
        for nu in 0..5 {
            let up = gs.upper[mu] * gs.upper[nu] + gs.upper[nu] * gs.upper[mu]
                + Mat4::identity() * C64::new(2.0 * mb.ginv[(mu, nu)], 0.0);
            let lo = gs.lower[mu] * gs.lower[nu] + gs.lower[nu] * gs.lower[mu]
                + Mat4::identity() * C64::new(2.0 * mb.g[(mu, nu)], 0.0);
            r = r.max(max_abs4(&up)).max(max_abs4(&lo));
        }
    }
    r
}

/// Lowered set `g_{μν}γ^ν` computed by contraction (used to cross-check [`lower_gammas`]).
pub fn lower_by_metric(upper: &[Mat4; 5], mb: &MetricBlock) -> [Mat4; 5] {
    std::array::from_fn(|mu| {
        (0..5).fold(Mat4::zeros(), |acc, nu| acc + upper[nu] * C64::new(mb.g[(mu, nu)], 0.0))
    })
}

fn permutation_sign(p: &[usize; 5]) -> f64 {
    let mut s = 1.0;
    for i in 0..5 {
        for j in i + 1..5 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// `Γ = −(√−g / 5!) ε_{μνρλσ} γ^μγ^νγ^ργ^λγ^σ` with `ε_{123ts} = +1`.
pub fn chirality_matrix(gs: &GammaSet, mb: &MetricBlock) -> Mat4 {
    let mut acc = Mat4::zeros();
    let mut perm = [0usize; 5];
    fn rec(k: usize, used: &mut [bool; 5], perm: &mut [usize; 5], gs: &GammaSet, acc: &mut Mat4) {
        if k == 5 {
            let m = perm.iter().fold(Mat4::identity(), |m, &i| m * gs.upper[i]);
            *acc += m * C64::new(permutation_sign(perm), 0.0);
            return;
        }
        for i in 0..5 {
            if !used[i] {
                used[i] = true;
                perm[k] = i;
                rec(k + 1, used, perm, gs, acc);
                used[i] = false;
            }
        }
    }
    rec(0, &mut [false; 5], &mut perm, gs, &mut acc);
    acc * C64::new(-mb.sqrt_neg_det() / 120.0, 0.0)
}
