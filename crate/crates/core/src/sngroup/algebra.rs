use nalgebra::Vector4;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::element::exponents;
use crate::fields::Spectral;
use crate::geometry::pauli::{blocks, id2, sigma_dot, Mat2};
use crate::geometry::{LiftedSpinor, VectorField, IDX_S, IDX_T};
use crate::{Error, Result};

/// Coordinates of the Lie algebra: rotation `ω`, boost `β`, translation `γ`,
/// time translation `ε`, dilation `δ`, vertical translation `η`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LieParams {
    pub omega: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// The generator `X` at `(x, t, s)`.
pub fn lie_vector(lp: &LieParams, x: [f64; 3], t: f64, s: f64) -> [f64; 5] {
    let r = cross(lp.omega, x);
    let ks = exponents::lie_space();
    let kt = exponents::lie_time();
    let bx = lp.beta[0] * x[0] + lp.beta[1] * x[1] + lp.beta[2] * x[2];
    [
        r[0] + t * lp.beta[0] + lp.gamma[0] + ks * lp.delta * x[0],
        r[1] + t * lp.beta[1] + lp.gamma[1] + ks * lp.delta * x[1],
        r[2] + t * lp.beta[2] + lp.gamma[2] + ks * lp.delta * x[2],
        kt * lp.delta * t + lp.epsilon,
        -bx - lp.delta * s + lp.eta,
    ]
}

impl VectorField for LieParams {
    fn value(&self, x: [f64; 3], t: f64, s: f64) -> [f64; 5] {
        lie_vector(self, x, t, s)
    }

    fn jacobian(&self, _: [f64; 3], _: f64, _: f64) -> [[f64; 5]; 5] {
        let mut j = [[0.0; 5]; 5];
        let ks = exponents::lie_space();
        for i in 0..3 {
            let mut ei = [0.0; 3];
            ei[i] = 1.0;
            // ∂_i (ω×x) = ω × e_i
            let c = cross(self.omega, ei);
            for k in 0..3 {
                j[i][k] = c[k];
            }
            j[i][i] += ks * self.delta;
            j[IDX_T][i] = self.beta[i];
            j[i][IDX_S] = -self.beta[i];
        }
        j[IDX_T][IDX_T] = exponents::lie_time() * self.delta;
        j[IDX_S][IDX_S] = -self.delta;
        j
    }
}

/// Infinitesimal action on a lifted spinor over flat potentials: transport
/// `X^μ∂_μψ` (with `∂_s = im/ħ`), the spin block matrix and the density term.
///
/// Requires `∂_tψ` when `X^t ≠ 0` somewhere on the grid.
pub fn infinitesimal_action(lp: &LieParams, l: &LiftedSpinor) -> Result<LiftedSpinor> {
    let grid = l.grid;
    let n = grid.len();
    let needs_t = lp.epsilon != 0.0 || (lp.delta != 0.0 && l.time != 0.0);
    if needs_t && l.dt.is_none() {
        return Err(Error::Precondition("∂_tψ is required for generators with X^t ≠ 0".into()));
    }
    let sp = Spectral::get(&grid);
    let grads: Vec<[Vec<C64>; 3]> = l.psi.iter().map(|c| sp.gradient(c)).collect();
    let ci = C64::new(0.0, 0.5);
    let sd = exponents::spin_block();
    let w_om = sigma_dot(lp.omega) * ci;
    let z = Mat2::zeros();
    let mat = blocks(
        id2() * C64::new(-sd * lp.delta, 0.0) + w_om,
        z,
        sigma_dot(lp.beta) * ci,
        id2() * C64::new(sd * lp.delta, 0.0) + w_om,
    ) + nalgebra::Matrix4::identity() * C64::new(exponents::lie_density() * lp.delta, 0.0);
    let ims = C64::new(0.0, l.m / l.hbar);
    let mut out: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    let mut slope: [Vec<C64>; 4] = std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n]);
    for i in 0..n {
        let x = grid.position(i);
        let xv = lie_vector(lp, x, l.time, 0.0);
        let psi = Vector4::new(l.psi[0][i], l.psi[1][i], l.psi[2][i], l.psi[3][i]);
        let mv = mat * psi;
        for c in 0..4 {
            let mut v = mv[c] + ims * xv[IDX_S] * psi[c];
            for a in 0..3 {
                v += grads[c][a][i] * xv[a];
            }
            if xv[IDX_T] != 0.0 {
                v += l.dt.as_ref().expect("checked above")[c][i] * xv[IDX_T];
            }
            out[c][i] = v;
            slope[c][i] = ims * (-lp.delta) * psi[c];
        }
    }
    Ok(LiftedSpinor {
        grid,
        psi: out,
        m: l.m,
        hbar: l.hbar,
        time: l.time,
        dt: None,
        fiber_slope: (lp.delta != 0.0).then_some(slope),
    })
}
