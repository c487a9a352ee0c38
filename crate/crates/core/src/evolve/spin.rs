use num_complex::Complex64 as C64;

use crate::fields::GridSpec;
use crate::geometry::pauli::{max_abs2, pauli, sigma_dot, Mat2};
use crate::geometry::PotentialData;
use crate::{Error, Result};

/// Max over `j` of `‖(i/ħ)[−(ħ/4)σ(Ω), S_j] − ½(S×Ω)_j‖` with `S = (ħ/2)σ`.
pub fn spin_commutator_residual_for(omega: [f64; 3], hbar: f64) -> f64 {
    let h = sigma_dot(omega) * C64::new(-0.25 * hbar, 0.0);
    let s: [Mat2; 3] = std::array::from_fn(|j| pauli(j) * C64::new(0.5 * hbar, 0.0));
    let i_h = C64::new(0.0, 1.0 / hbar);
    (0..3)
        .map(|j| {
            let lhs = (h * s[j] - s[j] * h) * i_h;
            let (k, l) = ((j + 1) % 3, (j + 2) % 3);
            let rhs = (s[k] * C64::new(omega[l], 0.0) - s[l] * C64::new(omega[k], 0.0)) * C64::new(0.5, 0.0);
            max_abs2(&(lhs - rhs))
        })
        .fold(0.0, f64::max)
}

/// Spin-precession identity for potentials whose `Ω = ∇×ϖ` is uniform on `grid`.
pub fn spin_commutator_residual(p: &PotentialData, grid: &GridSpec, hbar: f64) -> Result<f64> {
    let gp = p.sample(grid, 0.0)?;
    let curl = gp.curl_varpi();
    let omega = [0, 1, 2].map(|a| curl[a][0]);
    let scale = omega.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    for a in 0..3 {
        for v in &curl[a] {
            if (v - omega[a]).abs() > 1e-12 * scale {
                return Err(Error::Precondition("Ω = ∇×ϖ is not uniform; spin identity needs constant Ω".into()));
            }
        }
    }
    Ok(spin_commutator_residual_for(omega, hbar))
}
