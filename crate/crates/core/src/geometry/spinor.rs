//! Lifted spinors on Bargmann space and the spinor calculus acting on them.
//!
//! The fibre dependence is the analytic phase `e^{ims/ħ}`; every field here is
//! the coefficient of that phase at `s = 0`. Density weights enter only through
//! the exponent [`DENSITY_WEIGHT`].

use nalgebra::Vector4;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::christoffel::christoffels_from_point;
use super::gamma::lower_gammas;
use super::pauli::Mat4;
use super::{GammaSet, GridPotential, MetricBlock, PotentialData, PotentialPoint, IDX_S, IDX_T};
use crate::fields::{GridSpec, Spectral};
use crate::{Error, Result};

/// `w = (N−1)/2N` for `N = 5`.
pub const DENSITY_WEIGHT: f64 = 2.0 / 5.0;

/// Four-component field `(φ₁, φ₂, χ₁, χ₂)`.
pub type Spinor4 = [Vec<C64>; 4];

pub fn spinor4_zeros(n: usize) -> Spinor4 {
    std::array::from_fn(|_| vec![C64::new(0.0, 0.0); n])
}

#[derive(Clone, Debug)]
pub struct LiftedSpinor {
    pub grid: GridSpec,
    pub psi: Spinor4,
    pub m: f64,
    pub hbar: f64,
    pub time: f64,
    /// `∂_tψ`; only its φ half enters the Dirac operator.
    pub dt: Option<Spinor4>,
    /// Coefficient of a term linear in `s` (produced by Lie derivatives along
    /// generators with `∂_s X^s ≠ 0`).
    pub fiber_slope: Option<Spinor4>,
}

impl LiftedSpinor {
    pub fn new(grid: GridSpec, phi: [Vec<C64>; 2], chi: [Vec<C64>; 2], m: f64, hbar: f64, time: f64) -> Self {
        let [p0, p1] = phi;
        let [c0, c1] = chi;
        LiftedSpinor { grid, psi: [p0, p1, c0, c1], m, hbar, time, dt: None, fiber_slope: None }
    }

    pub fn with_dt(mut self, dt: Spinor4) -> Self {
        self.dt = Some(dt);
        self
    }

    /// `∂_sΨ` coefficient: `(im/ħ)ψ` plus the slope if present.
    pub fn ds(&self) -> Spinor4 {
        let f = C64::new(0.0, self.m / self.hbar);
        std::array::from_fn(|c| {
            self.psi[c]
                .iter()
                .enumerate()
                .map(|(i, v)| f * v + self.fiber_slope.as_ref().map_or(C64::new(0.0, 0.0), |s| s[c][i]))
                .collect()
        })
    }

    fn at(&self, field: &Spinor4, i: usize) -> Vector4<C64> {
        Vector4::new(field[0][i], field[1][i], field[2][i], field[3][i])
    }

    /// Partial derivatives `∂_μψ` for all five directions.
    fn partials(&self, need_t: bool) -> Result<[Spinor4; 5]> {
        let sp = Spectral::get(&self.grid);
        let grads: Vec<[Vec<C64>; 3]> = self.psi.iter().map(|c| sp.gradient(c)).collect();
        let spatial = |a: usize| -> Spinor4 { std::array::from_fn(|c| grads[c][a].clone()) };
        let dt = match (&self.dt, need_t) {
            (Some(d), _) => d.clone(),
            (None, false) => spinor4_zeros(self.grid.len()),
            (None, true) => return Err(Error::Precondition("∂_tψ is required".into())),
        };
        Ok([spatial(0), spatial(1), spatial(2), dt, self.ds()])
    }
}

/// `∂_μ` of the potentials as 5-vectors: `(∂_μU, ∂_μϖ)`.
fn potential_gradients(pt: &PotentialPoint) -> Result<[(f64, [f64; 3]); 5]> {
    let d = pt.derivs()?;
    let mut out = [(0.0, [0.0; 3]); 5];
    for (mu, o) in out.iter_mut().enumerate().take(3) {
        *o = (d.grad_u[mu], d.jac_varpi[mu]);
    }
    out[IDX_T] = (d.dt_u, d.dt_varpi);
    Ok(out)
}

/// `B_μ = Σ_ρ [γ^ρ, ∂_μγ_ρ − Γ^σ_{μρ}γ_σ]`; the connection is `C_μ = −B_μ/8`.
pub fn connection_commutators(pt: &PotentialPoint) -> Result<[Mat4; 5]> {
    let gs = GammaSet::from_potentials(pt.u, pt.varpi);
    let chr = christoffels_from_point(pt)?;
    let base = lower_gammas(0.0, [0.0; 3]);
    let grads = potential_gradients(pt)?;
    let mut out = [Mat4::zeros(); 5];
    for mu in 0..5 {
        let (du, dw) = grads[mu];
        let dlow = lower_gammas(du, dw);
        let mut b = Mat4::zeros();
        for rho in 0..5 {
            let mut k = dlow[rho] - base[rho];
            for sig in 0..5 {
                let c = chr.gamma[sig][mu][rho];
                if c != 0.0 {
                    k -= gs.lower[sig] * C64::new(c, 0.0);
                }
            }
            b += gs.upper[rho] * k - k * gs.upper[rho];
        }
        out[mu] = b;
    }
    Ok(out)
}

/// Spin connection `C_μ` at one point.
pub fn spin_connection(pt: &PotentialPoint) -> Result<[Mat4; 5]> {
    Ok(connection_commutators(pt)?.map(|b| b * C64::new(-0.125, 0.0)))
}

/// `Σ_μ γ^μ B_μ` (reduces to `−2iσ(Ω)` in the lower-left block).
pub fn spin_connection_contraction(pt: &PotentialPoint) -> Result<Mat4> {
    let gs = GammaSet::from_potentials(pt.u, pt.varpi);
    let b = connection_commutators(pt)?;
    Ok((0..5).fold(Mat4::zeros(), |acc, mu| acc + gs.upper[mu] * b[mu]))
}

fn grid_potential(p: &PotentialData, l: &LiftedSpinor) -> Result<GridPotential> {
    p.sample(&l.grid, l.time)
}

/// `∇_μψ = ∂_μψ + C_μψ` on every node.
pub fn covariant_spinor_derivative(l: &LiftedSpinor, p: &PotentialData, mu: usize) -> Result<Spinor4> {
    if mu > 4 {
        return Err(Error::Precondition(format!("direction {mu} out of range")));
    }
    let gp = grid_potential(p, l)?;
    let parts = l.partials(mu == IDX_T)?;
    let rows: Vec<Vector4<C64>> = (0..l.grid.len())
        .into_par_iter()
        .map(|i| {
            let c = spin_connection(&gp.point(i))?;
            Ok(l.at(&parts[mu], i) + c[mu] * l.at(&l.psi, i))
        })
        .collect::<Result<_>>()?;
    Ok(unpack(&rows))
}

fn unpack(rows: &[Vector4<C64>]) -> Spinor4 {
    std::array::from_fn(|c| rows.iter().map(|r| r[c]).collect())
}

/// A vector field on Bargmann space, given with its Jacobian `J[μ][ν] = ∂_μX^ν`.
pub trait VectorField: Sync {
    fn value(&self, x: [f64; 3], t: f64, s: f64) -> [f64; 5];
    fn jacobian(&self, x: [f64; 3], t: f64, s: f64) -> [[f64; 5]; 5];
}

/// The fibre generator `ξ = ∂_s`.
pub struct Xi;

impl VectorField for Xi {
    fn value(&self, _: [f64; 3], _: f64, _: f64) -> [f64; 5] {
        [0.0, 0.0, 0.0, 0.0, 1.0]
    }
    fn jacobian(&self, _: [f64; 3], _: f64, _: f64) -> [[f64; 5]; 5] {
        [[0.0; 5]; 5]
    }
}

/// `∂_μ g_{νλ}` for the Brinkmann metric from potential gradients.
fn metric_gradient(pt: &PotentialPoint) -> Result<[[[f64; 5]; 5]; 5]> {
    let grads = potential_gradients(pt)?;
    let mut dg = [[[0.0; 5]; 5]; 5];
    for mu in 0..5 {
        let (du, dw) = grads[mu];
        for i in 0..3 {
            dg[mu][i][IDX_T] = dw[i];
            dg[mu][IDX_T][i] = dw[i];
        }
        dg[mu][IDX_T][IDX_T] = -2.0 * du;
    }
    Ok(dg)
}

/// Coefficient of the Lie derivative of the spinor density `Ψ` along `X`:
/// `X^μ∇_μψ − ¼γ^μγ^ν∇_[μX_ν]ψ + w(∇_μX^μ)ψ`, evaluated at `s = 0`.
///
/// When `∂_sX ≠ 0` the result acquires a term linear in `s`, returned as the
/// output's fibre slope.
pub fn lie_derivative_spinor_density<X: VectorField>(x_field: &X, l: &LiftedSpinor, p: &PotentialData) -> Result<LiftedSpinor> {
    if l.fiber_slope.is_some() {
        return Err(Error::Precondition("input must be equivariant (no fibre slope)".into()));
    }
    let gp = grid_potential(p, l)?;
    let needs_t = (0..l.grid.len()).any(|i| x_field.value(l.grid.position(i), l.time, 0.0)[IDX_T] != 0.0);
    let parts = l.partials(needs_t)?;
    let mut has_slope = false;
    let rows: Vec<(Vector4<C64>, Vector4<C64>)> = (0..l.grid.len())
        .into_par_iter()
        .map(|i| {
            let x = l.grid.position(i);
            let pt = gp.point(i);
            let xv = x_field.value(x, l.time, 0.0);
            let jac = x_field.jacobian(x, l.time, 0.0);
            for row in &jac {
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Precondition("vector field is not differentiable here".into()));
                }
            }
            let conn = spin_connection(&pt)?;
            let mb = MetricBlock::from_potentials(pt.u, pt.varpi);
            let gs = GammaSet::from_potentials(pt.u, pt.varpi);
            let chr = christoffels_from_point(&pt)?;
            let dg = metric_gradient(&pt)?;
            let psi = l.at(&l.psi, i);
            let nabla: Vec<Vector4<C64>> = (0..5).map(|mu| l.at(&parts[mu], i) + conn[mu] * psi).collect();
            let mut out = Vector4::zeros();
            for mu in 0..5 {
                if xv[mu] != 0.0 {
                    out += nabla[mu] * C64::new(xv[mu], 0.0);
                }
            }
            // ∂_μX_ν = (∂_μg_{νλ})X^λ + g_{νλ}∂_μX^λ
            let dlow = |mu: usize, nu: usize| -> f64 {
                (0..5).map(|lam| dg[mu][nu][lam] * xv[lam] + mb.g[(nu, lam)] * jac[mu][lam]).sum()
            };
            let mut rot = Mat4::zeros();
            for mu in 0..5 {
                for nu in 0..5 {
                    let a = 0.5 * (dlow(mu, nu) - dlow(nu, mu));
                    if a != 0.0 {
                        rot += gs.upper[mu] * gs.upper[nu] * C64::new(a, 0.0);
                    }
                }
            }
            out -= rot * psi * C64::new(0.25, 0.0);
            let mut div = 0.0;
            for mu in 0..5 {
                div += jac[mu][mu];
                for lam in 0..5 {
                    div += chr.gamma[mu][mu][lam] * xv[lam];
                }
            }
            if div != 0.0 {
                out += psi * C64::new(DENSITY_WEIGHT * div, 0.0);
            }
            let mut slope = Vector4::zeros();
            for mu in 0..5 {
                if jac[IDX_S][mu] != 0.0 {
                    slope += nabla[mu] * C64::new(jac[IDX_S][mu], 0.0);
                }
            }
            Ok((out, slope))
        })
        .collect::<Result<_>>()?;
    let vals: Vec<Vector4<C64>> = rows.iter().map(|r| r.0).collect();
    let slopes: Vec<Vector4<C64>> = rows.iter().map(|r| r.1).collect();
    if slopes.iter().any(|s| s.iter().any(|v| *v != C64::new(0.0, 0.0))) {
        has_slope = true;
    }
    Ok(LiftedSpinor {
        grid: l.grid,
        psi: unpack(&vals),
        m: l.m,
        hbar: l.hbar,
        time: l.time,
        dt: None,
        fiber_slope: has_slope.then(|| unpack(&slopes)),
    })
}

/// Per-node residuals of the Bargmann Dirac equation, scaled by `iħ` so that
/// they equal the two lines of the generalised Lévy-Leblond system.
#[derive(Clone, Debug)]
pub struct DiracResidual {
    pub line1: Vec<f64>,
    pub line2: Vec<f64>,
}

impl DiracResidual {
    pub fn max_line1(&self) -> f64 {
        self.line1.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max_line2(&self) -> f64 {
        self.line2.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max(&self) -> f64 {
        self.max_line1().max(self.max_line2())
    }
    /// Per-node Euclidean norm of both lines.
    pub fn total(&self) -> Vec<f64> {
        self.line1.iter().zip(&self.line2).map(|(a, b)| a.hypot(*b)).collect()
    }
}

/// `iħ γ^μ∇_μψ` per node, split into its upper and lower bispinor.
pub fn dirac_residual(l: &LiftedSpinor, p: &PotentialData) -> Result<DiracResidual> {
    let gp = grid_potential(p, l)?;
    let parts = l.partials(true)?;
    let ih = C64::new(0.0, l.hbar);
    let rows: Vec<(f64, f64)> = (0..l.grid.len())
        .into_par_iter()
        .map(|i| {
            let pt = gp.point(i);
            let gs = GammaSet::from_potentials(pt.u, pt.varpi);
            let conn = spin_connection(&pt)?;
            let psi = l.at(&l.psi, i);
            let mut r = Vector4::zeros();
            for mu in 0..5 {
                r += gs.upper[mu] * (l.at(&parts[mu], i) + conn[mu] * psi);
            }
            r *= ih;
            let top = (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
            let bot = (r[2].norm_sqr() + r[3].norm_sqr()).sqrt();
            Ok((top, bot))
        })
        .collect::<Result<_>>()?;
    Ok(DiracResidual { line1: rows.iter().map(|r| r.0).collect(), line2: rows.iter().map(|r| r.1).collect() })
}
