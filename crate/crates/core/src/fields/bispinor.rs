use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::GridSpec;
use crate::{Error, Physics, Result};

/// Two complex components on every node.
pub type Bispinor = [Vec<C64>; 2];

/// The principal bispinor φ with the constants it evolves under.
///
/// The second bispinor χ is derived on demand (see [`crate::evolve::chi_from_phi`]).
#[derive(Clone, Debug)]
pub struct BispinorField {
    pub grid: GridSpec,
    pub phi: Bispinor,
    pub physics: Physics,
    pub time: f64,
    /// Accumulated mass dilation factor; `physics.m` already includes it.
    pub mass_scale: f64,
}

pub(crate) fn zeros(n: usize) -> Bispinor {
    [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]]
}

/// Pointwise spin density components `φ†σ_a φ`.
pub fn spin_density(p0: C64, p1: C64) -> [f64; 3] {
    let z = p0.conj() * p1;
    [2.0 * z.re, 2.0 * z.im, p0.norm_sqr() - p1.norm_sqr()]
}

impl BispinorField {
    pub fn zeros(grid: GridSpec, physics: Physics) -> Self {
        BispinorField { grid, phi: zeros(grid.len()), physics, time: 0.0, mass_scale: 1.0 }
    }

    pub fn from_fn<F>(grid: GridSpec, physics: Physics, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [C64; 2] + Sync,
    {
        let vals: Vec<[C64; 2]> = (0..grid.len()).into_par_iter().map(|i| f(grid.position(i))).collect();
        let phi = [vals.iter().map(|v| v[0]).collect(), vals.iter().map(|v| v[1]).collect()];
        BispinorField { grid, phi, physics, time: 0.0, mass_scale: 1.0 }
    }

    /// Normalised Gaussian packet `exp(-|x-x0|²/(4σ²) + i k·x) ξ`.
    ///
    /// With this convention each position coordinate has variance σ².
    pub fn gaussian(
        grid: GridSpec,
        physics: Physics,
        center: [f64; 3],
        width: f64,
        wavevector: [f64; 3],
        spinor: [C64; 2],
    ) -> Self {
        let sn = (spinor[0].norm_sqr() + spinor[1].norm_sqr()).sqrt();
        let xi = [spinor[0] / sn, spinor[1] / sn];
        let mut f = Self::from_fn(grid, physics, |x| {
            let r2: f64 = (0..3).map(|a| (x[a] - center[a]).powi(2)).sum();
            let ph: f64 = (0..3).map(|a| wavevector[a] * x[a]).sum();
            let amp = C64::from_polar((-r2 / (4.0 * width * width)).exp(), ph);
            [amp * xi[0], amp * xi[1]]
        });
        f.normalize();
        f
    }

    pub fn density(&self) -> Vec<f64> {
        self.phi[0].iter().zip(&self.phi[1]).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sq().sqrt();
        if s > 0.0 {
            self.scale(C64::new(1.0 / s, 0.0));
        }
    }

    pub fn scale(&mut self, s: C64) {
        for c in self.phi.iter_mut() {
            c.iter_mut().for_each(|v| *v *= s);
        }
    }

    /// `∫ φ₁† φ₂ d³x`.
    pub fn inner(&self, other: &BispinorField) -> C64 {
        inner(&self.grid, &self.phi, &other.phi)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        for c in &self.phi {
            if c.len() != self.grid.len() {
                return Err(Error::Validation("component length does not match grid".into()));
            }
            if let Some(i) = c.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::Validation(format!("non-finite field value at node {i}")));
            }
        }
        Ok(())
    }

    /// Relative L² distance `‖φ - ψ‖ / ‖ψ‖`.
    pub fn relative_distance(&self, reference: &BispinorField) -> f64 {
        let mut num = 0.0;
        for c in 0..2 {
            num += self.phi[c].iter().zip(&reference.phi[c]).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        }
        (num * self.grid.cell_volume() / reference.norm_sq()).sqrt()
    }
}

/// `∫ a† b d³x` for bispinors on `grid`.
pub fn inner(grid: &GridSpec, a: &Bispinor, b: &Bispinor) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for c in 0..2 {
        s += a[c].iter().zip(&b[c]).map(|(x, y)| x.conj() * y).sum::<C64>();
    }
    s * grid.cell_volume()
}
