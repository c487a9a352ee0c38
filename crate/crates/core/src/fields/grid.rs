use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Cubic periodic grid with box-centred nodes `x_j = -L/2 + j·dx`.
///
/// Flat storage index is `i1 + n·(i2 + n·i3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    /// Apply the 2/3 rule to the kinetic propagator of the split-step scheme.
    #[serde(default)]
    pub dealias: bool,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        let g = GridSpec { n, length, dealias: false };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || self.n % 2 != 0 {
            return Err(Error::Validation(format!("grid n = {} must be even and >= 8", self.n)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Validation(format!("grid length {} must be positive", self.length)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        i1 + self.n * (i2 + self.n * i3)
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.unravel(idx);
        [self.coord(a), self.coord(b), self.coord(c)]
    }

    /// Signed mode number of FFT bin `j`, in `{-N/2, ..., N/2-1}`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI / self.length * self.mode(j) as f64
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    /// True if `x` lies in the half-open box `[-L/2, L/2)³` (with a small tolerance).
    pub fn contains(&self, x: [f64; 3]) -> bool {
        let h = 0.5 * self.length;
        let tol = 1e-12 * self.length;
        x.iter().all(|&c| c >= -h - tol && c <= h + tol)
    }

    /// Wrap a coordinate into the fundamental box.
    pub fn wrap(&self, c: f64) -> f64 {
        let h = 0.5 * self.length;
        (c + h).rem_euclid(self.length) - h
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.length == other.length
    }

    pub fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "({}, L={}) vs ({}, L={})",
                self.n, self.length, other.n, other.length
            )))
        }
    }

    /// Equal-weight quadrature.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.cell_volume()
    }

    /// Sample a function of position on the nodes.
    pub fn sample<T, F: Fn([f64; 3]) -> T>(&self, f: F) -> Vec<T> {
        (0..self.len()).map(|i| f(self.position(i))).collect()
    }

    /// Fraction of `weights` (e.g. |φ|²) sitting in the outer 10% shell of the box.
    pub fn outer_shell_fraction(&self, weights: &[f64]) -> f64 {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let inner = 0.4 * self.length;
        let outer: f64 = weights
            .iter()
            .enumerate()
            .filter(|(i, _)| self.position(*i).iter().any(|c| c.abs() > inner))
            .map(|(_, w)| w)
            .sum();
        outer / total
    }
}
