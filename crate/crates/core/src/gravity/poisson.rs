use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::fields::{Fft3, GridSpec, Spectral};
use crate::{Error, Result};

/// Mean of `1/r` over a unit cube centred on the origin: `3 ln(2+√3) − π/2`.
pub const CELL_AVERAGE_INV_R: f64 = 2.380_077_363_979_553;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoissonKind {
    Periodic,
    #[default]
    Isolated,
}

impl PoissonKind {
    pub fn name(&self) -> &'static str {
        match self {
            PoissonKind::Periodic => "poisson_periodic",
            PoissonKind::Isolated => "poisson_isolated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub u: Vec<f64>,
    pub solver: PoissonKind,
    /// Mean density projected out (periodic solver only).
    pub background: f64,
    /// More than 1e-6 of the mass sits in the outer 10% shell.
    pub locality_warning: bool,
}

/// `Û = −4πG ρ̂/|k|²`, zero mode of `U` set to 0 (the mean of ρ is projected out).
pub fn poisson_periodic(grid: &GridSpec, rho: &[f64], g_newton: f64) -> Result<PoissonSolution> {
    check(grid, rho)?;
    let sp = Spectral::get(grid);
    let data: Vec<C64> = rho.iter().map(|&v| C64::new(v, 0.0)).collect();
    let u = sp.apply_multiplier(&data, |i| {
        let k2 = sp.ksq(i);
        if k2 == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(-4.0 * PI * g_newton / k2, 0.0)
        }
    });
    Ok(PoissonSolution {
        u: u.iter().map(|v| v.re).collect(),
        solver: PoissonKind::Periodic,
        background: rho.iter().sum::<f64>() / rho.len() as f64,
        locality_warning: false,
    })
}

fn check(grid: &GridSpec, rho: &[f64]) -> Result<()> {
    if rho.len() != grid.len() {
        return Err(Error::GridMismatch(format!("density has {} nodes, grid {}", rho.len(), grid.len())));
    }
    Ok(())
}

/// Discretisation of the free-space Green's function used by [`poisson_isolated_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeSpaceKernel {
    /// `−dV/r` on nodes, singular cell replaced by the cell average of `1/r`.
    /// Second order in `dx`.
    CellAverage,
    /// Truncated Green's function `(1 − cos kR)/k²` with `R` the box diagonal,
    /// transformed on a threefold grid; spectrally accurate for smooth densities.
    #[default]
    Truncated,
}

struct KernelPlan {
    fft: Fft3,
    /// Transform of the convolution weights on the doubled grid.
    khat: Vec<C64>,
}

type KernelCache = Mutex<HashMap<(usize, u64, FreeSpaceKernel), Arc<KernelPlan>>>;

/// Signed offset represented by index `j` of the doubled grid.
fn signed(j: usize, n: usize) -> i64 {
    if j <= n {
        j as i64
    } else {
        j as i64 - 2 * n as i64
    }
}

/// Convolution weights `w(o)` with `U = Σ w(x−y) ρ(y)` for `G = 1`, on the doubled grid.
fn weights(grid: &GridSpec, kind: FreeSpaceKernel) -> Vec<C64> {
    let n = grid.n;
    let n2 = 2 * n;
    let dx = grid.dx();
    match kind {
        FreeSpaceKernel::CellAverage => {
            let dv = grid.cell_volume();
            (0..n2 * n2 * n2)
                .into_par_iter()
                .map(|idx| {
                    let o = [idx % n2, (idx / n2) % n2, idx / (n2 * n2)].map(|j| signed(j, n) as f64 * dx);
                    let r = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]).sqrt();
                    let inv_r = if r == 0.0 { CELL_AVERAGE_INV_R / dx } else { 1.0 / r };
                    C64::new(-inv_r * dv, 0.0)
                })
                .collect()
        }
        FreeSpaceKernel::Truncated => {
            // the period 3N·dx exceeds box edge + diagonal, so the truncated kernel does not alias
            let m = 3 * n;
            let r_cut = 3f64.sqrt() * n as f64 * dx;
            let dk = 2.0 * PI / (m as f64 * dx);
            let wn = |j: usize| if j < m / 2 { j as f64 } else { j as f64 - m as f64 } * dk;
            let mut g: Vec<C64> = (0..m * m * m)
                .into_par_iter()
                .map(|idx| {
                    let k = [idx % m, (idx / m) % m, idx / (m * m)].map(wn);
                    let k = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
                    let v = if k == 0.0 { 0.5 * r_cut * r_cut } else { 2.0 * (0.5 * k * r_cut).sin().powi(2) / (k * k) };
                    C64::new(v, 0.0)
                })
                .collect();
            Fft3::new(m).inverse(&mut g);
            (0..n2 * n2 * n2)
                .into_par_iter()
                .map(|idx| {
                    let j = [idx % n2, (idx / n2) % n2, idx / (n2 * n2)];
                    if j.contains(&n) {
                        return C64::new(0.0, 0.0);
                    }
                    let w = j.map(|v| signed(v, n).rem_euclid(m as i64) as usize);
                    C64::new(-4.0 * PI * g[w[0] + m * (w[1] + m * w[2])].re, 0.0)
                })
                .collect()
        }
    }
}

fn kernel(grid: &GridSpec, kind: FreeSpaceKernel) -> Arc<KernelPlan> {
    static CACHE: OnceLock<KernelCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (grid.n, grid.length.to_bits(), kind);
    if let Some(k) = cache.lock().expect("kernel cache poisoned").get(&key) {
        return k.clone();
    }
    let mut w = weights(grid, kind);
    let fft = Fft3::new(2 * grid.n);
    fft.forward(&mut w);
    let plan = Arc::new(KernelPlan { fft, khat: w });
    cache.lock().expect("kernel cache poisoned").insert(key, plan.clone());
    plan
}

/// `U = −G ∫ρ(x')/|x−x'| d³x'` by zero-padded convolution on the doubled grid,
/// using the truncated-kernel weights.
pub fn poisson_isolated(grid: &GridSpec, rho: &[f64], g_newton: f64) -> Result<PoissonSolution> {
    poisson_isolated_with(grid, rho, g_newton, FreeSpaceKernel::Truncated)
}

/// Isolated solve with an explicit kernel choice.
pub fn poisson_isolated_with(grid: &GridSpec, rho: &[f64], g_newton: f64, kind: FreeSpaceKernel) -> Result<PoissonSolution> {
    check(grid, rho)?;
    let n = grid.n;
    let n2 = 2 * n;
    let kern = kernel(grid, kind);
    let mut pad = vec![C64::new(0.0, 0.0); n2 * n2 * n2];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                pad[i + n2 * (j + n2 * k)] = C64::new(rho[grid.index(i, j, k)], 0.0);
            }
        }
    }
    kern.fft.forward(&mut pad);
    pad.par_iter_mut().zip(kern.khat.par_iter()).for_each(|(p, k)| *p *= k);
    kern.fft.inverse(&mut pad);
    let mut u = vec![0.0; grid.len()];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                u[grid.index(i, j, k)] = g_newton * pad[i + n2 * (j + n2 * k)].re;
            }
        }
    }
    let abs: Vec<f64> = rho.iter().map(|v| v.abs()).collect();
    Ok(PoissonSolution {
        u,
        solver: PoissonKind::Isolated,
        background: 0.0,
        locality_warning: grid.outer_shell_fraction(&abs) > 1e-6,
    })
}

/// Solver selection for runs.
#[derive(Clone, Copy, Debug)]
pub struct PoissonSolver {
    pub kind: PoissonKind,
    pub g_newton: f64,
}

impl PoissonSolver {
    pub fn solve(&self, grid: &GridSpec, rho: &[f64]) -> Result<PoissonSolution> {
        match self.kind {
            PoissonKind::Periodic => poisson_periodic(grid, rho, self.g_newton),
            PoissonKind::Isolated => poisson_isolated(grid, rho, self.g_newton),
        }
    }
}
