//! FFT plumbing and spectral calculus on [`GridSpec`] grids.
//!
//! Odd derivatives drop the Nyquist mode, the Laplacian keeps it as `-k²`.
//! Off-grid evaluation uses the trigonometric interpolant with the Nyquist
//! mode folded into a cosine so that real data interpolate to real values.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::GridSpec;

/// Apply `f` to every line of a cubic `n³` array along `axis`.
///
/// `f` receives a buffer of whole lines laid out contiguously (length a
/// multiple of `n`); the buffer is written back afterwards.
pub fn map_lines<F>(data: &mut [C64], n: usize, axis: usize, f: F)
where
    F: Fn(&mut [C64]) + Sync,
{
    let plane = n * n;
    assert_eq!(data.len(), plane * n);
    match axis {
        0 => data.par_chunks_mut(plane).for_each(|p| f(p)),
        1 => data.par_chunks_mut(plane).for_each(|p| {
            let mut buf = vec![C64::new(0.0, 0.0); plane];
            for j in 0..n {
                for i in 0..n {
                    buf[i * n + j] = p[i + n * j];
                }
            }
            f(&mut buf);
            for j in 0..n {
                for i in 0..n {
                    p[i + n * j] = buf[i * n + j];
                }
            }
        }),
        2 => {
            let bufs: Vec<Vec<C64>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let mut buf = vec![C64::new(0.0, 0.0); plane];
                    for k in 0..n {
                        for i in 0..n {
                            buf[i * n + k] = data[i + n * (j + n * k)];
                        }
                    }
                    f(&mut buf);
                    buf
                })
                .collect();
            for (j, buf) in bufs.iter().enumerate() {
                for k in 0..n {
                    for i in 0..n {
                        data[i + n * (j + n * k)] = buf[i * n + k];
                    }
                }
            }
        }
        _ => panic!("axis {axis} out of range"),
    }
}

/// Separable 3-D complex FFT on an `n³` cube.
pub struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn run(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [C64]) {
        for axis in 0..3 {
            map_lines(data, self.n, axis, |buf| {
                let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(buf, &mut scratch);
            });
        }
    }

    /// Unnormalised forward transform (`e^{-ikx}` kernel).
    pub fn forward(&self, data: &mut [C64]) {
        self.run(&self.fwd, data);
    }

    /// Inverse transform including the `1/n³` factor.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(&self.inv, data);
        let s = 1.0 / (self.n * self.n * self.n) as f64;
        data.par_iter_mut().for_each(|v| *v *= s);
    }

    /// Forward transform along a single axis (unnormalised).
    pub fn forward_axis(&self, data: &mut [C64], axis: usize) {
        let plan = &self.fwd;
        map_lines(data, self.n, axis, |buf| {
            let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(buf, &mut scratch);
        });
    }
}

/// Spectral operators bound to one grid. Obtain shared instances with [`Spectral::get`].
pub struct Spectral {
    pub grid: GridSpec,
    fft: Fft3,
    k: Vec<f64>,
    kd: Vec<f64>,
}

type Cache = Mutex<HashMap<(usize, u64), Arc<Spectral>>>;

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n;
        let k: Vec<f64> = (0..n).map(|j| grid.wavenumber(j)).collect();
        let kd = (0..n).map(|j| if grid.is_nyquist(j) { 0.0 } else { k[j] }).collect();
        Spectral { grid, fft: Fft3::new(n), k, kd }
    }

    /// Shared, cached instance for `grid`.
    pub fn get(grid: &GridSpec) -> Arc<Spectral> {
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (grid.n, grid.length.to_bits());
        let mut map = cache.lock().expect("spectral cache poisoned");
        map.entry(key).or_insert_with(|| Arc::new(Spectral::new(*grid))).clone()
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Wavevector of flat spectral index `idx`.
    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.grid.unravel(idx);
        [self.k[a], self.k[b], self.k[c]]
    }

    /// Wavevector used for first derivatives (Nyquist components zeroed).
    pub fn kvec_deriv(&self, idx: usize) -> [f64; 3] {
        let [a, b, c] = self.grid.unravel(idx);
        [self.kd[a], self.kd[b], self.kd[c]]
    }

    pub fn ksq(&self, idx: usize) -> f64 {
        let k = self.kvec(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Largest |k_j| retained by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> f64 {
        (self.grid.n as f64 / 3.0) * 2.0 * std::f64::consts::PI / self.grid.length
    }

    pub fn forward(&self, f: &[C64]) -> Vec<C64> {
        let mut d = f.to_vec();
        self.fft.forward(&mut d);
        d
    }

    pub fn inverse(&self, mut fh: Vec<C64>) -> Vec<C64> {
        self.fft.inverse(&mut fh);
        fh
    }

    /// Multiply in wavenumber space by `m(k)`.
    pub fn apply_multiplier<M>(&self, f: &[C64], m: M) -> Vec<C64>
    where
        M: Fn(usize) -> C64 + Sync,
    {
        let mut fh = self.forward(f);
        fh.par_iter_mut().enumerate().for_each(|(i, v)| *v *= m(i));
        self.inverse(fh)
    }

    pub fn derivative(&self, f: &[C64], axis: usize) -> Vec<C64> {
        self.apply_multiplier(f, |i| C64::new(0.0, self.kvec_deriv(i)[axis]))
    }

    pub fn gradient(&self, f: &[C64]) -> [Vec<C64>; 3] {
        let fh = self.forward(f);
        std::array::from_fn(|a| {
            let g: Vec<C64> = fh
                .par_iter()
                .enumerate()
                .map(|(i, v)| v * C64::new(0.0, self.kvec_deriv(i)[a]))
                .collect();
            self.inverse(g)
        })
    }

    pub fn laplacian(&self, f: &[C64]) -> Vec<C64> {
        self.apply_multiplier(f, |i| C64::new(-self.ksq(i), 0.0))
    }

    pub fn derivative_real(&self, f: &[f64], axis: usize) -> Vec<f64> {
        re(&self.derivative(&to_complex(f), axis))
    }

    pub fn gradient_real(&self, f: &[f64]) -> [Vec<f64>; 3] {
        let g = self.gradient(&to_complex(f));
        std::array::from_fn(|a| re(&g[a]))
    }

    pub fn laplacian_real(&self, f: &[f64]) -> Vec<f64> {
        re(&self.laplacian(&to_complex(f)))
    }

    pub fn divergence_real(&self, v: [&[f64]; 3]) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for (a, comp) in v.iter().enumerate() {
            for (o, d) in out.iter_mut().zip(self.derivative_real(comp, a)) {
                *o += d;
            }
        }
        out
    }

    pub fn curl_real(&self, v: [&[f64]; 3]) -> [Vec<f64>; 3] {
        let d = |comp: usize, axis: usize| self.derivative_real(v[comp], axis);
        let c0: Vec<f64> = d(2, 1).iter().zip(d(1, 2)).map(|(a, b)| a - b).collect();
        let c1: Vec<f64> = d(0, 2).iter().zip(d(2, 0)).map(|(a, b)| a - b).collect();
        let c2: Vec<f64> = d(1, 0).iter().zip(d(0, 1)).map(|(a, b)| a - b).collect();
        [c0, c1, c2]
    }

    /// Trigonometric interpolant of one or more component arrays.
    pub fn interpolant(&self, comps: &[&[C64]]) -> Interpolant {
        let s = 1.0 / self.grid.len() as f64;
        let coeffs = comps
            .iter()
            .map(|c| {
                let mut h = self.forward(c);
                h.iter_mut().for_each(|v| *v *= s);
                h
            })
            .collect();
        Interpolant { grid: self.grid, k: self.k.clone(), coeffs }
    }

    /// Evaluate `f` at the per-axis affine preimages `X_a = scale_a x_a + shift_a`
    /// of every node. Exact for band-limited data; periodic wrap is implicit.
    pub fn resample_separable(&self, f: &[C64], scale: [f64; 3], shift: [f64; 3]) -> Vec<C64> {
        let n = self.grid.n;
        let mut d = f.to_vec();
        for axis in 0..3 {
            self.fft.forward_axis(&mut d, axis);
            let mats: Vec<C64> = (0..n)
                .flat_map(|i| {
                    let x = scale[axis] * self.grid.coord(i) + shift[axis];
                    basis_row(&self.grid, &self.k, x)
                })
                .collect();
            map_lines(&mut d, n, axis, |buf| {
                let mut out = vec![C64::new(0.0, 0.0); n];
                for line in buf.chunks_exact_mut(n) {
                    for (i, o) in out.iter_mut().enumerate() {
                        let row = &mats[i * n..(i + 1) * n];
                        *o = row.iter().zip(line.iter()).map(|(e, c)| e * c).sum::<C64>()
                            / n as f64;
                    }
                    line.copy_from_slice(&out);
                }
            });
        }
        d
    }
}

/// Basis values `e^{ik_j (x - x0)}` (Nyquist as cosine) for one axis.
fn basis_row(grid: &GridSpec, k: &[f64], x: f64) -> Vec<C64> {
    let x0 = -0.5 * grid.length;
    (0..grid.n)
        .map(|j| {
            let ph = k[j] * (x - x0);
            if grid.is_nyquist(j) {
                C64::new(ph.cos(), 0.0)
            } else {
                C64::from_polar(1.0, ph)
            }
        })
        .collect()
}

fn basis_row_deriv(grid: &GridSpec, k: &[f64], x: f64) -> Vec<C64> {
    let x0 = -0.5 * grid.length;
    (0..grid.n)
        .map(|j| {
            let ph = k[j] * (x - x0);
            if grid.is_nyquist(j) {
                C64::new(-k[j] * ph.sin(), 0.0)
            } else {
                C64::new(0.0, k[j]) * C64::from_polar(1.0, ph)
            }
        })
        .collect()
}

/// Band-limited interpolant evaluable anywhere (periodically).
#[derive(Clone, Debug)]
pub struct Interpolant {
    grid: GridSpec,
    k: Vec<f64>,
    coeffs: Vec<Vec<C64>>,
}

impl Interpolant {
    pub fn components(&self) -> usize {
        self.coeffs.len()
    }

    fn contract(&self, e: [&[C64]; 3]) -> Vec<C64> {
        let n = self.grid.n;
        self.coeffs
            .iter()
            .map(|c| {
                let mut total = C64::new(0.0, 0.0);
                for k3 in 0..n {
                    let mut s2 = C64::new(0.0, 0.0);
                    for k2 in 0..n {
                        let base = n * (k2 + n * k3);
                        let line = &c[base..base + n];
                        let s1: C64 = line.iter().zip(e[0]).map(|(a, b)| a * b).sum();
                        s2 += s1 * e[1][k2];
                    }
                    total += s2 * e[2][k3];
                }
                total
            })
            .collect()
    }

    /// Values of all components at `x`.
    pub fn eval(&self, x: [f64; 3]) -> Vec<C64> {
        let e: [Vec<C64>; 3] = std::array::from_fn(|a| basis_row(&self.grid, &self.k, x[a]));
        self.contract([&e[0], &e[1], &e[2]])
    }

    /// Partial derivative along `axis` of all components at `x`.
    pub fn eval_derivative(&self, x: [f64; 3], axis: usize) -> Vec<C64> {
        let e: [Vec<C64>; 3] = std::array::from_fn(|a| {
            if a == axis {
                basis_row_deriv(&self.grid, &self.k, x[a])
            } else {
                basis_row(&self.grid, &self.k, x[a])
            }
        });
        self.contract([&e[0], &e[1], &e[2]])
    }

    /// Evaluate at many points in parallel; result is `[point][component]`.
    pub fn eval_many(&self, points: &[[f64; 3]]) -> Vec<Vec<C64>> {
        points.par_iter().map(|&p| self.eval(p)).collect()
    }
}

pub(crate) fn to_complex(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub(crate) fn re(f: &[C64]) -> Vec<f64> {
    f.iter().map(|v| v.re).collect()
}
