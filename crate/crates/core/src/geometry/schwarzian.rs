use crate::{Error, Result};

/// `S(φ) = φ'''/φ' − (3/2)(φ''/φ')²` from the first three derivatives.
pub fn schwarzian_from_derivatives(d1: f64, d2: f64, d3: f64) -> Result<f64> {
    if !(d1 > 0.0) {
        return Err(Error::Domain(format!("time map must be increasing, φ' = {d1}")));
    }
    Ok(d3 / d1 - 1.5 * (d2 / d1).powi(2))
}

/// Schwarzian derivative of a sampled time map at `t`, from a centred
/// five-point stencil of step `h`.
pub fn schwarzian<F: Fn(f64) -> f64>(phi: F, t: f64, h: f64) -> Result<f64> {
    let f: [f64; 5] = std::array::from_fn(|k| phi(t + (k as f64 - 2.0) * h));
    let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
    let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
    let d3 = (-f[0] + 2.0 * f[1] - 2.0 * f[3] + f[4]) / (2.0 * h * h * h);
    schwarzian_from_derivatives(d1, d2, d3)
}
