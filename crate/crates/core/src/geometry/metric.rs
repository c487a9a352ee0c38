use nalgebra::Matrix5;

use super::{PotentialData, IDX_S, IDX_T};
use crate::Result;

pub type Mat5 = Matrix5<f64>;

/// Brinkmann metric and its inverse at one point, in `(x¹, x², x³, t, s)` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricBlock {
    pub g: Mat5,
    pub ginv: Mat5,
}

impl MetricBlock {
    pub fn from_potentials(u: f64, varpi: [f64; 3]) -> Self {
        let mut g = Mat5::zeros();
        let mut ginv = Mat5::zeros();
        let w2: f64 = varpi.iter().map(|v| v * v).sum();
        for i in 0..3 {
            g[(i, i)] = 1.0;
            ginv[(i, i)] = 1.0;
            g[(i, IDX_T)] = varpi[i];
            g[(IDX_T, i)] = varpi[i];
            ginv[(i, IDX_S)] = -varpi[i];
            ginv[(IDX_S, i)] = -varpi[i];
        }
        g[(IDX_T, IDX_T)] = -2.0 * u;
        g[(IDX_T, IDX_S)] = 1.0;
        g[(IDX_S, IDX_T)] = 1.0;
        ginv[(IDX_T, IDX_S)] = 1.0;
        ginv[(IDX_S, IDX_T)] = 1.0;
        ginv[(IDX_S, IDX_S)] = 2.0 * u + w2;
        MetricBlock { g, ginv }
    }

    /// `max |g·ginv − I|`.
    pub fn inverse_residual(&self) -> f64 {
        (self.g * self.ginv - Mat5::identity()).amax()
    }

    /// Numbers of positive and negative eigenvalues of `g`.
    pub fn signature(&self) -> (usize, usize) {
        let ev = self.g.symmetric_eigenvalues();
        (ev.iter().filter(|v| **v > 0.0).count(), ev.iter().filter(|v| **v < 0.0).count())
    }

    /// `√(−det g)`, computed numerically.
    pub fn sqrt_neg_det(&self) -> f64 {
        (-self.g.determinant()).sqrt()
    }
}

/// Metric at `(x, t)`; domain errors propagate from grid potentials.
pub fn brinkmann_metric(p: &PotentialData, x: [f64; 3], t: f64) -> Result<MetricBlock> {
    let pt = p.point(x, t)?;
    Ok(MetricBlock::from_potentials(pt.u, pt.varpi))
}
