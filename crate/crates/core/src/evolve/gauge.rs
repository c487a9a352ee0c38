use num_complex::Complex64 as C64;

use crate::fields::BispinorField;
use crate::geometry::{PotentialData, ScalarPreset};

/// `φ′ = e^{imϑ/ħ}φ`, `ϖ′ = ϖ + ∇ϑ`, `U′ = U − ∂_tϑ`, evaluated at the field's time.
pub fn gauge_transform(f: &BispinorField, p: &PotentialData, theta: &ScalarPreset) -> (BispinorField, PotentialData) {
    let mut out = f.clone();
    let k = f.physics.m / f.physics.hbar;
    let [p0, p1] = &mut out.phi;
    for (i, (a, b)) in p0.iter_mut().zip(p1.iter_mut()).enumerate() {
        let th = theta.jet(f.grid.position(i), f.time).v;
        let ph = C64::from_polar(1.0, k * th);
        *a *= ph;
        *b *= ph;
    }
    (out, PotentialData::Gauged(Box::new(p.clone()), theta.clone()))
}
