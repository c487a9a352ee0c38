use num_complex::Complex64 as C64;

use super::{spin_density, BispinorField, Spectral};

/// Moment integrals of a bispinor field, not divided by the norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Observables {
    pub norm_sq: f64,
    /// `∫ x φ†φ`.
    pub x: [f64; 3],
    /// `∫ φ†(-iħ∇)φ`.
    pub p: [f64; 3],
    /// `∫ x·Re φ†(-iħ∇)φ`.
    pub x_dot_p: f64,
    /// `(ħ/2) ∫ φ†σφ`.
    pub spin: [f64; 3],
    /// More than 1e-6 of the norm sits in the outer 10% shell of the box.
    pub locality_warning: bool,
}

pub fn observables(f: &BispinorField) -> Observables {
    let g = &f.grid;
    let sp = Spectral::get(g);
    let hbar = f.physics.hbar;
    let dv = g.cell_volume();
    let rho = f.density();
    let grads = [sp.gradient(&f.phi[0]), sp.gradient(&f.phi[1])];
    let mut o = Observables {
        norm_sq: 0.0,
        x: [0.0; 3],
        p: [0.0; 3],
        x_dot_p: 0.0,
        spin: [0.0; 3],
        locality_warning: g.outer_shell_fraction(&rho) > 1e-6,
    };
    for i in 0..g.len() {
        let x = g.position(i);
        o.norm_sq += rho[i];
        let mut pd = [0.0; 3];
        for a in 0..3 {
            let mut v = C64::new(0.0, 0.0);
            for c in 0..2 {
                v += f.phi[c][i].conj() * grads[c][a][i];
            }
            // -iħ φ†∂φ, real part
            pd[a] = hbar * v.im;
            o.x[a] += x[a] * rho[i];
            o.p[a] += pd[a];
        }
        o.x_dot_p += x[0] * pd[0] + x[1] * pd[1] + x[2] * pd[2];
        let s = spin_density(f.phi[0][i], f.phi[1][i]);
        for a in 0..3 {
            o.spin[a] += 0.5 * hbar * s[a];
        }
    }
    o.norm_sq *= dv;
    o.x_dot_p *= dv;
    for a in 0..3 {
        o.x[a] *= dv;
        o.p[a] *= dv;
        o.spin[a] *= dv;
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use crate::Physics;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gaussian_at_rest_spin_up() {
        let g = GridSpec::new(32, 16.0).unwrap();
        let f = BispinorField::gaussian(g, Physics::default(), [0.0; 3], 1.0, [0.0; 3], [c(1.0, 0.0), c(0.0, 0.0)]);
        let o = observables(&f);
        assert!((o.norm_sq - 1.0).abs() < 1e-10);
        assert!(o.p.iter().all(|v| v.abs() < 1e-10));
        assert!((o.spin[2] - 0.5).abs() < 1e-10 && o.spin[0].abs() < 1e-10);
        assert!(!o.locality_warning);
    }

    #[test]
    fn modulated_gaussian_momentum() {
        let g = GridSpec::new(32, 16.0).unwrap();
        let k0 = 2.0 * std::f64::consts::PI / 16.0 * 3.0;
        let phys = Physics { hbar: 0.7, ..Physics::default() };
        let mut f = BispinorField::gaussian(g, phys, [0.0; 3], 1.0, [k0, 0.0, 0.0], [c(0.0, 0.0), c(1.0, 0.0)]);
        f.scale(c(2.0, 0.0));
        let o = observables(&f);
        assert!((o.p[0] - 0.7 * k0 * o.norm_sq).abs() < 1e-10);
        assert!((o.spin[2] + 0.5 * 0.7 * o.norm_sq).abs() < 1e-10);
    }
}
