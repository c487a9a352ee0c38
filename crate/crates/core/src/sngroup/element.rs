use serde::{Deserialize, Serialize};

use crate::geometry::pauli::Mat2;
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// Spatial dimension; every exponent below is a formula in it.
pub const N_SPACE: f64 = 3.0;

/// Dilation exponents as functions of the spatial dimension `n ≠ 4`.
pub mod exponents {
    use super::N_SPACE;

    fn den() -> f64 {
        assert!(N_SPACE != 4.0, "exponents degenerate at n = 4");
        N_SPACE - 4.0
    }

    /// `g = ν^{g_exp}`.
    pub fn g_exp() -> f64 {
        -3.0 / den()
    }
    /// `d = ν^{d_exp}`.
    pub fn d_exp() -> f64 {
        (N_SPACE - 1.0) / den()
    }
    /// Field prefactor `ν^{−3(n+1)/(2(n−4))}`.
    pub fn prefactor() -> f64 {
        -3.0 * (N_SPACE + 1.0) / (2.0 * den())
    }
    /// Upper-block exponent `(n−1)/(2(n−4))`.
    pub fn spin_block() -> f64 {
        (N_SPACE - 1.0) / (2.0 * den())
    }
    /// Spatial weight `3/(n−4)` of the dilation generator.
    pub fn lie_space() -> f64 {
        3.0 / den()
    }
    /// Time weight `(n+2)/(n−4)` of the dilation generator.
    pub fn lie_time() -> f64 {
        (N_SPACE + 2.0) / den()
    }
    /// Density term `3(n+1)/(2(n−4))` of the infinitesimal action.
    pub fn lie_density() -> f64 {
        3.0 * (N_SPACE + 1.0) / (2.0 * den())
    }
}

/// Group element `(a, b, c, d, e, g, h)` with `ν = dg`, `d = ν⁻²`, `g = ν³`.
///
/// `a = w − i v·σ` is stored as the unit quaternion `(w, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SnGroupRecord", into = "SnGroupRecord")]
pub struct SnGroupElement {
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub d: f64,
    pub e: f64,
    pub g: f64,
    pub h: f64,
}

/// Serialized form; `nu` is optional and, when present, must equal `d g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnGroupRecord {
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub d: f64,
    pub e: f64,
    pub g: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl TryFrom<SnGroupRecord> for SnGroupElement {
    type Error = Error;
    fn try_from(r: SnGroupRecord) -> Result<Self> {
        let u = SnGroupElement { a: r.a, b: r.b, c: r.c, d: r.d, e: r.e, g: r.g, h: r.h };
        u.validate_with(r.nu)?;
        Ok(u)
    }
}

impl From<SnGroupElement> for SnGroupRecord {
    fn from(u: SnGroupElement) -> Self {
        SnGroupRecord { a: u.a, b: u.b, c: u.c, d: u.d, e: u.e, g: u.g, h: u.h, nu: None }
    }
}

/// Hamilton product `p q`.
pub fn quaternion_mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [w1, x1, y1, z1] = p;
    let [w2, x2, y2, z2] = q;
    [
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ]
}

/// Fix the sign of a quaternion: scalar part ≥ 0, ties broken by the first
/// nonzero component being positive.
fn canonical(q: [f64; 4]) -> [f64; 4] {
    let first = q.iter().find(|v| **v != 0.0).copied().unwrap_or(1.0);
    if first < 0.0 {
        q.map(|v| -v)
    } else {
        q
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn matvec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| dot(m[i], v))
}

fn matvec_t(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|j| m[j][i] * v[j]).sum())
}

impl SnGroupElement {
    pub fn identity() -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], [0.0; 3], [0.0; 3], 1.0, 0.0, 0.0)
    }

    /// Build from a (not necessarily unit) quaternion, `b`, `c`, `ν`, `e`, `h`;
    /// `d` and `g` follow from the dilation constraint.
    pub fn from_parts(a: [f64; 4], b: [f64; 3], c: [f64; 3], nu: f64, e: f64, h: f64) -> Self {
        let nrm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        SnGroupElement {
            a: canonical(a.map(|v| v / nrm)),
            b,
            c,
            d: nu.powf(exponents::d_exp()),
            e,
            g: nu.powf(exponents::g_exp()),
            h,
        }
    }

    pub fn boost(b: [f64; 3]) -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], b, [0.0; 3], 1.0, 0.0, 0.0)
    }

    pub fn translation(c: [f64; 3]) -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], [0.0; 3], c, 1.0, 0.0, 0.0)
    }

    pub fn time_translation(e: f64) -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], [0.0; 3], [0.0; 3], 1.0, e, 0.0)
    }

    pub fn vertical(h: f64) -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], [0.0; 3], [0.0; 3], 1.0, 0.0, h)
    }

    pub fn dilation(nu: f64) -> Self {
        Self::from_parts([1.0, 0.0, 0.0, 0.0], [0.0; 3], [0.0; 3], nu, 0.0, 0.0)
    }

    /// Rotation by `angle` about `axis`.
    pub fn rotation_about(axis: [f64; 3], angle: f64) -> Self {
        let n = dot(axis, axis).sqrt();
        let (s, c) = (0.5 * angle).sin_cos();
        Self::from_parts([c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n], [0.0; 3], [0.0; 3], 1.0, 0.0, 0.0)
    }

    pub fn nu(&self) -> f64 {
        self.d * self.g
    }

    pub fn is_bargmann(&self) -> bool {
        self.d == 1.0 && self.g == 1.0
    }

    /// Check the unit quaternion and the dilation relations; `nu` (if given)
    /// must equal `d g`. The error names every violated relation.
    pub fn validate_with(&self, nu: Option<f64>) -> Result<()> {
        let mut bad = Vec::new();
        let all = self.a.iter().chain(&self.b).chain(&self.c).chain([&self.d, &self.e, &self.g, &self.h]);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("group element has non-finite parameters".into()));
        }
        let qn = self.a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (qn - 1.0).abs() > 1e-10 {
            bad.push(format!("|a| = 1 (got {qn})"));
        }
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1.0);
        // without an explicit ν, take it from g = ν³ so that d g = ν is still a check
        let nu = nu.unwrap_or(self.g.cbrt());
        if !(nu > 0.0) {
            bad.push(format!("ν > 0 (got {nu})"));
        } else {
            let nu_dg = self.d * self.g;
            if !close(nu_dg, nu) {
                bad.push(format!("d g = ν (d g = {nu_dg}, ν = {nu})"));
            }
            if !close(self.d, nu.powf(exponents::d_exp())) {
                bad.push(format!("d = ν⁻² (d = {}, ν = {nu})", self.d));
            }
            if !close(self.g, nu.powf(exponents::g_exp())) {
                bad.push(format!("g = ν³ (g = {}, ν = {nu})", self.g));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!("group element violates {}", bad.join("; "))))
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(None)
    }

    /// `λ = ν⁻⁶`; the dilation constraint reads `λ^{1/2} ν³ = 1`.
    pub fn lambda(&self) -> f64 {
        self.nu().powi(-6)
    }

    /// The SO(3) matrix `A` of `a`.
    pub fn rotation(&self) -> [[f64; 3]; 3] {
        let [w, x, y, z] = self.a;
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    /// `a = w − i v·σ` as a 2×2 matrix.
    pub fn su2(&self) -> Mat2 {
        let [w, x, y, z] = self.a;
        Mat2::new(C64::new(w, -z), C64::new(-y, -x), C64::new(y, -x), C64::new(w, z))
    }

    pub fn is_pure_rotation_free(&self) -> bool {
        self.a[1] == 0.0 && self.a[2] == 0.0 && self.a[3] == 0.0
    }

    /// `(x̂, t̂, ŝ)`.
    pub fn act(&self, x: [f64; 3], t: f64, s: f64) -> ([f64; 3], f64, f64) {
        let ax = matvec(&self.rotation(), x);
        let xh = std::array::from_fn(|i| (ax[i] + self.b[i] * t + self.c[i]) / self.g);
        let th = (self.d * t + self.e) / self.g;
        let sh = (s - dot(self.b, ax) - 0.5 * dot(self.b, self.b) * t + self.h) / self.nu();
        (xh, th, sh)
    }

    /// Inverse action, in the closed form `x = A⁻¹[g x̂ − T b − c]`, `T = (g t̂ − e)/d`.
    pub fn inverse_act(&self, x: [f64; 3], t: f64, s: f64) -> ([f64; 3], f64, f64) {
        let (d, g, e) = (self.d, self.g, self.e);
        let tt = (g * t - e) / d;
        let v: [f64; 3] = std::array::from_fn(|i| g * x[i] - tt * self.b[i] - self.c[i]);
        let xh = matvec_t(&self.rotation(), v);
        let b2 = dot(self.b, self.b);
        let sh = self.nu() * s + g * dot(self.b, x) - g / (2.0 * d) * b2 * t + e / (2.0 * d) * b2
            - dot(self.b, self.c)
            - self.h;
        (xh, tt, sh)
    }

    /// `self ∘ other`: acts as `other` first, then `self`.
    pub fn compose(&self, o: &SnGroupElement) -> SnGroupElement {
        let a1 = self.rotation();
        let a1b2 = matvec(&a1, o.b);
        let a1c2 = matvec(&a1, o.c);
        let b: [f64; 3] = std::array::from_fn(|i| a1b2[i] + o.d * self.b[i]);
        let c: [f64; 3] = std::array::from_fn(|i| a1c2[i] + o.e * self.b[i] + o.g * self.c[i]);
        let h = o.h + o.nu() * self.h - o.d * dot(self.b, a1c2) - 0.5 * o.d * o.e * dot(self.b, self.b);
        SnGroupElement {
            a: canonical(quaternion_mul(self.a, o.a)),
            b,
            c,
            d: self.d * o.d,
            e: self.d * o.e + self.e * o.g,
            g: self.g * o.g,
            h,
        }
    }

    pub fn inverse(&self) -> SnGroupElement {
        let (d, e, g) = (self.d, self.e, self.g);
        let rot = self.rotation();
        let aib = matvec_t(&rot, self.b);
        let aic = matvec_t(&rot, self.c);
        let [w, x, y, z] = self.a;
        SnGroupElement {
            a: canonical([w, -x, -y, -z]),
            b: aib.map(|v| -v / d),
            c: std::array::from_fn(|i| e / (d * g) * aib[i] - aic[i] / g),
            d: 1.0 / d,
            e: -e / (d * g),
            g: 1.0 / g,
            h: (e / (2.0 * d) * dot(self.b, self.b) - dot(self.b, self.c) - self.h) / self.nu(),
        }
    }

    /// Largest parameter difference, treating `a` and `−a` as equal.
    pub fn max_param_diff(&self, o: &SnGroupElement) -> f64 {
        let qa = (0..4).map(|i| (self.a[i] - o.a[i]).abs()).fold(0.0, f64::max);
        let qb = (0..4).map(|i| (self.a[i] + o.a[i]).abs()).fold(0.0, f64::max);
        let mut m = qa.min(qb);
        for i in 0..3 {
            m = m.max((self.b[i] - o.b[i]).abs()).max((self.c[i] - o.c[i]).abs());
        }
        for (x, y) in [(self.d, o.d), (self.e, o.e), (self.g, o.g), (self.h, o.h)] {
            m = m.max((x - y).abs());
        }
        m
    }
}
