//! Newton potential `U` and Coriolis covector `ϖ`, on a grid or analytic.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::fields::{Interpolant, Spectral};
use crate::fields::GridSpec;
use crate::sngroup::SnGroupElement;
use crate::{Error, Result};

/// First derivatives of the potentials at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PotentialDerivs {
    pub grad_u: [f64; 3],
    pub dt_u: f64,
    /// `jac_varpi[i][j] = ∂_i ϖ_j`.
    pub jac_varpi: [[f64; 3]; 3],
    pub dt_varpi: [f64; 3],
}

/// Potentials (and optionally their first derivatives) at one spacetime point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PotentialPoint {
    pub u: f64,
    pub varpi: [f64; 3],
    pub derivs: Option<PotentialDerivs>,
}

impl PotentialPoint {
    pub fn new(u: f64, varpi: [f64; 3]) -> Self {
        PotentialPoint { u, varpi, derivs: None }
    }

    pub fn with_derivs(u: f64, varpi: [f64; 3], d: PotentialDerivs) -> Self {
        PotentialPoint { u, varpi, derivs: Some(d) }
    }

    pub fn derivs(&self) -> Result<&PotentialDerivs> {
        self.derivs
            .as_ref()
            .ok_or_else(|| Error::Precondition("first derivatives of U and ϖ are required".into()))
    }

    /// Coriolis curvature `Ω_ij = ∂_iϖ_j - ∂_jϖ_i`.
    pub fn omega(&self) -> Result<[[f64; 3]; 3]> {
        let j = self.derivs()?.jac_varpi;
        Ok(std::array::from_fn(|a| std::array::from_fn(|b| j[a][b] - j[b][a])))
    }
}

/// Axial vector `(Ω₂₃, Ω₃₁, Ω₁₂) = ∇×ϖ` of an antisymmetric Ω.
pub fn omega_axial(o: &[[f64; 3]; 3]) -> [f64; 3] {
    [o[1][2], o[2][0], o[0][1]]
}

fn default_phase() -> f64 {
    0.0
}

/// `amplitude · sin(k·x − ω t + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigMode {
    pub amplitude: f64,
    pub k: [f64; 3],
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_phase")]
    pub phase: f64,
}

/// Vector-valued `amplitude⃗ · sin(k·x − ω t + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VecTrigMode {
    pub amplitude: [f64; 3],
    pub k: [f64; 3],
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_phase")]
    pub phase: f64,
}

/// Scalar preset `offset + gradient·x + Σ modes`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarPreset {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub gradient: [f64; 3],
    #[serde(default)]
    pub modes: Vec<TrigMode>,
}

/// Value and derivatives of a scalar up to the orders used by the gauge machinery.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarJet {
    pub v: f64,
    pub grad: [f64; 3],
    pub dt: f64,
    pub hess: [[f64; 3]; 3],
    pub grad_dt: [f64; 3],
    pub dt2: f64,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl ScalarPreset {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(v: f64) -> Self {
        ScalarPreset { offset: v, ..Self::default() }
    }

    pub fn linear(gradient: [f64; 3]) -> Self {
        ScalarPreset { gradient, ..Self::default() }
    }

    /// `depth·(1 − cos(k x_axis))`, a band-limited stand-in for a harmonic trap.
    pub fn cosine_well(depth: f64, k: f64, axis: usize) -> Self {
        let mut kv = [0.0; 3];
        kv[axis] = k;
        ScalarPreset {
            offset: depth,
            gradient: [0.0; 3],
            modes: vec![TrigMode { amplitude: depth, k: kv, omega: 0.0, phase: -0.5 * PI }],
        }
    }

    pub fn is_static(&self) -> bool {
        self.modes.iter().all(|m| m.omega == 0.0)
    }

    pub fn jet(&self, x: [f64; 3], t: f64) -> ScalarJet {
        let mut j = ScalarJet { v: self.offset + dot(self.gradient, x), grad: self.gradient, ..Default::default() };
        for m in &self.modes {
            let th = dot(m.k, x) - m.omega * t + m.phase;
            let (s, c) = th.sin_cos();
            let a = m.amplitude;
            j.v += a * s;
            j.dt += -a * m.omega * c;
            j.dt2 += -a * m.omega * m.omega * s;
            for i in 0..3 {
                j.grad[i] += a * m.k[i] * c;
                j.grad_dt[i] += a * m.omega * m.k[i] * s;
                for l in 0..3 {
                    j.hess[i][l] += -a * m.k[i] * m.k[l] * s;
                }
            }
        }
        j
    }
}

/// Coordinate chart of the Taub-NUT covector: `Minus` uses `z + r` (singular
/// on the negative z half-axis), `Plus` uses `z − r` (positive half-axis).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Minus,
    Plus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoriolisPreset {
    #[default]
    Zero,
    Constant { value: [f64; 3] },
    /// `ϖ = ½Ω₀(−x², x¹, 0)`, curl `(0, 0, Ω₀)`.
    Uniform { omega0: f64 },
    /// `ϖ = 2a (y, −x, 0) / (r (z ± r))`, curl of magnitude `2a/r²`.
    Taubnut {
        a: f64,
        chart: Chart,
        #[serde(default)]
        r_cut: Option<f64>,
    },
    /// Pure gauge `ϖ = −∇ϑ`.
    Gradient { theta: ScalarPreset },
    Trig { modes: Vec<VecTrigMode> },
}

impl CoriolisPreset {
    pub fn is_zero(&self) -> bool {
        match self {
            CoriolisPreset::Zero => true,
            CoriolisPreset::Constant { value } => value.iter().all(|v| *v == 0.0),
            CoriolisPreset::Uniform { omega0 } => *omega0 == 0.0,
            CoriolisPreset::Taubnut { a, .. } => *a == 0.0,
            CoriolisPreset::Gradient { theta } => theta.gradient == [0.0; 3] && theta.modes.is_empty(),
            CoriolisPreset::Trig { modes } => modes.is_empty(),
        }
    }

    pub fn is_static(&self) -> bool {
        match self {
            CoriolisPreset::Gradient { theta } => theta.is_static(),
            CoriolisPreset::Trig { modes } => modes.iter().all(|m| m.omega == 0.0),
            _ => true,
        }
    }

    /// `(ϖ, ∂_iϖ_j, ∂_tϖ)` at `(x, t)`.
    pub fn eval(&self, x: [f64; 3], t: f64) -> Result<([f64; 3], [[f64; 3]; 3], [f64; 3])> {
        let mut w = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        let mut dt = [0.0; 3];
        match self {
            CoriolisPreset::Zero => {}
            CoriolisPreset::Constant { value } => w = *value,
            CoriolisPreset::Uniform { omega0 } => {
                let h = 0.5 * omega0;
                w = [-h * x[1], h * x[0], 0.0];
                jac[0][1] = h;
                jac[1][0] = -h;
            }
            CoriolisPreset::Taubnut { a, chart, .. } => {
                let s = match chart {
                    Chart::Minus => 1.0,
                    Chart::Plus => -1.0,
                };
                let r = dot(x, x).sqrt();
                let den = r * (x[2] + s * r);
                if !(den.abs() > 0.0) || !den.is_finite() {
                    return Err(Error::Domain(format!("Taub-NUT covector singular at {x:?}")));
                }
                let f = 1.0 / den;
                // ∂_i [r (z + s r)] = (x_i/r)(z + s r) + r (δ_i3 + s x_i/r)
                let mut df = [0.0; 3];
                for i in 0..3 {
                    let dr = x[i] / r;
                    let dz = if i == 2 { 1.0 } else { 0.0 };
                    df[i] = -f * f * (dr * (x[2] + s * r) + r * (dz + s * dr));
                }
                let k = 2.0 * a;
                w = [k * x[1] * f, -k * x[0] * f, 0.0];
                for i in 0..3 {
                    jac[i][0] = k * (if i == 1 { f } else { 0.0 } + x[1] * df[i]);
                    jac[i][1] = -k * (if i == 0 { f } else { 0.0 } + x[0] * df[i]);
                }
            }
            CoriolisPreset::Gradient { theta } => {
                let j = theta.jet(x, t);
                for a in 0..3 {
                    w[a] = -j.grad[a];
                    dt[a] = -j.grad_dt[a];
                    for b in 0..3 {
                        jac[a][b] = -j.hess[a][b];
                    }
                }
            }
            CoriolisPreset::Trig { modes } => {
                for m in modes {
                    let th = dot(m.k, x) - m.omega * t + m.phase;
                    let (sn, cs) = th.sin_cos();
                    for b in 0..3 {
                        w[b] += m.amplitude[b] * sn;
                        dt[b] += -m.amplitude[b] * m.omega * cs;
                        for a in 0..3 {
                            jac[a][b] += m.amplitude[b] * m.k[a] * cs;
                        }
                    }
                }
            }
        }
        Ok((w, jac, dt))
    }

    /// Nodes excluded from residual norms (Taub-NUT string and origin).
    pub fn excluded(&self, x: [f64; 3], dx: f64) -> bool {
        if let CoriolisPreset::Taubnut { chart, r_cut, .. } = self {
            let rc = r_cut.unwrap_or(2.0 * dx);
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let r = dot(x, x).sqrt();
            let on_string_side = match chart {
                Chart::Minus => x[2] <= 0.0,
                Chart::Plus => x[2] >= 0.0,
            };
            r < rc || (on_string_side && rho < rc)
        } else {
            false
        }
    }
}

/// Analytic potentials: scalar preset for `U`, Coriolis preset for `ϖ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticPotential {
    #[serde(default)]
    pub u: ScalarPreset,
    #[serde(default)]
    pub varpi: CoriolisPreset,
}

impl AnalyticPotential {
    pub fn point(&self, x: [f64; 3], t: f64) -> Result<PotentialPoint> {
        let j = self.u.jet(x, t);
        let (w, jac, dtw) = self.varpi.eval(x, t)?;
        Ok(PotentialPoint::with_derivs(
            j.v,
            w,
            PotentialDerivs { grad_u: j.grad, dt_u: j.dt, jac_varpi: jac, dt_varpi: dtw },
        ))
    }
}

/// Potentials sampled on a grid, with first derivatives stored alongside.
#[derive(Clone, Debug)]
pub struct GridPotential {
    pub grid: GridSpec,
    pub time: f64,
    pub u: Vec<f64>,
    pub varpi: [Vec<f64>; 3],
    pub grad_u: [Vec<f64>; 3],
    /// `jac_varpi[i][j] = ∂_iϖ_j`.
    pub jac_varpi: [[Vec<f64>; 3]; 3],
    pub dt_u: Vec<f64>,
    pub dt_varpi: [Vec<f64>; 3],
    /// `true` marks nodes excluded from residual norms.
    pub mask: Option<Vec<bool>>,
    /// Name of the solver or preset that produced `U`.
    pub provenance: String,
    /// Mean density projected out by a periodic Poisson solve (0 otherwise).
    pub background: f64,
    interp: OnceLock<Interpolant>,
}

fn zeros3(n: usize) -> [Vec<f64>; 3] {
    std::array::from_fn(|_| vec![0.0; n])
}

impl GridPotential {
    pub fn zero(grid: GridSpec) -> Self {
        let n = grid.len();
        GridPotential {
            grid,
            time: 0.0,
            u: vec![0.0; n],
            varpi: zeros3(n),
            grad_u: zeros3(n),
            jac_varpi: std::array::from_fn(|_| zeros3(n)),
            dt_u: vec![0.0; n],
            dt_varpi: zeros3(n),
            mask: None,
            provenance: "zero".into(),
            background: 0.0,
            interp: OnceLock::new(),
        }
    }

    /// Build from periodic samples; derivatives are spectral, time derivatives zero.
    pub fn from_fields(grid: GridSpec, u: Vec<f64>, varpi: [Vec<f64>; 3]) -> Result<Self> {
        let n = grid.len();
        if u.len() != n || varpi.iter().any(|v| v.len() != n) {
            return Err(Error::GridMismatch("potential arrays do not match grid".into()));
        }
        if let Some(i) = std::iter::once(&u).chain(varpi.iter()).flat_map(|c| c.iter()).position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite potential value (entry {i})")));
        }
        let sp = Spectral::get(&grid);
        let mut p = GridPotential::zero(grid);
        p.grad_u = sp.gradient_real(&u);
        for (j, comp) in varpi.iter().enumerate() {
            let g = sp.gradient_real(comp);
            for (i, gi) in g.into_iter().enumerate() {
                p.jac_varpi[i][j] = gi;
            }
        }
        p.u = u;
        p.varpi = varpi;
        p.provenance = "grid".into();
        Ok(p)
    }

    /// Replace `U`, recomputing its gradient spectrally.
    pub fn set_u(&mut self, u: Vec<f64>, provenance: &str) {
        self.grad_u = Spectral::get(&self.grid).gradient_real(&u);
        self.u = u;
        self.provenance = provenance.into();
        self.interp = OnceLock::new();
    }

    /// Add `δU` to `U`; exact stored gradients are kept and the spectral gradient of `δU` added.
    pub fn add_u(&mut self, du: &[f64], provenance: &str) {
        let g = Spectral::get(&self.grid).gradient_real(du);
        for (u, d) in self.u.iter_mut().zip(du) {
            *u += d;
        }
        for (a, ga) in g.iter().enumerate() {
            for (v, d) in self.grad_u[a].iter_mut().zip(ga) {
                *v += d;
            }
        }
        self.provenance = provenance.into();
        self.interp = OnceLock::new();
    }

    /// Write `(U, ϖ₁, ϖ₂, ϖ₃)` as a `potential` snapshot.
    pub fn write_snapshot(&self, path: &std::path::Path, physics: crate::Physics) -> Result<()> {
        use crate::fields::snapshot::{write_raw, SnapshotHeader};
        let h = SnapshotHeader::new("potential", self.grid, physics, self.time, 4);
        let comps: Vec<Vec<C64>> = std::iter::once(&self.u)
            .chain(self.varpi.iter())
            .map(|c| c.iter().map(|&v| C64::new(v, 0.0)).collect())
            .collect();
        let refs: Vec<&[C64]> = comps.iter().map(|c| c.as_slice()).collect();
        write_raw(std::io::BufWriter::new(std::fs::File::create(path)?), &h, &refs)
    }

    /// Read a `potential` snapshot; derivatives are rebuilt spectrally.
    pub fn read_snapshot(path: &std::path::Path) -> Result<Self> {
        let (h, comps) = crate::fields::snapshot::read_raw(std::fs::File::open(path)?)?;
        if h.kind != "potential" || h.components != 4 {
            return Err(Error::Validation(format!("expected a 4-component potential snapshot, got {:?}", h.kind)));
        }
        let re = |c: &Vec<C64>| c.iter().map(|v| v.re).collect::<Vec<f64>>();
        let mut g = GridPotential::from_fields(h.grid, re(&comps[0]), [re(&comps[1]), re(&comps[2]), re(&comps[3])])?;
        g.time = h.time;
        g.provenance = format!("snapshot:{}", path.display());
        Ok(g)
    }

    pub fn has_varpi(&self) -> bool {
        self.varpi.iter().any(|c| c.iter().any(|v| *v != 0.0))
    }

    pub fn is_masked(&self, idx: usize) -> bool {
        self.mask.as_ref().is_some_and(|m| m[idx])
    }

    pub fn point(&self, idx: usize) -> PotentialPoint {
        let d = PotentialDerivs {
            grad_u: [0, 1, 2].map(|a| self.grad_u[a][idx]),
            dt_u: self.dt_u[idx],
            jac_varpi: std::array::from_fn(|i| std::array::from_fn(|j| self.jac_varpi[i][j][idx])),
            dt_varpi: [0, 1, 2].map(|a| self.dt_varpi[a][idx]),
        };
        PotentialPoint::with_derivs(self.u[idx], [0, 1, 2].map(|a| self.varpi[a][idx]), d)
    }

    /// `∇×ϖ` assembled from the stored Jacobian.
    pub fn curl_varpi(&self) -> [Vec<f64>; 3] {
        let j = &self.jac_varpi;
        let n = self.grid.len();
        [
            (0..n).map(|i| j[1][2][i] - j[2][1][i]).collect(),
            (0..n).map(|i| j[2][0][i] - j[0][2][i]).collect(),
            (0..n).map(|i| j[0][1][i] - j[1][0][i]).collect(),
        ]
    }

    /// Off-node evaluation by trigonometric interpolation of all stored arrays.
    pub fn point_at(&self, x: [f64; 3]) -> Result<PotentialPoint> {
        if !self.grid.contains(x) {
            return Err(Error::Domain(format!("point {x:?} outside grid box")));
        }
        let it = self.interp.get_or_init(|| {
            let c = |v: &[f64]| crate::fields::to_complex(v);
            let mut arrays: Vec<Vec<num_complex::Complex64>> = vec![c(&self.u), c(&self.dt_u)];
            for a in 0..3 {
                arrays.push(c(&self.varpi[a]));
                arrays.push(c(&self.grad_u[a]));
                arrays.push(c(&self.dt_varpi[a]));
                for b in 0..3 {
                    arrays.push(c(&self.jac_varpi[a][b]));
                }
            }
            let refs: Vec<&[num_complex::Complex64]> = arrays.iter().map(|v| v.as_slice()).collect();
            Spectral::get(&self.grid).interpolant(&refs)
        });
        let v: Vec<f64> = it.eval(x).iter().map(|z| z.re).collect();
        let mut d = PotentialDerivs { dt_u: v[1], ..Default::default() };
        let mut w = [0.0; 3];
        for a in 0..3 {
            let o = 2 + 6 * a;
            w[a] = v[o];
            d.grad_u[a] = v[o + 1];
            d.dt_varpi[a] = v[o + 2];
            for b in 0..3 {
                d.jac_varpi[a][b] = v[o + 3 + b];
            }
        }
        Ok(PotentialPoint::with_derivs(v[0], w, d))
    }
}

/// The sole input to all geometry: potentials from a grid, an analytic preset,
/// or a preset/grid seen through a group transformation or a gauge change.
#[derive(Clone, Debug)]
pub enum PotentialData {
    Analytic(AnalyticPotential),
    Grid(GridPotential),
    /// Potentials transformed by a Schrödinger–Newton element.
    Transformed(Box<PotentialData>, SnGroupElement),
    /// `ϖ + ∇ϑ`, `U − ∂_tϑ`.
    Gauged(Box<PotentialData>, ScalarPreset),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Grid,
    Analytic,
}

impl From<AnalyticPotential> for PotentialData {
    fn from(a: AnalyticPotential) -> Self {
        PotentialData::Analytic(a)
    }
}

impl From<GridPotential> for PotentialData {
    fn from(g: GridPotential) -> Self {
        PotentialData::Grid(g)
    }
}

impl PotentialData {
    pub fn flat() -> Self {
        PotentialData::Analytic(AnalyticPotential::default())
    }

    pub fn analytic(u: ScalarPreset, varpi: CoriolisPreset) -> Self {
        PotentialData::Analytic(AnalyticPotential { u, varpi })
    }

    pub fn provenance(&self) -> Provenance {
        match self {
            PotentialData::Analytic(_) => Provenance::Analytic,
            PotentialData::Grid(_) => Provenance::Grid,
            PotentialData::Transformed(p, _) | PotentialData::Gauged(p, _) => p.provenance(),
        }
    }

    pub fn is_static(&self) -> bool {
        match self {
            PotentialData::Analytic(a) => a.u.is_static() && a.varpi.is_static(),
            PotentialData::Grid(_) => true,
            PotentialData::Transformed(p, _) => p.is_static(),
            PotentialData::Gauged(p, th) => p.is_static() && th.is_static(),
        }
    }

    /// Potentials with first derivatives at `(x, t)`.
    pub fn point(&self, x: [f64; 3], t: f64) -> Result<PotentialPoint> {
        match self {
            PotentialData::Analytic(a) => a.point(x, t),
            PotentialData::Grid(g) => {
                // exact node lookup avoids interpolation round-off
                let dx = g.grid.dx();
                let idx: Vec<f64> = x.iter().map(|c| (c + 0.5 * g.grid.length) / dx).collect();
                if g.grid.contains(x) && idx.iter().all(|v| (v - v.round()).abs() < 1e-9) {
                    let n = g.grid.n;
                    let ii = idx.iter().map(|v| (v.round() as usize).min(n - 1)).collect::<Vec<_>>();
                    Ok(g.point(g.grid.index(ii[0], ii[1], ii[2])))
                } else {
                    g.point_at(x)
                }
            }
            PotentialData::Transformed(inner, u) => transformed_point(inner, u, x, t),
            PotentialData::Gauged(inner, theta) => {
                let mut p = inner.point(x, t)?;
                let j = theta.jet(x, t);
                let d = p.derivs.as_mut().expect("inner points carry derivatives");
                p.u -= j.dt;
                d.dt_u -= j.dt2;
                for a in 0..3 {
                    p.varpi[a] += j.grad[a];
                    d.grad_u[a] -= j.grad_dt[a];
                    d.dt_varpi[a] += j.grad_dt[a];
                    for b in 0..3 {
                        d.jac_varpi[a][b] += j.hess[a][b];
                    }
                }
                Ok(p)
            }
        }
    }

    /// Sample onto `grid` at time `t`, keeping exact derivatives where available.
    pub fn sample(&self, grid: &GridSpec, t: f64) -> Result<GridPotential> {
        if let PotentialData::Grid(g) = self {
            g.grid.check_same(grid)?;
            return Ok(g.clone());
        }
        let n = grid.len();
        let pts: Vec<PotentialPoint> = {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = grid.position(i);
                    match self.point(x, t) {
                        Ok(p) => Ok(p),
                        // Taub-NUT nodes exactly on the string are masked anyway
                        Err(Error::Domain(_)) if self.excluded(x, grid.dx()) => Ok(PotentialPoint::with_derivs(
                            0.0,
                            [0.0; 3],
                            PotentialDerivs::default(),
                        )),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>>>()?
        };
        let mut g = GridPotential::zero(*grid);
        g.time = t;
        for (i, p) in pts.iter().enumerate() {
            let d = p.derivs.expect("analytic points carry derivatives");
            g.u[i] = p.u;
            g.dt_u[i] = d.dt_u;
            for a in 0..3 {
                g.varpi[a][i] = p.varpi[a];
                g.grad_u[a][i] = d.grad_u[a];
                g.dt_varpi[a][i] = d.dt_varpi[a];
                for b in 0..3 {
                    g.jac_varpi[a][b][i] = d.jac_varpi[a][b];
                }
            }
        }
        let mask: Vec<bool> = (0..n).map(|i| self.excluded(grid.position(i), grid.dx())).collect();
        if mask.iter().any(|m| *m) {
            g.mask = Some(mask);
        }
        g.provenance = "analytic".into();
        Ok(g)
    }

    /// Whether `x` lies in an exclusion region of a singular preset.
    pub fn excluded(&self, x: [f64; 3], dx: f64) -> bool {
        match self {
            PotentialData::Analytic(a) => a.varpi.excluded(x, dx),
            PotentialData::Grid(_) => false,
            PotentialData::Gauged(p, _) => p.excluded(x, dx),
            // exclusion of a transformed preset is judged at the pulled-back point
            PotentialData::Transformed(p, u) => {
                let (y, _, _) = u.inverse_act(x, 0.0, 0.0);
                p.excluded(y, dx)
            }
        }
    }

    /// True if ϖ vanishes identically (presets) or on every node (grids).
    pub fn varpi_is_zero(&self) -> bool {
        match self {
            PotentialData::Analytic(a) => a.varpi.is_zero(),
            PotentialData::Grid(g) => !g.has_varpi(),
            PotentialData::Transformed(p, _) => p.varpi_is_zero(),
            PotentialData::Gauged(p, th) => p.varpi_is_zero() && th.gradient == [0.0; 3] && th.modes.is_empty(),
        }
    }
}

fn transformed_point(inner: &PotentialData, u: &SnGroupElement, xh: [f64; 3], th: f64) -> Result<PotentialPoint> {
    let (x, t, _) = u.inverse_act(xh, th, 0.0);
    let p = inner.point(x, t)?;
    let d = *p.derivs()?;
    let nu = u.nu();
    let (g, dd) = (u.g, u.d);
    let a = u.rotation();
    // A⁻¹ = Aᵀ
    let ainv = |i: usize, j: usize| a[j][i];
    let bb: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| ainv(i, j) * u.b[j]).sum());
    let nu2 = nu * nu;
    let nu4 = nu2 * nu2;
    let f = p.u + dot(p.varpi, bb);
    let df: [f64; 3] = std::array::from_fn(|j| d.grad_u[j] + (0..3).map(|k| d.jac_varpi[j][k] * bb[k]).sum::<f64>());
    let dtf = d.dt_u + dot(d.dt_varpi, bb);
    let mut out = PotentialDerivs::default();
    let mut w = [0.0; 3];
    for i in 0..3 {
        out.grad_u[i] = nu4 * (0..3).map(|j| df[j] * g * ainv(j, i)).sum::<f64>();
        w[i] = nu2 * (0..3).map(|l| p.varpi[l] * ainv(l, i)).sum::<f64>();
    }
    out.dt_u = nu4 * (g / dd) * (dtf - dot(df, bb));
    for k in 0..3 {
        for i in 0..3 {
            let mut s = 0.0;
            for l in 0..3 {
                for j in 0..3 {
                    s += d.jac_varpi[j][l] * g * ainv(j, i) * ainv(l, k);
                }
            }
            out.jac_varpi[i][k] = nu2 * s;
        }
        out.dt_varpi[k] = nu2
            * (0..3)
                .map(|l| {
                    let dj: f64 = (0..3).map(|j| d.jac_varpi[j][l] * bb[j]).sum();
                    ainv(l, k) * (g / dd) * (d.dt_varpi[l] - dj)
                })
                .sum::<f64>();
    }
    Ok(PotentialPoint::with_derivs(nu4 * f, w, out))
}
