use super::{brinkmann_metric, MetricBlock, PotentialData, PotentialPoint, IDX_S, IDX_T};
use crate::Result;

/// Christoffel symbols `gamma[ρ][μ][ν] = Γ^ρ_{μν}` and the Coriolis curvature.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChristoffelTable {
    pub gamma: [[[f64; 5]; 5]; 5],
    pub omega: [[f64; 3]; 3],
}

const T: usize = IDX_T;
const S: usize = IDX_S;

impl ChristoffelTable {
    pub fn get(&self, up: usize, a: usize, b: usize) -> f64 {
        self.gamma[up][a][b]
    }

    /// Whether `Γ^up_{ab}` belongs to the generically nonzero pattern
    /// `{Γ^i_tt, Γ^s_it, Γ^s_tt, Γ^s_ij, Γ^i_jt}`.
    pub fn in_pattern(up: usize, a: usize, b: usize) -> bool {
        let sp = |i: usize| i < 3;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        match up {
            u if sp(u) => (lo == T && hi == T) || (sp(lo) && hi == T),
            S => (sp(lo) && hi == T) || (lo == T && hi == T) || (sp(lo) && sp(hi)),
            _ => false,
        }
    }

    /// Sparse listing of the pattern entries.
    pub fn entries(&self) -> Vec<((usize, usize, usize), f64)> {
        let mut v = Vec::new();
        for up in 0..5 {
            for a in 0..5 {
                for b in 0..5 {
                    if Self::in_pattern(up, a, b) {
                        v.push(((up, a, b), self.gamma[up][a][b]));
                    }
                }
            }
        }
        v
    }

    /// Max difference on the pattern.
    pub fn max_pattern_diff(&self, other: &ChristoffelTable) -> f64 {
        self.entries()
            .iter()
            .map(|((u, a, b), v)| (v - other.gamma[*u][*a][*b]).abs())
            .fold(0.0, f64::max)
    }

    /// Max magnitude outside the pattern.
    pub fn max_off_pattern(&self) -> f64 {
        let mut m: f64 = 0.0;
        for up in 0..5 {
            for a in 0..5 {
                for b in 0..5 {
                    if !Self::in_pattern(up, a, b) {
                        m = m.max(self.gamma[up][a][b].abs());
                    }
                }
            }
        }
        m
    }

    /// Max over `ρ, ν` of `|ξ^μ Γ^ρ_{μν}| = |Γ^ρ_{sν}|`.
    pub fn xi_contraction(&self) -> f64 {
        let mut m: f64 = 0.0;
        for up in 0..5 {
            for b in 0..5 {
                m = m.max(self.gamma[up][S][b].abs());
            }
        }
        m
    }
}

/// Closed-form Christoffel symbols of the Brinkmann metric.
pub fn christoffels_from_point(pt: &PotentialPoint) -> Result<ChristoffelTable> {
    let d = pt.derivs()?;
    let om = pt.omega()?;
    let w = pt.varpi;
    let mut c = ChristoffelTable { omega: om, ..Default::default() };
    let mut set = |up: usize, a: usize, b: usize, v: f64| {
        c.gamma[up][a][b] = v;
        c.gamma[up][b][a] = v;
    };
    let mut stt = -d.dt_u;
    for i in 0..3 {
        let acc = d.grad_u[i] + d.dt_varpi[i];
        set(i, T, T, acc);
        stt -= w[i] * acc;
        let rot: f64 = (0..3).map(|j| om[i][j] * w[j]).sum();
        set(S, i, T, -d.grad_u[i] - 0.5 * rot);
        for j in 0..3 {
            set(S, i, j, 0.5 * (d.jac_varpi[i][j] + d.jac_varpi[j][i]));
            set(i, j, T, -0.5 * om[i][j]);
        }
    }
    set(S, T, T, stt);
    Ok(c)
}

pub fn christoffels(p: &PotentialData, x: [f64; 3], t: f64) -> Result<ChristoffelTable> {
    christoffels_from_point(&p.point(x, t)?)
}

/// `∂_μ g_{ab}` by centred differences; the s-derivative vanishes identically.
fn metric_derivs(p: &PotentialData, x: [f64; 3], t: f64, h: f64) -> Result<[nalgebra::Matrix5<f64>; 5]> {
    let mut out = [nalgebra::Matrix5::zeros(); 5];
    for (mu, o) in out.iter_mut().enumerate().take(4) {
        let (mut xp, mut xm, mut tp, mut tm) = (x, x, t, t);
        if mu < 3 {
            xp[mu] += h;
            xm[mu] -= h;
        } else {
            tp += h;
            tm -= h;
        }
        let gp = brinkmann_metric(p, xp, tp)?.g;
        let gm = brinkmann_metric(p, xm, tm)?.g;
        *o = (gp - gm) / (2.0 * h);
    }
    Ok(out)
}

/// Full Christoffel array from centred differences of the metric. Independent of
/// the closed forms; used as their oracle.
pub fn christoffels_fd_oracle(p: &PotentialData, x: [f64; 3], t: f64, h: f64) -> Result<ChristoffelTable> {
    let dg = metric_derivs(p, x, t, h)?;
    let mb: MetricBlock = brinkmann_metric(p, x, t)?;
    let mut c = ChristoffelTable::default();
    for r in 0..5 {
        for a in 0..5 {
            for b in 0..5 {
                let mut v = 0.0;
                for s in 0..5 {
                    v += mb.ginv[(r, s)] * (dg[a][(s, b)] + dg[b][(s, a)] - dg[s][(a, b)]);
                }
                c.gamma[r][a][b] = 0.5 * v;
            }
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            // Ω_ij = ∂_i g_jt − ∂_j g_it
            c.omega[i][j] = dg[i][(j, T)] - dg[j][(i, T)];
        }
    }
    Ok(c)
}

/// Ricci tensor `R_{μν}` assembled from the finite-difference Christoffel oracle.
pub fn ricci_fd(p: &PotentialData, x: [f64; 3], t: f64, h: f64) -> Result<[[f64; 5]; 5]> {
    let g0 = christoffels_fd_oracle(p, x, t, h)?.gamma;
    // dgam[λ][ρ][μ][ν] = ∂_λ Γ^ρ_{μν}
    let mut dgam = [[[[0.0; 5]; 5]; 5]; 5];
    for (lam, dl) in dgam.iter_mut().enumerate().take(4) {
        let (mut xp, mut xm, mut tp, mut tm) = (x, x, t, t);
        if lam < 3 {
            xp[lam] += h;
            xm[lam] -= h;
        } else {
            tp += h;
            tm -= h;
        }
        let gp = christoffels_fd_oracle(p, xp, tp, h)?.gamma;
        let gm = christoffels_fd_oracle(p, xm, tm, h)?.gamma;
        for r in 0..5 {
            for a in 0..5 {
                for b in 0..5 {
                    dl[r][a][b] = (gp[r][a][b] - gm[r][a][b]) / (2.0 * h);
                }
            }
        }
    }
    let mut ric = [[0.0; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            let mut v = 0.0;
            for r in 0..5 {
                v += dgam[r][r][a][b] - dgam[b][r][a][r];
                for l in 0..5 {
                    v += g0[r][r][l] * g0[l][a][b] - g0[r][b][l] * g0[l][a][r];
                }
            }
            ric[a][b] = v;
        }
    }
    Ok(ric)
}
