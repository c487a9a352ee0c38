use std::io::Write;

use serde::Serialize;

use super::record::{charges_of, ChargeRecord};
use crate::evolve::Evolver;
use crate::Result;

pub const CSV_HEADER: [&str; 16] =
    ["t", "E_paper", "E_sn", "Px", "Py", "Pz", "Jx", "Jy", "Jz", "M", "Gx", "Gy", "Gz", "D", "T_kin", "W_pot"];

/// Largest drift of each charge relative to `max(|Q(t₀)|, 1)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DriftStats {
    pub e_paper: f64,
    pub e_sn: Option<f64>,
    pub p: f64,
    pub j: f64,
    pub mass: f64,
    pub g: f64,
    /// Published only; not expected to vanish.
    pub d: f64,
}

#[derive(Clone, Debug)]
pub struct MonitorReport {
    pub records: Vec<ChargeRecord>,
    pub drift: DriftStats,
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn rel(d: f64, q0: f64) -> f64 {
    d / q0.abs().max(1.0)
}

pub fn drift_stats(records: &[ChargeRecord]) -> DriftStats {
    let Some(r0) = records.first() else {
        return DriftStats::default();
    };
    let mut s = DriftStats { e_sn: r0.e_sn.map(|_| 0.0), ..Default::default() };
    let vdiff = |a: &[f64; 3], b: &[f64; 3]| norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
    for r in records {
        s.e_paper = s.e_paper.max(rel((r.e_paper - r0.e_paper).abs(), r0.e_paper));
        if let (Some(e0), Some(e), Some(cur)) = (r0.e_sn, r.e_sn, s.e_sn.as_mut()) {
            *cur = cur.max(rel((e - e0).abs(), e0));
        }
        s.p = s.p.max(rel(vdiff(&r.p, &r0.p), norm(&r0.p)));
        s.j = s.j.max(rel(vdiff(&r.j, &r0.j), norm(&r0.j)));
        s.mass = s.mass.max(rel((r.mass - r0.mass).abs(), r0.mass));
        s.g = s.g.max(rel(vdiff(&r.g, &r0.g), norm(&r0.g)));
        s.d = s.d.max(rel((r.d - r0.d).abs(), r0.d));
    }
    s
}

/// Advance `steps`, recording charges at the start and every `cadence` steps.
pub fn monitor(ev: &mut Evolver, steps: usize, cadence: usize) -> Result<MonitorReport> {
    let cadence = cadence.max(1);
    let mut records = vec![charges_of(ev)?];
    for k in 1..=steps {
        ev.step()?;
        if k % cadence == 0 || k == steps {
            records.push(charges_of(ev)?);
        }
    }
    let drift = drift_stats(&records);
    Ok(MonitorReport { records, drift })
}

pub fn write_csv<W: Write>(records: &[ChargeRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        let row = [
            r.t,
            r.e_paper,
            r.e_sn.unwrap_or(f64::NAN),
            r.p[0],
            r.p[1],
            r.p[2],
            r.j[0],
            r.j[1],
            r.j[2],
            r.mass,
            r.g[0],
            r.g[1],
            r.g[2],
            r.d,
            r.t_kin,
            r.w_pot,
        ];
        out.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    out.flush()?;
    Ok(())
}
