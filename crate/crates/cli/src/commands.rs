use std::path::{Path, PathBuf};

use lln_core::charges::{charges_of, covariance_test, drift_stats, write_csv, ChargeRecord, Scenario};
use lln_core::config::{Config, PotentialsSection};
use lln_core::evolve::{chi_from_phi, first_line_residual, ground_state as project, lift, EvolverKind, Evolver, GroundStateConfig, RunConfig, SourceMode};
use lln_core::fields::{snapshot, BispinorField, Spectral};
use lln_core::geometry::pauli::{max_abs4, Mat4};
use lln_core::geometry::*;
use lln_core::sngroup::SnGroupElement;
use lln_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::report::{Check, Report};
use crate::{Ctx, Failure};

const MANIFEST: &str = "manifest.json";

fn write_manifest(ctx: &Ctx, command: &str, outputs: &[PathBuf], extra: serde_json::Value) -> Result<(), Failure> {
    let m = json!({
        "tool": "lln",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_path": ctx.config_path,
        "config": ctx.config,
        "outputs": outputs,
        "summary": extra,
    });
    std::fs::write(ctx.out.join(MANIFEST), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}

fn run_config(c: &Config) -> Result<RunConfig, Failure> {
    c.evolver.as_ref().map(|e| e.run_config()).ok_or_else(|| Failure::Usage("an `evolver` section is required".into()))
}

fn taubnut_of(c: &Config) -> Option<f64> {
    match &c.potentials {
        PotentialsSection::Preset { varpi: CoriolisPreset::Taubnut { a, .. }, .. } => Some(*a),
        _ => None,
    }
}

// ---------------------------------------------------------------- verify-geometry

#[derive(Serialize)]
struct GeometryExtra {
    samples: usize,
    excluded_samples: usize,
}

pub fn verify_geometry(ctx: &Ctx) -> Result<bool, Failure> {
    let c = &ctx.config;
    let tol = &c.checks;
    let pd = c.potential_data()?;
    let grid = c.grid;
    let mut r = ChaCha8Rng::seed_from_u64(tol.seed);
    // interpolated grid potentials cost O(N³) per point
    let samples = match pd {
        PotentialData::Grid(_) => tol.samples.min(16),
        _ => tol.samples,
    };
    let half = 0.5 * grid.length;
    let (mut cliff, mut chir, mut inv, mut chr, mut pat) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut excluded = 0;
    for _ in 0..samples {
        let x = [0; 3].map(|_: i32| r.random_range(-half..half));
        let t = r.random_range(0.0..1.0);
        if pd.excluded(x, grid.dx()) {
            excluded += 1;
            continue;
        }
        let pt = pd.point(x, t)?;
        let gs = GammaSet::from_potentials(pt.u, pt.varpi);
        let mb = MetricBlock::from_potentials(pt.u, pt.varpi);
        cliff = cliff.max(clifford_residual(&gs, &mb));
        chir = chir.max(max_abs4(&(chirality_matrix(&gs, &mb) - Mat4::identity())));
        inv = inv.max(mb.inverse_residual());
        let exact = christoffels(&pd, x, t)?;
        let fd = christoffels_fd_oracle(&pd, x, t, 1e-3)?;
        chr = chr.max(exact.max_pattern_diff(&fd));
        pat = pat.max(exact.max_off_pattern()).max(fd.max_off_pattern());
    }
    let mut checks = vec![
        Check::new("clifford", cliff, tol.clifford),
        Check::new("chirality", chir, tol.chirality),
        Check::new("metric_inverse", inv, tol.metric_inverse),
        Check::new("christoffel_fd", chr, tol.christoffel),
        Check::new("christoffel_pattern", pat, tol.christoffel_pattern),
    ];

    let rho = vec![0.0; grid.len()];
    let ric = ricci_constraint_residual(&pd, &grid, &rho, c.physics.g_newton, 0.0)?;
    let coclosed_tol = if taubnut_of(c).is_some() { tol.taubnut } else { tol.ricci };
    checks.push(Check::new("ricci_coclosed", ric.r1, coclosed_tol));
    if let Some(a) = taubnut_of(c) {
        let mut worst = 0.0f64;
        for i in (0..grid.len()).filter(|&i| !ric.mask[i]) {
            let x = grid.position(i);
            let rr: f64 = x.iter().map(|v| v * v).sum();
            let want = 4.0 * a * a / (rr * rr);
            worst = worst.max((ric.omega_sq[i] - want).abs() / want.max(1.0));
        }
        checks.push(Check::new("taubnut_omega_sq", worst, tol.taubnut));
    }

    // the lifted check needs potentials regular on every node
    if c.initial.is_some() && taubnut_of(c).is_none() {
        let f = band_limited(c.initial_field()?);
        let p = pd.sample(&grid, f.time)?;
        let (m, hbar) = (f.physics.m, f.physics.hbar);
        let chi = chi_from_phi(&f.phi, &p, m, hbar);
        let first = first_line_residual(&f.phi, &chi, &p, m, hbar).into_iter().fold(0.0, f64::max);
        checks.push(Check::new("dirac_first_line", first, tol.first_line));
        let l = lift(&f.phi, &p, m, hbar, f.time);
        let d = dirac_residual(&l, &PotentialData::Grid(p))?.max();
        checks.push(Check::new("dirac_lifted", d, tol.dirac));
    }
    let rep = Report::new("verify-geometry", checks, GeometryExtra { samples, excluded_samples: excluded });
    rep.emit(&ctx.out, "verify_geometry.json")?;
    write_manifest(ctx, "verify-geometry", &[ctx.out.join("verify_geometry.json")], json!({"pass": rep.pass}))?;
    Ok(rep.pass)
}

/// Drop modes beyond the 2/3 cutoff so that `(σ·∇)²` and `Δ` agree on the test field.
fn band_limited(mut f: BispinorField) -> BispinorField {
    let sp = Spectral::get(&f.grid);
    let cut = sp.dealias_cutoff();
    for c in 0..2 {
        f.phi[c] = sp.apply_multiplier(&f.phi[c], |i| if sp.kvec(i).iter().any(|k| k.abs() >= cut) { C64::new(0.0, 0.0) } else { C64::new(1.0, 0.0) });
    }
    f
}

// ---------------------------------------------------------------- evolve

fn prepare_field(c: &Config, pd: &PotentialData) -> Result<(BispinorField, Option<serde_json::Value>), Failure> {
    let f = c.initial_field()?;
    match c.evolver.as_ref().and_then(|e| e.ground_state.as_ref()) {
        None => Ok((f, None)),
        Some(gs) => {
            let g = project(gs, pd, f)?;
            let info = json!({"energy": g.energy, "iterations": g.iterations, "poisson": g.solver});
            Ok((g.field, Some(info)))
        }
    }
}

pub fn evolve(ctx: &Ctx) -> Result<bool, Failure> {
    let c = &ctx.config;
    let cfg = run_config(c)?;
    let pd = c.potential_data()?;
    let (field, gs_info) = prepare_field(c, &pd)?;
    let mut ev = Evolver::new(cfg.clone(), pd, field)?;
    let snaps = ctx.out.join("snapshots");
    std::fs::create_dir_all(&snaps)?;
    let init = ctx.out.join("initial.snap");
    snapshot::write_field(&init, ev.field())?;
    let mut outputs = vec![init];
    let mut records: Vec<ChargeRecord> = vec![charges_of(&mut ev)?];
    let every = c.outputs.snapshot_every;
    let mut tick = 0;
    for k in 1..=cfg.steps {
        ev.step()?;
        if k % cfg.output_every == 0 || k == cfg.steps {
            records.push(charges_of(&mut ev)?);
            tick += 1;
            if every > 0 && tick % every == 0 {
                let p = snaps.join(format!("field_{k:06}.snap"));
                snapshot::write_field(&p, ev.field())?;
                outputs.push(p);
            }
        }
    }
    let fin = ctx.out.join("final.snap");
    snapshot::write_field(&fin, ev.field())?;
    outputs.push(fin);
    let csv = ctx.out.join("charges.csv");
    write_csv(&records, std::fs::File::create(&csv)?)?;
    outputs.push(csv);
    let drift = drift_stats(&records);
    let summary = json!({
        "steps": cfg.steps,
        "final_time": ev.time(),
        "drift": drift,
        "ground_state": gs_info,
        "warnings": ev.warnings,
    });
    for w in &ev.warnings {
        eprintln!("warning: {w}");
    }
    write_manifest(ctx, "evolve", &outputs, summary)?;
    eprintln!("evolve: {} steps to t = {:.6}, mass drift {:.2e}, wrote {}", cfg.steps, ev.time(), drift.mass, ctx.out.display());
    Ok(true)
}

// ---------------------------------------------------------------- ground-state

pub fn ground_state(ctx: &Ctx) -> Result<bool, Failure> {
    let c = &ctx.config;
    let gs: GroundStateConfig = c
        .evolver
        .as_ref()
        .and_then(|e| e.ground_state.clone())
        .ok_or_else(|| Failure::Usage("`evolver.ground_state` is required".into()))?;
    let pd = c.potential_data()?;
    let g = project(&gs, &pd, c.initial_field()?)?;
    let path = ctx.out.join("ground_state.snap");
    snapshot::write_field(&path, &g.field)?;
    let info = json!({"energy": g.energy, "iterations": g.iterations, "poisson": g.solver, "snapshot": path});
    std::fs::write(ctx.out.join("ground_state.json"), serde_json::to_string_pretty(&info)?)?;
    println!("{}", serde_json::to_string_pretty(&info)?);
    write_manifest(ctx, "ground-state", &[path, ctx.out.join("ground_state.json")], info)?;
    Ok(true)
}

// ---------------------------------------------------------------- charges

pub fn charges(ctx: &Ctx, snapshots: &[PathBuf]) -> Result<bool, Failure> {
    let c = &ctx.config;
    let pd = c.potential_data()?;
    let fields: Vec<BispinorField> = if snapshots.is_empty() {
        vec![c.initial_field()?]
    } else {
        snapshots.iter().map(|p| read_snapshot(p, c)).collect::<Result<_, _>>()?
    };
    let mut cfg = match &c.evolver {
        Some(e) => e.run_config(),
        None => RunConfig::new(SourceMode::External, EvolverKind::SplitStep, 1.0, 0),
    };
    // no stepping happens here; rk4 accepts Coriolis potentials and a tiny dt passes its guard
    cfg.evolver = EvolverKind::Rk4;
    cfg.dt = 1e-12;
    let mut ev = Evolver::new(cfg, pd, fields[0].clone())?;
    let mut records = vec![];
    for f in fields {
        ev.set_field(f)?;
        records.push(charges_of(&mut ev)?);
    }
    let csv = ctx.out.join("charges_recomputed.csv");
    write_csv(&records, std::fs::File::create(&csv)?)?;
    let mut stdout = std::io::stdout().lock();
    write_csv(&records, &mut stdout)?;
    write_manifest(ctx, "charges", &[csv], json!({"records": records.len()}))?;
    Ok(true)
}

fn read_snapshot(p: &Path, c: &Config) -> Result<BispinorField, Failure> {
    let f = snapshot::read_field(p).map_err(|e| Failure::Run(format!("{}: {e}", p.display())))?;
    f.grid.check_same(&c.grid)?;
    Ok(f)
}

// ---------------------------------------------------------------- symmetry-check

pub fn symmetry_check(ctx: &Ctx) -> Result<bool, Failure> {
    let c = &ctx.config;
    let rec = c.checks.element.clone().ok_or_else(|| Failure::Usage("`checks.element` is required".into()))?;
    let u = SnGroupElement::try_from(rec)?;
    let sc = Scenario {
        field: c.initial_field()?,
        external: c.potential_data()?,
        run: run_config(c)?,
        dirac_check: c.checks.symmetry_dirac,
    };
    let rep = covariance_test(&u, &sc)?;
    let mut checks = vec![
        Check::new("covariance_discrepancy", rep.discrepancy, c.checks.symmetry),
        Check::new("support_in_box", if rep.valid { 0.0 } else { rep.wrapped_fraction.max(rep.escaped_fraction) }, 0.0),
    ];
    if let Some(d) = rep.dirac_residual_rel {
        checks.push(Check::new("transformed_dirac_rel", d, c.checks.symmetry));
    }
    let out = Report::new("symmetry-check", checks, json!({"element": u, "covariance": rep}));
    out.emit(&ctx.out, "symmetry_check.json")?;
    write_manifest(ctx, "symmetry-check", &[ctx.out.join("symmetry_check.json")], json!({"pass": out.pass}))?;
    Ok(out.pass)
}
