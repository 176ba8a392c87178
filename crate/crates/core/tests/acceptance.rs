//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use photon_core::calculus::{vacuum_residual, Scheme};
use photon_core::cli::{build_spacetime, main_with_args, Scenario};
use photon_core::geodesics::{
    energy_constancy_verdict, integrate_null, tangency_persistence, tangent_null_seeds, GeodesicState, TraceOptions,
};
use photon_core::hypersurfaces::Hypersurface;
use photon_core::israel::{mass_flux, reconstruct_lapse, run_israel, IsraelReport, Rigidity, SphereRule};
use photon_core::photon::{default_scan, locate_photon_sphere};
use photon_core::spacetimes::{ChartPoint, RadialProfile, StaticSpacetime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn scenario_spacetime(name: &str) -> Result<StaticSpacetime, String> {
    let p = scenario_path(name);
    let sc = Scenario::load(&p).map_err(|e| e.to_string())?;
    build_spacetime(&sc, &p).map_err(|e| e.to_string())
}

fn photon_sphere_location() -> Check {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for m in [0.5, 1.0, 2.0, 10.0] {
        let t = Instant::now();
        let st = StaticSpacetime::schwarzschild(m);
        let loc = locate_photon_sphere(&st.profile, default_scan(&st)).map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        let r = loc.r_ps.ok_or(format!("m = {m}: no photon sphere"))?;
        let rel = (r - 3.0 * m).abs() / (3.0 * m);
        ensure(rel < 1e-8, || format!("m = {m}: r_ps = {r}, relative error {rel:.3e}"))?;
        ensure(dt < Duration::from_secs(1), || format!("m = {m}: took {dt:?}"))?;
        worst = worst.max(rel);
        slowest = slowest.max(dt);
    }
    Ok(format!("max relative error {worst:.2e}, slowest {slowest:.2?}"))
}

fn tangency() -> Check {
    let t = Instant::now();
    let st = StaticSpacetime::schwarzschild(1.0);
    let opts = TraceOptions::default();
    let ps = Hypersurface::cylinder(&st, 3.0);
    let seeds = tangent_null_seeds(&ps, 32, 0x5eed).map_err(|e| e.to_string())?;
    let on = tangency_persistence(&ps, &seeds, 100.0, &opts).map_err(|e| e.to_string())?;
    let off_surface = Hypersurface::cylinder(&st, 4.0);
    let seeds = tangent_null_seeds(&off_surface, 32, 0x5eed).map_err(|e| e.to_string())?;
    let off = tangency_persistence(&off_surface, &seeds, 100.0, &opts).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    ensure(on.max_deviation < 1e-5, || format!("r = 3m deviation {:.3e}", on.max_deviation))?;
    ensure(off.max_deviation > 0.1, || format!("r = 4m deviation {:.3e}", off.max_deviation))?;
    ensure(dt < Duration::from_secs(30), || format!("took {dt:?}"))?;
    Ok(format!(
        "max |r − 3| = {:.2e}, r = 4m deviation {:.3}, {dt:.2?}",
        on.max_deviation, off.max_deviation
    ))
}

fn random_geodesic(rng: &mut ChaCha8Rng) -> GeodesicState {
    let r = rng.gen_range(3.5..30.0);
    let th = rng.gen_range(0.4..2.7);
    let ph = rng.gen_range(0.0..2.0 * PI);
    GeodesicState {
        position: ChartPoint::new(0.0, r, th, ph).expect("chart point"),
        velocity: [1.0, rng.gen_range(-0.3..0.3), rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)],
        affine: 0.0,
    }
}

fn energy_law() -> Check {
    // Half in Schwarzschild, where N varies along the ray; half in Minkowski, where it cannot.
    let curved = StaticSpacetime::schwarzschild(1.0);
    let flat = StaticSpacetime::new(RadialProfile::minkowski());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let opts = TraceOptions::default();
    let (mut drift, mut agree, mut constant) = (0.0f64, 0, 0);
    for k in 0..100 {
        let st = if k % 2 == 0 { &curved } else { &flat };
        let s = random_geodesic(&mut rng);
        let t = integrate_null(st, &s, 30.0, &opts).map_err(|e| e.to_string())?;
        drift = drift.max(t.energy_lapse_drift());
        let v = energy_constancy_verdict(&t, 1e-9);
        agree += v.agrees_with_lapse as usize;
        constant += v.constant as usize;
    }
    ensure(drift < 1e-8, || format!("max |E·N − const| = {drift:.3e}"))?;
    ensure(agree == 100, || format!("verdicts agree on {agree}/100"))?;
    Ok(format!(
        "max |E·N − const| = {drift:.2e}; verdicts agree 100/100 ({constant} constant)"
    ))
}

fn vacuum() -> Check {
    let st = StaticSpacetime::schwarzschild(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let p = ChartPoint::new(0.0, rng.gen_range(2.2..50.0), rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.0..2.0 * PI))
            .map_err(|e| e.to_string())?;
        let v = vacuum_residual(&st, &p, Scheme::Autodiff).map_err(|e| e.to_string())?;
        worst = worst.max(v.hessian_residual).max(v.scalar_residual).max(v.laplace_residual);
    }
    ensure(worst < 1e-6, || format!("Schwarzschild residual {worst:.3e}"))?;
    let rn = scenario_spacetime("reissner_perturbed")?;
    let p = ChartPoint::new(0.0, 3.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let v = vacuum_residual(&rn, &p, Scheme::Autodiff).map_err(|e| e.to_string())?;
    let flagged = v.hessian_residual.max(v.scalar_residual).max(v.laplace_residual);
    ensure(flagged > 1e-3, || format!("charged residual only {flagged:.3e}"))?;
    Ok(format!("Schwarzschild max residual {worst:.2e}; charged profile residual {flagged:.2e}"))
}

fn mass_flux_levels() -> Check {
    let rule = SphereRule::new(32, 64);
    let mut worst: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for m in [1.0, 2.0] {
        let st = StaticSpacetime::schwarzschild(m);
        let fluxes: Vec<f64> = (0..10)
            .map(|k| {
                let r = 3.0 * m * 1.5f64.powi(k);
                mass_flux(&st, (1.0 - 2.0 * m / r).sqrt(), &rule)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let (lo, hi) = fluxes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &f| (a.min(f), b.max(f)));
        worst = fluxes.iter().fold(worst, |w, f| w.max((f - m).abs()));
        spread = spread.max(hi - lo);
    }
    ensure(worst < 1e-8, || format!("max |flux − m| = {worst:.3e}"))?;
    ensure(spread < 1e-8, || format!("spread {spread:.3e}"))?;
    Ok(format!("max |flux − m| = {worst:.2e}, spread {spread:.2e}"))
}

fn boundary_identities(rep: &IsraelReport) -> Check {
    let b = &rep.boundary;
    let m = 1.0;
    let checks = [
        ("ℌ r₀ − √3", b.frak_h * b.r0 - 3f64.sqrt()),
        ("N₀ − mℌ", b.n0 - m * b.frak_h),
        ("N₀ − 1/√3", b.n0 - 1.0 / 3f64.sqrt()),
        ("N₀² − (1 − 2m/r₀)", b.n0 * b.n0 - (1.0 - 2.0 * m / b.r0)),
        ("H₀ − 2N₀/r₀", b.h0 - 2.0 * b.n0 / b.r0),
        ("R_p − (2/3)ℌ²", b.r_p - 2.0 / 3.0 * b.frak_h * b.frak_h),
        ("R_p − 2/9", b.r_p - 2.0 / 9.0),
    ];
    let mut worst: f64 = 0.0;
    for (name, v) in checks {
        ensure(v.abs() < 1e-7, || format!("{name} = {v:.3e}"))?;
        worst = worst.max(v.abs());
    }
    Ok(format!("7 boundary relations, max residual {worst:.2e}"))
}

fn israel_identities(rep: &IsraelReport, elapsed: Duration) -> Check {
    let cfg = &rep.config;
    ensure(cfg.levels == 64 && cfg.n_theta == 64 && cfg.n_phi == 128, || {
        format!("configuration {} levels at {}x{}", cfg.levels, cfg.n_theta, cfg.n_phi)
    })?;
    let ids = rep.identity_sup();
    ensure(ids.iter().all(|v| *v < 1e-5), || format!("identity residual sups {ids:?}"))?;
    let c = &rep.chains;
    let chain = [
        c.first_integrated.ok_or("first chain not closed")?,
        c.first_boundary,
        c.second_integrated.ok_or("second chain not closed")?,
        c.second_boundary,
    ];
    ensure(chain.iter().all(|v| v.abs() < 1e-5), || format!("chain slacks {chain:?}"))?;
    let br = rep.bracket_min();
    ensure(br >= -1e-14, || format!("bracket min {br:.3e}"))?;
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    let chain_max = chain.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(format!(
        "identity sups {:.1e} {:.1e} {:.1e}; chain slacks max {chain_max:.1e}; bracket min {br:.1e}; {elapsed:.2?}",
        ids[0], ids[1], ids[2]
    ))
}

fn lambda_exclusion(rep: &IsraelReport) -> Check {
    let s = &rep.sign;
    ensure(s.sign.lambda == 1 && s.sign.consistent, || format!("sign {:?}", s.sign))?;
    let ex = s.exclusion.ok_or("no exclusion check at λ = +1")?;
    let neg = s.negative_branch.ok_or("no λ = −1 branch")?;
    ensure(ex.equality && !ex.contradiction, || format!("λ = +1: {ex:?}"))?;
    ensure(neg.contradiction, || format!("λ = −1: {neg:?}"))?;
    Ok(format!(
        "λ = +1 slack {:.1e} (equality); λ = −1 slack {:.1} (contradiction)",
        ex.slack, neg.slack
    ))
}

fn reconstruction() -> Check {
    let rec = reconstruct_lapse(1.0, 1.0 / 3f64.sqrt(), 3.0, None).map_err(|e| e.to_string())?;
    ensure((rec.a_ode - 1.0).abs() < 1e-8, || format!("A_ode = {}", rec.a_ode))?;
    ensure((rec.b_ode + 2.0).abs() < 1e-8, || format!("B_ode = {}", rec.b_ode))?;
    ensure(rec.r_end >= 100.0, || format!("sampled only to r = {}", rec.r_end))?;
    ensure(rec.sup_deviation < 1e-8, || format!("sup deviation {:.3e}", rec.sup_deviation))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("m1");
    let path = scenario_path("schwarzschild_m1");
    let code = main_with_args(["photon", "full", "--scenario", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    ensure(code == 0, || format!("full pipeline exit {code}"))?;
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("israel.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let mass = rep["mass"].as_f64().unwrap_or(f64::NAN);
    ensure(rep["verdict"] == "true", || format!("verdict {}", rep["verdict"]))?;
    ensure((mass - 1.0).abs() < 1e-8, || format!("mass {mass}"))?;
    Ok(format!(
        "A_ode − 1 = {:.1e}, B_ode + 2 = {:.1e}, sup deviation {:.1e}; full pipeline verdict true, mass {mass:.12}",
        rec.a_ode - 1.0,
        rec.b_ode + 2.0,
        rec.sup_deviation
    ))
}

fn degenerate() -> Check {
    for name in ["minkowski", "negative_mass"] {
        let st = scenario_spacetime(name)?;
        let loc = locate_photon_sphere(&st.profile, default_scan(&st)).map_err(|e| e.to_string())?;
        ensure(loc.r_ps.is_none(), || format!("{name}: photon sphere at {:?}", loc.r_ps))?;
    }
    let flat = scenario_spacetime("minkowski")?;
    match run_israel(&flat, &Default::default()) {
        Err(e) if e.status() == "flat" => {}
        Err(e) => return Err(format!("m = 0 rejected with status {}", e.status())),
        Ok(r) => return Err(format!("m = 0 produced a report with verdict {}", r.rigidity.verdict.as_str())),
    }
    Ok("minkowski and negative mass: no photon sphere; m = 0 israel run: flat".into())
}

fn main() {
    let m1 = scenario_path("schwarzschild_m1");
    let israel = Scenario::load(&m1)
        .map_err(|e| e.to_string())
        .and_then(|sc| {
            let st = build_spacetime(&sc, &m1).map_err(|e| e.to_string())?;
            let t = Instant::now();
            let rep = run_israel(&st, &sc.israel_config()).map_err(|e| e.to_string())?;
            Ok((rep, t.elapsed()))
        });
    if let Ok((rep, _)) = &israel {
        if rep.rigidity.verdict != Rigidity::Isometric {
            eprintln!("note: rigidity verdict {}", rep.rigidity.verdict.as_str());
        }
    }
    let with = |f: &dyn Fn(&IsraelReport, Duration) -> Check| match &israel {
        Ok((rep, dt)) => f(rep, *dt),
        Err(e) => Err(format!("israel run failed: {e}")),
    };
    let results: Vec<(&str, Check)> = vec![
        ("photon-sphere location", photon_sphere_location()),
        ("tangency persistence", tangency()),
        ("energy law", energy_law()),
        ("vacuum verification", vacuum()),
        ("mass flux", mass_flux_levels()),
        ("boundary identities", with(&|r, _| boundary_identities(r))),
        ("foliation identities and inequalities", with(&israel_identities)),
        ("λ-exclusion", with(&|r, _| lambda_exclusion(r))),
        ("reconstruction", reconstruction()),
        ("degenerate gates", degenerate()),
    ];
    let mut failed = 0;
    for (i, (name, res)) in results.iter().enumerate() {
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
