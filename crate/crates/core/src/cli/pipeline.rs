//! Pipelines behind the subcommands. Everything here computes; files are
//! written by the caller once a pipeline has returned.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::plots::{emit_plot_data, geodesic_table};
use super::scenario::{Pipeline, Scenario, SurfaceSpec};
use crate::calculus::{curvature, vacuum_residual, Scheme};
use crate::error::{GeomError, Result};
use crate::geodesics::{
    energy_constancy_verdict, integrate_null, tangent_null_seeds, GeodesicTrajectory, TraceOptions,
};
use crate::hypersurfaces::Hypersurface;
use crate::israel::{empty_level_csv, reconstruct_lapse, run_israel, Rigidity};
use crate::photon::{certify_photon_surface, default_scan, locate_photon_sphere, CertifyConfig, Verdict};
use crate::spacetimes::{ChartPoint, StaticSpacetime};

/// Outcome classes, ordered so that combining stages keeps the most decisive one.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    True,
    False,
    Inconclusive,
    Error { status: &'static str, message: String },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::True => 0,
            Outcome::False => 1,
            Outcome::Inconclusive | Outcome::Error { .. } => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::True => "true",
            Outcome::False => "false",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Error { .. } => "error",
        }
    }

    fn from_error(e: &GeomError) -> Self {
        Outcome::Error {
            status: e.status(),
            message: e.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Outcome::Error { status, message } => json!({"outcome": "error", "status": status, "message": message}),
            o => json!({"outcome": o.label()}),
        }
    }
}

/// A refutation anywhere decides the run; otherwise any doubt does.
pub fn combine(outcomes: &[Outcome]) -> Outcome {
    if outcomes.iter().any(|o| *o == Outcome::False) {
        return Outcome::False;
    }
    if let Some(o) = outcomes.iter().find(|o| !matches!(o, Outcome::True)) {
        return o.clone();
    }
    Outcome::True
}

/// A file produced by a run, relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    fn json(name: &str, v: &Value) -> Self {
        let mut contents = serde_json::to_string_pretty(v).expect("JSON values serialize");
        contents.push('\n');
        Self {
            name: name.into(),
            contents,
        }
    }

    fn text(name: &str, contents: String) -> Self {
        Self {
            name: name.into(),
            contents,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub pipeline: Pipeline,
    pub outcome: Outcome,
    /// Per-stage outcomes in execution order.
    pub stages: Vec<(&'static str, Outcome)>,
    pub artifacts: Vec<Artifact>,
}

impl RunResult {
    pub fn summary(&self, sc: &Scenario) -> Value {
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|(name, o)| {
                let mut v = o.to_json();
                v["stage"] = json!(name);
                v
            })
            .collect();
        let mut names: Vec<&str> = self.artifacts.iter().map(|a| a.name.as_str()).collect();
        names.push("summary.json");
        let mut v = json!({
            "scenario": sc.name,
            "schema": sc.schema,
            "pipeline": self.pipeline.as_str(),
            "seed": sc.seed,
            "exit_code": self.outcome.exit_code(),
            "stages": stages,
            "artifacts": names,
        });
        for (k, x) in self.outcome.to_json().as_object().expect("object") {
            v[k] = x.clone();
        }
        v
    }

    pub fn summary_artifact(&self, sc: &Scenario) -> Artifact {
        Artifact::json("summary.json", &self.summary(sc))
    }
}

struct Run<'a> {
    sc: &'a Scenario,
    st: StaticSpacetime,
    stages: Vec<(&'static str, Outcome)>,
    artifacts: Vec<Artifact>,
}

pub fn build_spacetime(sc: &Scenario, scenario_path: &Path) -> Result<StaticSpacetime> {
    let profile = sc.profile_spec(scenario_path)?.build()?;
    let st = StaticSpacetime::new(profile);
    Ok(match sc.perturbation {
        Some(p) => st.with_perturbation(p),
        None => st,
    })
}

/// Run `pipeline` on the scenario. Never panics on bad physics: errors become outcomes.
pub fn execute(sc: &Scenario, scenario_path: &Path, pipeline: Pipeline, dump_curvature: bool) -> RunResult {
    let st = match build_spacetime(sc, scenario_path) {
        Ok(st) => st,
        Err(e) => {
            let o = Outcome::from_error(&e);
            return RunResult {
                pipeline,
                outcome: o.clone(),
                stages: vec![("profile", o)],
                artifacts: Vec::new(),
            };
        }
    };
    let mut run = Run {
        sc,
        st,
        stages: Vec::new(),
        artifacts: Vec::new(),
    };
    if dump_curvature {
        run.dump_curvature();
    }
    match pipeline {
        Pipeline::Detect => {
            run.detect();
        }
        Pipeline::Certify => {
            let r_ps = run.detect_quiet();
            run.certify(r_ps);
        }
        Pipeline::Trace => {
            let r_ps = run.detect_quiet();
            run.trace(r_ps);
        }
        Pipeline::Israel => run.israel(),
        Pipeline::Reconstruct => {
            let r_ps = run.detect_quiet();
            run.reconstruct(r_ps);
        }
        Pipeline::Full => {
            if let Some(r_ps) = run.detect() {
                run.certify(Some(r_ps));
                run.israel();
            }
        }
    }
    let outcomes: Vec<Outcome> = run.stages.iter().map(|(_, o)| o.clone()).collect();
    RunResult {
        pipeline,
        outcome: combine(&outcomes),
        stages: run.stages,
        artifacts: run.artifacts,
    }
}

impl Run<'_> {
    fn locate(&self) -> Result<crate::photon::PhotonSphereLocation> {
        locate_photon_sphere(&self.st.profile, default_scan(&self.st))
    }

    /// Location without recording a stage, for pipelines that only need r_ps.
    fn detect_quiet(&self) -> Option<f64> {
        self.locate().ok().and_then(|l| l.r_ps)
    }

    fn detect(&mut self) -> Option<f64> {
        let seed = self.sc.seed;
        match self.locate() {
            Ok(loc) => {
                let found = loc.r_ps.is_some();
                self.artifacts.push(Artifact::json(
                    "detect.json",
                    &json!({
                        "found": found,
                        "location": loc.r_ps,
                        "n0": loc.n0,
                        "multiplicity": loc.multiplicity,
                        "roots": loc.roots,
                        "scan": [loc.scan.0, loc.scan.1],
                        "mass_hint": self.st.mass_hint(),
                        "seed": seed,
                    }),
                ));
                self.stages
                    .push(("detect", if found { Outcome::True } else { Outcome::False }));
                loc.r_ps
            }
            Err(e) => {
                self.artifacts.push(Artifact::json(
                    "detect.json",
                    &json!({"found": false, "location": null, "status": e.status(), "error": e.to_string(), "seed": seed}),
                ));
                self.stages.push(("detect", Outcome::from_error(&e)));
                None
            }
        }
    }

    fn surface(&self, r_ps: Option<f64>, fallback: Option<f64>) -> Result<Hypersurface<'_>> {
        let spec = self.sc.surface.unwrap_or(SurfaceSpec::PhotonSphere);
        match spec {
            SurfaceSpec::Cylinder { r } => Ok(Hypersurface::cylinder(&self.st, r)),
            SurfaceSpec::LapseCylinder { n0 } => {
                let guess = r_ps.unwrap_or(3.0 * self.st.length_scale());
                Ok(Hypersurface::lapse_cylinder(&self.st, n0, guess))
            }
            SurfaceSpec::PhotonSphere => match r_ps.or(fallback) {
                Some(r) => Ok(Hypersurface::cylinder(&self.st, r)),
                None => Err(GeomError::Rejected("no photon sphere located: the scenario names no other surface".into())),
            },
        }
    }

    fn certify(&mut self, r_ps: Option<f64>) {
        let g = self.sc.geodesics;
        let cfg = CertifyConfig {
            seeds: g.seeds,
            span: g.span,
            rng_seed: self.sc.seed,
            samples: g.samples,
            tolerances: self.sc.tolerances,
        };
        let res = self.surface(r_ps, None).and_then(|s| certify_photon_surface(&s, &cfg));
        let (outcome, v) = match res {
            Ok(cert) => {
                let o = match cert.verdict {
                    Verdict::Certified => Outcome::True,
                    Verdict::Refuted => Outcome::False,
                    Verdict::Inconclusive => Outcome::Inconclusive,
                };
                let mut v = cert.to_json();
                v["seed"] = json!(self.sc.seed);
                (o, v)
            }
            Err(e) => (
                Outcome::from_error(&e),
                json!({"verdict": null, "status": e.status(), "error": e.to_string(), "seed": self.sc.seed}),
            ),
        };
        self.artifacts.push(Artifact::json("certificate.json", &v));
        self.stages.push(("certify", outcome));
    }

    fn trace(&mut self, r_ps: Option<f64>) {
        let g = self.sc.geodesics;
        let tol = self.sc.tolerances;
        let seed = self.sc.seed;
        // Without a photon sphere the seeds start tangent to r = 3L.
        let fallback = Some(3.0 * self.st.length_scale());
        let traced: Result<Vec<GeodesicTrajectory>> = self.surface(r_ps, fallback).and_then(|s| {
            let seeds = tangent_null_seeds(&s, g.seeds, seed)?;
            let opts = TraceOptions::default();
            seeds
                .iter()
                .map(|s0| integrate_null(&self.st, s0, s0.affine + g.span, &opts))
                .collect()
        });
        let trajs = match traced {
            Ok(t) => t,
            Err(e) => {
                self.artifacts.push(Artifact::json(
                    "trace.json",
                    &json!({"status": e.status(), "error": e.to_string(), "seed": seed}),
                ));
                self.artifacts.push(Artifact::text("geodesic_r_lambda.csv", geodesic_table(&[]).contents));
                self.stages.push(("trace", Outcome::from_error(&e)));
                return;
            }
        };
        let mut rows = Vec::with_capacity(trajs.len());
        let mut ok = true;
        for (k, t) in trajs.iter().enumerate() {
            let ev = energy_constancy_verdict(t, tol.null);
            let drift = t.energy_lapse_drift();
            // The iff comparison is reported only: near its threshold E and N vary together.
            let pass = drift < 10.0 * tol.null;
            ok &= pass;
            rows.push(json!({
                "seed_index": k,
                "status": t.status,
                "samples": t.samples.len(),
                "accepted_steps": t.accepted_steps,
                "rejected_steps": t.rejected_steps,
                "energy_lapse_drift": drift,
                "energy_spread": ev.max_drift,
                "lapse_variation": ev.lapse_variation,
                "energy_constant": ev.constant,
                "agrees_with_lapse": ev.agrees_with_lapse,
                "max_null_residual": t.max_null_residual(),
                "angular_momentum_drift": t.angular_momentum_drift(),
                "passed": pass,
            }));
            self.artifacts
                .push(Artifact::text(&format!("trajectories/seed_{k:03}.csv"), t.to_csv()));
        }
        self.artifacts.push(Artifact::json(
            "trace.json",
            &json!({
                "seeds": g.seeds,
                "span": g.span,
                "energy_threshold": 10.0 * tol.null,
                "all_passed": ok,
                "trajectories": rows,
                "seed": seed,
            }),
        ));
        self.artifacts.push(Artifact::text("geodesic_r_lambda.csv", geodesic_table(&trajs).contents));
        self.stages.push(("trace", if ok { Outcome::True } else { Outcome::False }));
    }

    fn israel(&mut self) {
        let cfg = self.sc.israel_config();
        match run_israel(&self.st, &cfg) {
            Ok(rep) => {
                let mut v = rep.to_json();
                v["vacuum"] = vacuum_probe(&self.st, rep.r_ps, self.sc.seed, self.sc.tolerances.diff);
                self.artifacts.push(Artifact::json("israel.json", &v));
                self.artifacts.push(Artifact::text("israel_levels.csv", rep.level_csv()));
                for t in emit_plot_data(Some(&rep)) {
                    self.artifacts.push(Artifact::text(t.name, t.contents));
                }
                let o = match rep.rigidity.verdict {
                    Rigidity::Isometric => Outcome::True,
                    Rigidity::NotIsometric => Outcome::False,
                    Rigidity::Inconclusive => Outcome::Inconclusive,
                };
                self.stages.push(("israel", o));
            }
            Err(e) => {
                self.artifacts.push(Artifact::json(
                    "israel.json",
                    &json!({
                        "verdict": null,
                        "rigidity": {"verdict": "rejected", "status": e.status()},
                        "status": e.status(),
                        "error": e.to_string(),
                        "seed": self.sc.seed,
                    }),
                ));
                self.artifacts.push(Artifact::text("israel_levels.csv", empty_level_csv()));
                for t in emit_plot_data(None) {
                    self.artifacts.push(Artifact::text(t.name, t.contents));
                }
                self.stages.push(("israel", Outcome::from_error(&e)));
            }
        }
    }

    fn reconstruct(&mut self, r_ps: Option<f64>) {
        let tol = self.sc.tolerances.lvl;
        let seed = self.sc.seed;
        let res = (|| -> Result<_> {
            let m = self
                .st
                .mass_hint()
                .filter(|m| *m != 0.0)
                .ok_or_else(|| GeomError::Flat("no nonzero mass: nothing to reconstruct".into()))?;
            let r0 = r_ps.ok_or_else(|| {
                GeomError::Rejected("no photon sphere located: the reconstruction has no boundary data".into())
            })?;
            let n0 = self.st.lapse(&[r0, 0.5 * PI, 0.0]);
            Ok((m, r0, n0, reconstruct_lapse(m, n0, r0, None)?))
        })();
        match res {
            Ok((m, r0, n0, rec)) => {
                let a_err = (rec.a_ode - 1.0).abs();
                let b_err = (rec.b_ode + 2.0 * m).abs() / m.abs();
                let pass = a_err < tol && b_err < tol && rec.sup_deviation < tol;
                let mut table = String::from("r,N,N_schwarzschild,H_direct,H_integrated\n");
                for (p, h) in rec.profile.iter().zip(&rec.mean_curvature) {
                    table.push_str(&format!(
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        p.r, p.n, p.n_schwarzschild, h.direct, h.integrated
                    ));
                }
                self.artifacts.push(Artifact::json(
                    "reconstruction.json",
                    &json!({
                        "mass": m,
                        "r0": r0,
                        "N0": n0,
                        "A_ode": rec.a_ode,
                        "B_ode": rec.b_ode,
                        "A_closed": rec.a_closed,
                        "B_closed": rec.b_closed,
                        "B_asymptotic": rec.b_asymptotic,
                        "mass_from_B": rec.mass_from_b,
                        "fit_residual": rec.fit_residual,
                        "sup_deviation": rec.sup_deviation,
                        "mean_curvature_residual": rec.mean_curvature_residual,
                        "r_end": rec.r_end,
                        "A_error": a_err,
                        "B_error": b_err,
                        "tolerance": tol,
                        "schwarzschild": pass,
                        "seed": seed,
                    }),
                ));
                self.artifacts.push(Artifact::text("reconstruction_r.csv", table));
                self.stages
                    .push(("reconstruct", if pass { Outcome::True } else { Outcome::False }));
            }
            Err(e) => {
                self.artifacts.push(Artifact::json(
                    "reconstruction.json",
                    &json!({"status": e.status(), "error": e.to_string(), "seed": seed}),
                ));
                self.stages.push(("reconstruct", Outcome::from_error(&e)));
            }
        }
    }

    /// Curvature bundles of the spatial and spacetime metrics at one point, every index written out.
    fn dump_curvature(&mut self) {
        let l = self.st.length_scale();
        let r = self.detect_quiet().unwrap_or(4.0 * l);
        let (th, ph) = (PI / 3.0, 0.5);
        let spatial = curvature(&self.st.spatial(), &[r, th, ph], Scheme::Autodiff);
        let full = curvature(&self.st.spacetime(), &[0.0, r, th, ph], Scheme::Autodiff);
        let v = match (spatial, full) {
            (Ok(a), Ok(b)) => json!({"spatial": a.to_json(), "spacetime": b.to_json(), "seed": self.sc.seed}),
            (Err(e), _) | (_, Err(e)) => json!({"status": e.status(), "error": e.to_string(), "seed": self.sc.seed}),
        };
        self.artifacts.push(Artifact::json("curvature.json", &v));
    }
}

/// Static vacuum residuals at seeded points outside the inner boundary, scaled by L².
fn vacuum_probe(st: &StaticSpacetime, r_in: f64, seed: u64, tol: f64) -> Value {
    let l = st.length_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut hess, mut scal, mut lap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let points = 64;
    let hi = (50.0 * l).max(2.0 * r_in);
    for k in 0..points {
        // The residual of a non-vacuum profile peaks at the inner boundary; always probe it.
        let r = if k == 0 { r_in } else { rng.gen_range(r_in..hi) };
        let th = rng.gen_range(0.2..PI - 0.2);
        let ph = rng.gen_range(0.0..2.0 * PI);
        let res = ChartPoint::new(0.0, r, th, ph).and_then(|p| vacuum_residual(st, &p, Scheme::Autodiff));
        match res {
            Ok(v) => {
                hess = hess.max(v.hessian_residual * l * l);
                scal = scal.max(v.scalar_residual * l * l);
                lap = lap.max(v.laplace_residual * l * l);
            }
            Err(e) => return json!({"status": e.status(), "error": e.to_string()}),
        }
    }
    json!({
        "points": points,
        "r_range": [r_in, hi],
        "hessian_residual": hess,
        "scalar_residual": scal,
        "laplace_residual": lap,
        "vacuum": hess.max(scal).max(lap) < tol,
    })
}
