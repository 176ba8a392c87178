//! The `photon` command: scenario files in, reports and plot tables out.
//!
//! Exit status: 0 when every stage is certified or true, 1 when any stage is
//! refuted or false, 2 for inconclusive runs, errors and malformed scenarios.

mod pipeline;
mod plots;
mod scenario;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use pipeline::{build_spacetime, combine, execute, Artifact, Outcome, RunResult};
pub use plots::{
    emit_plot_data, geodesic_table, Table, GEODESIC_HEADER, H_HEADER, RHO_HEADER, R_HEADER, SLACKS_HEADER,
};
pub use scenario::{GeodesicSettings, IsraelSettings, Pipeline, Scenario, ScenarioError, SurfaceSpec, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "photon", version, about = "Photon-sphere location, certification and rigidity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace null geodesics seeded tangent to the scenario surface.
    Trace(RunArgs),
    /// Locate the photon sphere.
    Detect(RunArgs),
    /// Certify the scenario surface as a photon surface.
    Certify(RunArgs),
    /// Lapse foliation, identities, inequalities and the rigidity verdict.
    Israel(RunArgs),
    /// Rebuild the lapse from photon-sphere boundary data.
    Reconstruct(RunArgs),
    /// Detect, certify and run the rigidity pipeline.
    Full(RunArgs),
    /// Run whatever pipeline the scenario names.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory; defaults to the scenario's `out`, then `out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the tolerance that decides the pipeline's verdict.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub seeds: Option<usize>,
    #[arg(long)]
    pub span: Option<f64>,
    /// Quadrature order as `<cos θ nodes>x<φ nodes>`.
    #[arg(long, value_parser = parse_quad)]
    pub quad: Option<[usize; 2]>,
    /// Also write curvature.json with every Christoffel and Riemann component.
    #[arg(long)]
    pub dump_curvature: bool,
}

fn parse_quad(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected <int>x<int>, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad quadrature order `{t}`: {e}"));
    let q = [p(a)?, p(b)?];
    if q[0] < 2 || q[1] < 2 {
        return Err(format!("quadrature orders must be at least 2, got {s}"));
    }
    Ok(q)
}

impl Command {
    fn parts(&self) -> (Option<Pipeline>, &RunArgs) {
        match self {
            Command::Trace(a) => (Some(Pipeline::Trace), a),
            Command::Detect(a) => (Some(Pipeline::Detect), a),
            Command::Certify(a) => (Some(Pipeline::Certify), a),
            Command::Israel(a) => (Some(Pipeline::Israel), a),
            Command::Reconstruct(a) => (Some(Pipeline::Reconstruct), a),
            Command::Full(a) => (Some(Pipeline::Full), a),
            Command::Run(a) => (None, a),
        }
    }
}

/// Apply command-line overrides. `--tol` replaces the tolerance each pipeline decides on.
pub fn apply_overrides(sc: &mut Scenario, pipeline: Pipeline, a: &RunArgs) -> Result<(), String> {
    if let Some(t) = a.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(format!("--tol must be positive, got {t}"));
        }
        let tol = &mut sc.tolerances;
        match pipeline {
            Pipeline::Trace => tol.null = t,
            Pipeline::Detect | Pipeline::Certify => tol.cert = t,
            Pipeline::Israel | Pipeline::Reconstruct => tol.lvl = t,
            Pipeline::Full => {
                tol.cert = t;
                tol.lvl = t;
            }
        }
    }
    if let Some(n) = a.levels {
        sc.israel.levels = n;
    }
    if let Some(n) = a.seeds {
        if n == 0 {
            return Err("--seeds must be positive".into());
        }
        sc.geodesics.seeds = n;
    }
    if let Some(s) = a.span {
        if !(s.is_finite() && s > 0.0) {
            return Err(format!("--span must be positive, got {s}"));
        }
        sc.geodesics.span = s;
    }
    if let Some(q) = a.quad {
        sc.israel.quad = q;
    }
    Ok(())
}

/// Write every artifact under `out`, creating directories as needed.
pub fn write_artifacts(out: &Path, artifacts: &[Artifact]) -> std::io::Result<()> {
    for a in artifacts {
        let p = out.join(&a.name);
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(p, &a.contents)?;
    }
    Ok(())
}

/// Load, run and write one scenario; returns the exit status.
pub fn run_command(command: &Command) -> i32 {
    let (forced, args) = command.parts();
    let mut sc = match Scenario::load(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("photon: malformed scenario: {e}");
            return 2;
        }
    };
    let pipeline = forced.unwrap_or(sc.pipeline);
    if let Err(e) = apply_overrides(&mut sc, pipeline, args) {
        eprintln!("photon: {e}");
        return 2;
    }
    let out = args
        .out
        .clone()
        .or_else(|| sc.out.clone())
        .unwrap_or_else(|| Path::new("out").join(&sc.name));
    let res = execute(&sc, &args.scenario, pipeline, args.dump_curvature);
    let mut artifacts = res.artifacts.clone();
    artifacts.push(res.summary_artifact(&sc));
    if let Err(e) = write_artifacts(&out, &artifacts) {
        eprintln!("photon: cannot write to {}: {e}", out.display());
        return 2;
    }
    for (stage, o) in &res.stages {
        match o {
            Outcome::Error { status, message } => println!("{stage}: {status}: {message}"),
            o => println!("{stage}: {}", o.label()),
        }
    }
    println!(
        "{} {}: {} (exit {}), artifacts in {}",
        pipeline.as_str(),
        sc.name,
        res.outcome.label(),
        res.outcome.exit_code(),
        out.display()
    );
    res.outcome.exit_code()
}

/// Entry point for the binary and for tests.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_command(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(src: &str) -> Result<Scenario, ScenarioError> {
        Scenario::parse(src, Path::new("inline.json"))
    }

    const MINIMAL: &str = r#"{"schema": 1, "name": "t", "pipeline": "detect", "profile": {"kind": "schwarzschild", "m": 1}}"#;

    #[test]
    fn quad_orders() {
        assert_eq!(parse_quad("64x128"), Ok([64, 128]));
        assert_eq!(parse_quad("8X16"), Ok([8, 16]));
        assert!(parse_quad("64").is_err());
        assert!(parse_quad("1x8").is_err());
        assert!(parse_quad("ax8").is_err());
    }

    #[test]
    fn outcomes_combine_and_map_to_exit_codes() {
        let err = Outcome::Error {
            status: "flat",
            message: String::new(),
        };
        assert_eq!(combine(&[Outcome::True, Outcome::True]), Outcome::True);
        assert_eq!(combine(&[Outcome::True, Outcome::Inconclusive]), Outcome::Inconclusive);
        assert_eq!(combine(&[err.clone(), Outcome::False]), Outcome::False);
        assert_eq!(combine(&[Outcome::True, err.clone()]).exit_code(), 2);
        assert_eq!(combine(&[]), Outcome::True);
        assert_eq!(
            [Outcome::True, Outcome::False, Outcome::Inconclusive, err].map(|o| o.exit_code()),
            [0, 1, 2, 2]
        );
    }

    #[test]
    fn defaults_fill_a_minimal_scenario() {
        let sc = scenario(MINIMAL).unwrap();
        assert_eq!(sc.seed, 0x5eed);
        assert_eq!(sc.geodesics, GeodesicSettings::default());
        assert_eq!(sc.israel.quad, [64, 128]);
        let cfg = sc.israel_config();
        assert_eq!((cfg.levels, cfg.n_theta, cfg.n_phi, cfg.seed), (64, 64, 128, 0x5eed));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = scenario("{\n  \"schema\": 1,\n  \"name\": \"t\",\n  \"pipeline\": \"nope\"\n}").unwrap_err();
        assert_eq!((e.line, e.column), (Some(4), Some(20)));
        assert!(e.message.contains("unknown variant"));
        let e = scenario(&MINIMAL.replace("\"schema\": 1", "\"schema\": 2")).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("schema"));
        assert_eq!((e.line, e.column), (Some(1), Some(2)));
        let e = scenario(&MINIMAL.replace("\"m\": 1}", r#""m": 1}, "tolerances": {"cert": 0}"#)).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("tolerances.cert"));
        let e = scenario(r#"{"schema": 1, "name": "t", "pipeline": "detect"}"#).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("profile"));
        let e = scenario(&MINIMAL.replace("\"m\": 1}", "\"m\": 1, \"q\": 0}")).unwrap_err();
        assert!(e.message.contains("unknown field `q`"), "{e}");
        let shown = e.to_string();
        assert!(shown.starts_with("inline.json:1:"), "{shown}");
    }

    #[test]
    fn overrides_target_the_deciding_tolerance() {
        let base = scenario(MINIMAL).unwrap();
        let args = RunArgs {
            scenario: PathBuf::from("x"),
            out: None,
            tol: Some(1e-3),
            levels: Some(9),
            seeds: Some(4),
            span: Some(10.0),
            quad: Some([8, 16]),
            dump_curvature: false,
        };
        let mut sc = base.clone();
        apply_overrides(&mut sc, Pipeline::Israel, &args).unwrap();
        assert_eq!(sc.tolerances.lvl, 1e-3);
        assert_eq!(sc.tolerances.cert, base.tolerances.cert);
        assert_eq!((sc.israel.levels, sc.israel.quad), (9, [8, 16]));
        assert_eq!((sc.geodesics.seeds, sc.geodesics.span), (4, 10.0));
        let mut sc = base.clone();
        apply_overrides(&mut sc, Pipeline::Trace, &args).unwrap();
        assert_eq!(sc.tolerances.null, 1e-3);
        let mut sc = base.clone();
        apply_overrides(&mut sc, Pipeline::Full, &args).unwrap();
        assert_eq!((sc.tolerances.cert, sc.tolerances.lvl), (1e-3, 1e-3));
        let bad = RunArgs { tol: Some(-1.0), ..args };
        assert!(apply_overrides(&mut sc, Pipeline::Certify, &bad).is_err());
    }

    #[test]
    fn clap_surface() {
        let cli = Cli::try_parse_from(["photon", "israel", "--scenario", "s.json", "--quad", "8x16", "--levels", "9"]).unwrap();
        let (p, a) = cli.command.parts();
        assert_eq!(p, Some(Pipeline::Israel));
        assert_eq!((a.quad, a.levels), (Some([8, 16]), Some(9)));
        let cli = Cli::try_parse_from(["photon", "run", "--scenario", "s.json"]).unwrap();
        assert_eq!(cli.command.parts().0, None);
        assert!(Cli::try_parse_from(["photon", "detect"]).is_err());
        assert_eq!(main_with_args(["photon", "bogus"]), 2);
    }
}
