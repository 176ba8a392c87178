//! Plot-ready CSV tables. Values are written with 17 significant digits.

use std::fmt::Write;

use crate::geodesics::GeodesicTrajectory;
use crate::israel::IsraelReport;

pub const SLACKS_HEADER: &str = "N,slack34_min,slack34_sup,slack35_min,slack35_sup,res31,res32,res33,bracket_min";
pub const RHO_HEADER: &str = "N,rho,rho_std";
pub const H_HEADER: &str = "N,H,H_std";
pub const R_HEADER: &str = "N,r,r_schwarzschild";
pub const GEODESIC_HEADER: &str = "seed,lambda,r";

/// One named CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub contents: String,
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

fn with_header(h: &str) -> String {
    format!("{h}\n")
}

/// Foliation tables; without a report every table is header only.
pub fn emit_plot_data(report: Option<&IsraelReport>) -> Vec<Table> {
    let mut slacks = with_header(SLACKS_HEADER);
    let mut rho = with_header(RHO_HEADER);
    let mut h = with_header(H_HEADER);
    let mut r = with_header(R_HEADER);
    if let Some(rep) = report {
        for l in &rep.per_level {
            row(
                &mut slacks,
                &[
                    l.n,
                    l.slack34_min,
                    l.slack34_sup,
                    l.slack35_min,
                    l.slack35_sup,
                    l.res31,
                    l.res32,
                    l.res33,
                    l.bracket_min,
                ],
            );
            row(&mut rho, &[l.n, l.rho, l.rho_std]);
            row(&mut h, &[l.n, l.h, l.h_std]);
            // Areal radius of the Schwarzschild leaf with the measured mass.
            row(&mut r, &[l.n, l.r, 2.0 * rep.mass / (1.0 - l.n * l.n)]);
        }
    }
    vec![
        Table {
            name: "slacks_vs_N.csv",
            contents: slacks,
        },
        Table {
            name: "rho_N.csv",
            contents: rho,
        },
        Table {
            name: "H_N.csv",
            contents: h,
        },
        Table {
            name: "r_N.csv",
            contents: r,
        },
    ]
}

/// r(λ) along every traced seed, stacked.
pub fn geodesic_table(trajectories: &[GeodesicTrajectory]) -> Table {
    let mut s = with_header(GEODESIC_HEADER);
    for (k, t) in trajectories.iter().enumerate() {
        for p in &t.samples {
            let _ = writeln!(s, "{k},{:.16e},{:.16e}", p.affine, p.position.r);
        }
    }
    Table {
        name: "geodesic_r_lambda.csv",
        contents: s,
    }
}
