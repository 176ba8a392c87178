use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::spacetimes::{LapsePerturbation, RadialProfile};

/// Closed forms on Schwarzschild: N, ρ = r²/m, H = 2N/r, ∂_N H, ∂_N ρ.
struct Closed {
    n: f64,
    rho: f64,
    h: f64,
    h_n: f64,
    rho_n: f64,
}

/// `∂_N = ρ N ∂_r` on the round leaves, with `dN/dr = m/(r²N)`.
fn closed(m: f64, r: f64) -> Closed {
    let n = (1.0 - 2.0 * m / r).sqrt();
    let rho = r * r / m.abs();
    let dr_dn = r * r * n / m;
    let dh_dr = 2.0 * m / (r.powi(3) * n) - 2.0 * n / (r * r);
    Closed {
        n,
        rho,
        h: 2.0 * n / r,
        h_n: dh_dr * dr_dn,
        rho_n: 2.0 * r / m.abs() * dr_dn,
    }
}

fn quick_cfg() -> IsraelConfig {
    IsraelConfig {
        levels: 9,
        n_theta: 12,
        n_phi: 24,
        ..IsraelConfig::default()
    }
}

#[test]
fn node_matches_closed_forms() {
    let st = StaticSpacetime::schwarzschild(1.0);
    for r in [3.0, 5.0, 20.0, 100.0] {
        let d = node_data(&st, &[r, 1.1, 0.4]).unwrap();
        let c = closed(1.0, r);
        assert!((d.n - c.n).abs() < 1e-15);
        assert!((d.rho - c.rho).abs() / c.rho < 1e-13);
        assert!((d.h - c.h).abs() < 1e-15);
        assert!((d.h_n - c.h_n).abs() < 1e-9 * c.h.abs(), "r={r}: {} vs {}", d.h_n, c.h_n);
        assert!((d.rho_n - c.rho_n).abs() / c.rho_n < 1e-11);
        assert!((d.r_sigma - 2.0 / (r * r)).abs() * r * r < 1e-13);
        assert!((d.nu_n - 1.0 / (r * r)).abs() * r * r < 1e-13);
        assert!(d.lap_sqrt_rho.abs() < 1e-14 && d.lap_ln_rho.abs() < 1e-14);
        assert!(d.tracefree_sq < 1e-28 && d.grad_rho_sq.abs() < 1e-20);
        assert!(d.orthogonality_defect < 1e-15);
    }
}

#[test]
fn photon_sphere_level_values() {
    for m in [1.0, 2.5] {
        let st = StaticSpacetime::schwarzschild(m);
        let l = build_level(&st, 1.0 / 3f64.sqrt(), &SphereRule::new(8, 16)).unwrap();
        assert!((l.area_radius - 3.0 * m).abs() < 1e-12 * m);
        assert!((l.rho.mean - 9.0 * m).abs() < 1e-12 * m);
        assert!((l.nu_n.mean - 1.0 / (9.0 * m)).abs() * m < 1e-14);
        assert!(l.rho.std < 1e-12 * m);
    }
}

#[test]
fn identities_at_r5_and_chain_rule_oracle() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let d = node_data(&st, &[5.0, 0.7, 2.0]).unwrap();
    let ids = identity_residuals(&d, 1.0);
    assert!(ids.first.abs() < 1e-10 && ids.second.abs() < 1e-10 && ids.third.abs() < 1e-10);
    // ρ,_N = d(r²/m)/dr · dr/dN with dr/dN = r²N/m, against λρ²H = (r⁴/m²)(2N/r).
    let (r, m) = (5.0, 1.0);
    let n = (1.0f64 - 2.0 / r).sqrt();
    let chain = 2.0 * r / m * (r * r * n / m);
    let rhs = r.powi(4) / (m * m) * 2.0 * n / r;
    assert!((chain - rhs).abs() < 1e-12);
    assert!((d.rho_n - chain).abs() < 1e-10);
}

#[test]
fn mass_flux_on_distinct_levels() {
    for m in [1.0, 2.0] {
        let st = StaticSpacetime::schwarzschild(m);
        let rule = SphereRule::new(16, 32);
        let mut fluxes = Vec::new();
        for k in 0..10 {
            let r = 3.0 * m * (1.0 + 0.7 * k as f64);
            let n = (1.0 - 2.0 * m / r).sqrt();
            fluxes.push(mass_flux(&st, n, &rule).unwrap());
        }
        for f in &fluxes {
            assert!((f - m).abs() < 1e-8 * m, "{f}");
        }
        let spread = fluxes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - fluxes.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-8);
    }
    let st = StaticSpacetime::schwarzschild(2.0);
    let l = build_level(&st, (1.0f64 - 0.4).sqrt(), &SphereRule::new(8, 16)).unwrap();
    assert!((l.area_radius - 10.0).abs() < 1e-11);
    assert!((l.mass_flux - 2.0).abs() < 1e-8);
}

#[test]
fn constant_lapse_is_not_a_foliation() {
    let st = StaticSpacetime::new(RadialProfile::minkowski());
    let e = node_data(&st, &[5.0, 1.0, 0.0]).unwrap_err();
    assert_eq!(e.status(), "foliation failure");
    assert!(e.to_string().contains("r, θ, φ"));
    // A synthetic leaf with ν(N) = 0 carries zero flux.
    let nodes = vec![NodeData { rho: 1.0, n: 1.0, ..NodeData::default() }; 4];
    let l = summarize(1.0, nodes, vec![PI; 4]);
    assert_eq!(l.mass_flux, 0.0);
}

#[test]
fn non_vacuum_lapse_breaks_the_first_identity() {
    let st = StaticSpacetime::schwarzschild(1.0).with_perturbation(LapsePerturbation {
        epsilon: 0.1,
        power: 2.0,
    });
    let l = build_level(&st, (1.0f64 - 2.0 / 5.0).sqrt(), &SphereRule::new(8, 16)).unwrap();
    let [r31, _, _] = l.identity_sups(1.0, 1.0);
    assert!(r31 > 1e-3, "{r31}");
    // ρ varies along the leaf, so the brackets are strictly positive somewhere.
    assert!(l.rho.std > 0.0);
    assert!(l.nodes.iter().any(|d| d.bracket() > 1e-8));
}

/// Node data that satisfies the three identities by construction, with
/// the free leaf data chosen arbitrarily.
fn synthetic(lambda: f64, grad_rho_sq: f64, tracefree_sq: f64) -> NodeData {
    let (n, rho, h, lsr, llr) = (0.7, 12.0, 0.3, 0.002, -0.004);
    let mut d = NodeData {
        n,
        rho,
        h,
        lap_sqrt_rho: lsr,
        lap_ln_rho: llr,
        grad_rho_sq,
        tracefree_sq,
        nu_n: lambda / rho,
        ..NodeData::default()
    };
    let b = d.bracket();
    d.rho_n = lambda * rho * rho * h;
    // Solve the first identity for H,_N, then the second for R_σ.
    d.h_n = h / n - 0.5 * lambda * rho * h * h - lambda * rho * (2.0 / rho.sqrt() * lsr + 0.5 * b);
    d.r_sigma = lambda / rho * (3.0 * h / n - d.h_n) - llr - b;
    d
}

#[test]
fn slacks_are_brackets_for_solutions() {
    for (gr, tf) in [(0.0, 0.0), (0.5, 0.0), (0.0, 0.01), (2.0, 0.3)] {
        let d = synthetic(1.0, gr, tf);
        let ids = identity_residuals(&d, 1.0);
        assert!(ids.first.abs() < 1e-15 && ids.second.abs() < 1e-14 && ids.third.abs() < 1e-13);
        let s = point_slacks(&d, 1.0);
        let b = d.bracket();
        assert!((s.first - d.rho.sqrt() * b / (2.0 * d.n)).abs() < 1e-14);
        assert!((s.second - d.n * b).abs() < 1e-14);
        if gr > 0.0 || tf > 0.0 {
            assert!(b > 0.0 && s.first > 0.0 && s.second > 0.0);
        }
    }
}

#[test]
fn second_pointwise_inequality_needs_positive_lambda() {
    // On the λ = −1 side the substitution leaves −2N(R_σ + Δ_σ ln ρ) − N[…].
    let d = synthetic(-1.0, 0.5, 0.01);
    let s = point_slacks(&d, -1.0);
    let expected = -2.0 * d.n * (d.r_sigma + d.lap_ln_rho) - d.n * d.bracket();
    assert!((s.second - expected).abs() < 1e-13);
    assert!((s.first - d.rho.sqrt() * d.bracket() / (2.0 * d.n)).abs() < 1e-14);
    // Negative-mass Schwarzschild is vacuum and satisfies the identities, yet the slack is −4N/r².
    let st = StaticSpacetime::schwarzschild(-1.0);
    let r = 5.0;
    let d = node_data(&st, &[r, 1.0, 0.5]).unwrap();
    assert_eq!(d.lambda(), -1.0);
    let ids = identity_residuals(&d, -1.0);
    assert!(ids.first.abs() < 1e-10 && ids.second.abs() < 1e-10 && ids.third.abs() < 1e-9);
    let s = point_slacks(&d, -1.0);
    assert!((s.second + 4.0 * d.n / (r * r)).abs() < 1e-10, "{}", s.second);
    assert!(s.first.abs() < 1e-10);
}

#[test]
fn sign_analysis_examples() {
    let b = BoundaryData::schwarzschild(1.0);
    let s = sign_analysis(&b, 1e-7).unwrap();
    assert_eq!(s.sign.lambda, 1);
    assert!(s.sign.consistent);
    let e = s.exclusion.unwrap();
    assert!(e.equality && !e.contradiction);
    assert!((e.bound - 9.0).abs() < 1e-12);
    let neg = s.negative_branch.unwrap();
    assert!((neg.bound + 3.0).abs() < 1e-12);
    assert!(neg.contradiction);
    // m < 0 with the photon-sphere geometry of a positive mass: signs disagree.
    let bad = BoundaryData {
        mass: -1.0,
        nu_n0: -1.0 / 9.0,
        ..b
    };
    let s = sign_analysis(&bad, 1e-7).unwrap();
    assert!(!s.sign.consistent);
    assert!(s.exclusion.is_none());
    let flat = BoundaryData { mass: 0.0, ..b };
    assert_eq!(sign_analysis(&flat, 1e-7).unwrap_err().status(), "flat");
}

#[test]
fn boundary_relations_closed_forms() {
    for m in [1.0, 5.0] {
        let b = BoundaryData::schwarzschild(m);
        let c = boundary_constraints(&b);
        assert!(c.max_residual() < 1e-14, "{c:?}");
        assert!((c.mass_from_frak_h - m).abs() < 1e-13 * m);
        assert!((c.frak_h_r0 - 3f64.sqrt()).abs() < 1e-14);
        assert!((c.m_frak_h - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }
    let b = BoundaryData::schwarzschild(5.0);
    assert_eq!(b.r0, 15.0);
    assert!((b.frak_h - 1.0 / (5.0 * 3f64.sqrt())).abs() < 1e-16);
    let off = BoundaryData { h0: 0.4, ..BoundaryData::schwarzschild(1.0) };
    assert!(boundary_constraints(&off).max_residual() > 1e-2);
}

#[test]
fn reconstruction_schwarzschild() {
    let r = reconstruct_lapse(1.0, 1.0 / 3f64.sqrt(), 3.0, None).unwrap();
    assert!((r.a_ode - 1.0).abs() < 1e-8, "{}", r.a_ode);
    assert!((r.b_ode + 2.0).abs() < 1e-8, "{}", r.b_ode);
    assert!(r.sup_deviation < 1e-8, "{}", r.sup_deviation);
    assert!((r.a_closed - 1.0).abs() < 1e-14 && (r.b_closed + 2.0).abs() < 1e-14);
    assert!((r.b_asymptotic + 2.0).abs() < 1e-14);
    assert!((r.mass_from_b - 1.0).abs() < 1e-8);
    assert_eq!(r.r_end, 100.0);
    assert!(r.mean_curvature_residual < 1e-9);
    for s in &r.mean_curvature {
        assert!((s.direct - 2.0 * s.n / s.r).abs() < 1e-8);
    }
}

#[test]
fn halved_exponent_is_the_consistent_one() {
    // Along Schwarzschild, d ln(H/N)/dN = −(λ/2)ρH; dropping the ½ doubles the decay.
    let r = reconstruct_lapse(1.0, 1.0 / 3f64.sqrt(), 3.0, None).unwrap();
    let s = r.mean_curvature.last().unwrap();
    let q = 2.0 * (s.r / 3.0).ln();
    let h0 = 2.0 / (3.0 * 3f64.sqrt());
    let n0 = 1.0 / 3f64.sqrt();
    let halved = h0 / n0 * s.n * (-0.5 * q).exp();
    let unhalved = h0 / n0 * s.n * (-q).exp();
    assert!((halved - s.direct).abs() < 1e-9);
    assert!((unhalved - s.direct).abs() / s.direct > 0.9);
}

#[test]
fn reconstruction_generic_and_trivial() {
    // N = √(0.9 − 1.8/r) at r = 3: m = 0.9 with the default H₀ reproduces u′.
    let r = reconstruct_lapse(0.9, 0.3f64.sqrt(), 3.0, None).unwrap();
    assert!((r.a_ode - 0.9).abs() < 1e-8 && (r.b_ode + 1.8).abs() < 1e-8);
    let u = solve_u_ode(2.0, 0.49, 0.0, 50.0, None).unwrap();
    assert_eq!(u.u.last().copied(), Some(0.49));
    assert!((u.a - 0.49).abs() < 1e-14 && u.b.abs() < 1e-12);
    for n0 in [0.0, 1.0, 1.2, -0.3] {
        assert_eq!(reconstruct_lapse(1.0, n0, 3.0, None).unwrap_err().status(), "rejected");
    }
}

#[test]
fn grid_needs_levels_and_one_side() {
    assert_eq!(LevelGrid::new(0.5, 0.9, 4).unwrap_err().status(), "rejected");
    assert!(LevelGrid::new(0.5, 1.1, 9).is_err());
    let g = LevelGrid::new(0.5, 0.99, 17).unwrap();
    assert_eq!(g.n[0], 0.5);
    assert_eq!(g.n[16], 0.99);
    // ∫ N dN over the grid.
    let v: Vec<f64> = g.n.clone();
    assert!((g.integrate(&v) - 0.5 * (0.99f64.powi(2) - 0.25)).abs() < 1e-12);
    let d = g.derivative(&g.n.iter().map(|n| n * n).collect::<Vec<_>>());
    for (dn, n) in d.iter().zip(&g.n) {
        // The 1/(1 − N) factor amplifies the spectral error near the outer end.
        assert!((dn - 2.0 * n).abs() < 1e-7, "{dn} {n}");
    }
}

#[test]
fn foliation_invariants_schwarzschild() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let fol = build_foliation(&st, 1.0 / 3f64.sqrt(), (1.0f64 - 0.02).sqrt(), 17, (12, 24)).unwrap();
    let mut last_r = 0.0;
    for l in &fol.levels {
        assert!((l.gauss_bonnet - 4.0 * PI).abs() < 1e-10);
        assert!((l.mass_flux - 1.0).abs() < 1e-10);
        assert!((l.rho.mean - l.area_radius.powi(2)).abs() / l.rho.mean < 1e-10);
        assert!(l.area_radius > last_r);
        assert!(l.area_rate_residual < 1e-6, "{}", l.area_rate_residual);
        assert!(l.bracket_min() >= -1e-14);
        last_r = l.area_radius;
    }
}

#[test]
fn pipeline_schwarzschild_is_rigid() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let rep = run_israel(&st, &quick_cfg()).unwrap();
    assert_eq!(rep.rigidity.verdict, Rigidity::Isometric, "{:#?}", rep.rigidity.gates);
    assert!((rep.mass - 1.0).abs() < 1e-10);
    assert_eq!(rep.lambda, 1);
    assert!(rep.constraints.max_residual() < 1e-7, "{:?}", rep.constraints);
    assert!(rep.lapse_range.within);
    // Nine levels only resolve the across-level derivative to a few digits.
    assert!(rep.transverse.h_n < 1e-2 && rep.transverse.rho_n < 1e-3, "{:?}", rep.transverse);
    let j = rep.to_json();
    for k in ["mass", "boundary", "per_level", "slacks", "invariants", "lambda", "verdict"] {
        assert!(j.get(k).is_some(), "{k}");
    }
    assert_eq!(j["verdict"], "true");
    assert!(j["boundary"]["frakH"].as_f64().unwrap() > 0.0);
    let csv = rep.level_csv();
    assert_eq!(csv.lines().count(), 10);
    assert!(csv.starts_with(LEVEL_CSV_HEADER));
}

#[test]
fn truncated_tail_is_inconclusive() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let cfg = IsraelConfig {
        tail: false,
        ..quick_cfg()
    };
    let rep = run_israel(&st, &cfg).unwrap();
    assert_eq!(rep.rigidity.verdict, Rigidity::Inconclusive);
    assert_eq!(rep.rigidity.first_failure, Some("tail"));
    assert!(rep.chains.first_integrated.is_none());
}

#[test]
fn perturbed_lapse_fails_identities_first() {
    let st = StaticSpacetime::schwarzschild(1.0).with_perturbation(LapsePerturbation {
        epsilon: 0.02,
        power: 2.0,
    });
    let rep = run_israel(&st, &quick_cfg()).unwrap();
    assert_eq!(rep.rigidity.verdict, Rigidity::NotIsometric);
    assert_eq!(rep.rigidity.first_failure, Some("identities"));
}

#[test]
fn degenerate_inputs() {
    let flat = StaticSpacetime::new(RadialProfile::minkowski());
    assert_eq!(run_israel(&flat, &quick_cfg()).unwrap_err().status(), "flat");
    let neg = StaticSpacetime::schwarzschild(-1.0);
    let e = run_israel(&neg, &quick_cfg()).unwrap_err();
    assert_eq!(e.status(), "rejected");
    assert!(e.to_string().contains("no photon sphere"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_on_schwarzschild(m in 0.3f64..5.0, s in 1.02f64..40.0, th in 0.2f64..2.9, ph in 0.0f64..6.2) {
        let st = StaticSpacetime::schwarzschild(m);
        let r = 3.0 * m * s;
        let d = node_data(&st, &[r, th, ph]).unwrap();
        let ids = identity_residuals(&d, 1.0);
        prop_assert!(ids.first.abs() * m * m < 1e-8);
        prop_assert!(ids.second.abs() * m * m < 1e-8);
        prop_assert!(ids.third.abs() / m < 1e-8);
        prop_assert!(d.bracket() >= 0.0);
        let c = closed(m, r);
        prop_assert!((d.h - c.h).abs() * m < 1e-13);
    }

    #[test]
    fn brackets_nonnegative_under_perturbation(eps in -0.05f64..0.05, r in 3.5f64..30.0, th in 0.1f64..3.0) {
        let st = StaticSpacetime::schwarzschild(1.0).with_perturbation(LapsePerturbation { epsilon: eps, power: 2.0 });
        let d = node_data(&st, &[r, th, 0.3]).unwrap();
        prop_assert!(d.grad_rho_sq >= 0.0 && d.tracefree_sq >= 0.0);
        prop_assert!(d.bracket() >= -1e-14);
    }
}
