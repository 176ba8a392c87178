use super::*;
use crate::spacetimes::RadialProfile;
use proptest::prelude::*;

fn start(r: f64, theta: f64, v: [f64; 3]) -> GeodesicState {
    GeodesicState {
        position: ChartPoint::new(0.0, r, theta, 0.1).unwrap(),
        velocity: [1.0, v[0], v[1], v[2]],
        affine: 0.0,
    }
}

#[test]
fn photon_sphere_tangency() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let cyl = Hypersurface::cylinder(&st, 3.0);
    let seeds = tangent_null_seeds(&cyl, 32, 11).unwrap();
    let rep = tangency_persistence(&cyl, &seeds, 100.0, &TraceOptions::default()).unwrap();
    assert!(rep.max_deviation < 1e-5, "{}", rep.max_deviation);
    assert!(rep.seeds.iter().all(|s| s.status == IntegrationStatus::Completed));

    let cyl4 = Hypersurface::cylinder(&st, 4.0);
    let seeds = tangent_null_seeds(&cyl4, 32, 11).unwrap();
    let rep = tangency_persistence(&cyl4, &seeds, 100.0, &TraceOptions::default()).unwrap();
    assert!(rep.max_deviation > 0.1);
}

#[test]
fn lapse_cylinder_seeds_are_tangent() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let cyl = Hypersurface::lapse_cylinder(&st, 1.0 / 3f64.sqrt(), 3.0);
    let seeds = tangent_null_seeds(&cyl, 8, 3).unwrap();
    for s in &seeds {
        assert!((s.position.r - 3.0).abs() < 1e-10);
        assert!(s.velocity[1].abs() < 1e-12);
    }
    let rep = tangency_persistence(&cyl, &seeds, 30.0, &TraceOptions::default()).unwrap();
    assert!(rep.max_deviation < 1e-8);
}

#[test]
fn minkowski_cylinder_is_not_photon_surface() {
    let st = StaticSpacetime::new(RadialProfile::minkowski());
    let cyl = Hypersurface::cylinder(&st, 3.0);
    let seeds = tangent_null_seeds(&cyl, 8, 5).unwrap();
    let short = tangency_persistence(&cyl, &seeds, 10.0, &TraceOptions::default()).unwrap();
    let long = tangency_persistence(&cyl, &seeds, 100.0, &TraceOptions::default()).unwrap();
    // a tangent straight line reaches r = sqrt(r0² + λ²)
    assert!((long.max_deviation - ((9.0f64 + 1e4).sqrt() - 3.0)).abs() < 1e-6);
    assert!(long.max_deviation > 8.0 * short.max_deviation);
}

#[test]
fn minkowski_radial_ray_is_straight() {
    let st = StaticSpacetime::new(RadialProfile::minkowski());
    let t = integrate_null(&st, &start(2.0, 1.0, [1.0, 0.0, 0.0]), 50.0, &TraceOptions::default()).unwrap();
    for s in &t.samples {
        assert!((s.position.r - 2.0 - s.affine).abs() < 1e-9);
    }
    let v = energy_constancy_verdict(&t, 1e-9);
    assert!(v.constant && v.agrees_with_lapse);
}

#[test]
fn radial_ray_energy_law() {
    let st = StaticSpacetime::schwarzschild(1.0);
    // ṙ = −1 gives C = N²ṫ = 1, so r = 10 − λ
    let t = integrate_null(&st, &start(10.0, 1.2, [-1.0, 0.0, 0.0]), 5.0, &TraceOptions::default()).unwrap();
    assert_eq!(t.status, IntegrationStatus::Completed);
    let last = t.last().unwrap();
    assert!((last.position.r - 5.0).abs() < 1e-8);
    assert!(t.energy_lapse_drift() < 1e-8);
    let ratio = t.energies.last().unwrap() / t.energies[0];
    assert!((ratio - (0.8f64 / 0.6).sqrt()).abs() < 1e-8);
    assert!((ratio - 1.15470).abs() < 1e-5);
    assert!((t.c_estimate - 1.0).abs() < 1e-12);
    let v = energy_constancy_verdict(&t, 1e-9);
    assert!(!v.constant && v.agrees_with_lapse && v.lapse_variation > 0.01);
}

#[test]
fn photon_orbit_energy_constant() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let t = integrate_null(&st, &start(3.0, 1.0, [0.0, 0.1, 0.2]), 100.0, &TraceOptions::default()).unwrap();
    let (_, sd) = crate::linalg::mean_std(&t.energies);
    assert!(sd < 1e-8);
    let v = energy_constancy_verdict(&t, 1e-9);
    assert!(v.constant && v.agrees_with_lapse, "{v:?}");
    assert!(t.angular_momentum_drift() < 1e-8);
    assert!(t.max_null_residual() < 1e-9);
}

#[test]
fn static_observer_energy_unwinds_definition() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let s = GeodesicState {
        position: ChartPoint::new(0.0, 4.0, 1.0, 0.0).unwrap(),
        velocity: [2.0, 0.0, 0.0, 0.0],
        affine: 0.0,
    };
    let e = observed_energy(&s, &st).unwrap();
    assert_eq!(e.energy, -(0.5f64).sqrt() * 2.0);
    assert_eq!(e.frequency, e.energy);
}

#[test]
fn time_reversal_returns_to_start() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let s0 = start(6.0, 1.1, [0.3, 0.05, 0.07]);
    let fw = integrate_null(&st, &s0, 40.0, &TraceOptions::default()).unwrap();
    let end = *fw.last().unwrap();
    let bw = integrate_null(&st, &end, 0.0, &TraceOptions::default()).unwrap();
    let back = bw.last().unwrap();
    let (a, b) = (back.position, s0.position);
    assert!((back.affine).abs() < 1e-12);
    assert!((a.t - b.t).abs() < 1e-6 && (a.r - b.r).abs() < 1e-6 && (a.theta - b.theta).abs() < 1e-6);
    let dphi = (a.phi - b.phi + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    assert!(dphi.abs() < 1e-6);
}

#[test]
fn infalling_ray_stops_at_horizon() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let t = integrate_null(&st, &start(4.0, 1.0, [-1.0, 0.0, 0.0]), 50.0, &TraceOptions::default()).unwrap();
    assert!(matches!(t.status, IntegrationStatus::DomainExit(_)), "{:?}", t.status);
    assert!(t.last().unwrap().position.r < 2.001);
}

#[test]
fn seeds_need_a_cylinder() {
    let st = StaticSpacetime::schwarzschild(1.0);
    assert!(tangent_null_seeds(&Hypersurface::sphere(&st, 3.0), 4, 0).is_err());
    assert!(null_project(&st, &ChartPoint::new(0.0, 3.0, 1.0, 0.0).unwrap(), &[0.0, 1.0, 0.0, 0.0]).is_err());
}

#[test]
fn csv_dump() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let t = integrate_null(&st, &start(3.0, 1.0, [0.0, 0.0, 0.2]), 1.0, &TraceOptions::default()).unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "lambda,t,r,theta,phi,vt,vr,vtheta,vphi,null_residual,energy");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 11);
    let r: f64 = row[2].parse().unwrap();
    assert_eq!(r, 3.0);
    assert_eq!(row[2], "3.0000000000000000e0");
    assert_eq!(csv.lines().count(), t.samples.len() + 1);
}

#[test]
fn seeds_are_deterministic() {
    let st = StaticSpacetime::schwarzschild(1.0);
    let cyl = Hypersurface::cylinder(&st, 3.0);
    let a = tangent_null_seeds(&cyl, 6, 42).unwrap();
    let b = tangent_null_seeds(&cyl, 6, 42).unwrap();
    assert_eq!(a, b);
    let g = |s: &GeodesicState| {
        let m = st.metric4(&s.position.coords());
        dot4(&m, &s.velocity, &s.velocity)
    };
    assert!(a.iter().all(|s| g(s).abs() < 1e-12 && s.velocity[0] > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conserved_quantities(r in 3.5f64..30.0, th in 0.4f64..2.7, vr in -0.3f64..0.3,
                            vth in -0.05f64..0.05, vph in 0.01f64..0.08) {
        let st = StaticSpacetime::schwarzschild(1.0);
        let t = integrate_null(&st, &start(r, th, [vr, vth, vph]), 60.0, &TraceOptions::default()).unwrap();
        prop_assert!(t.energy_lapse_drift() < 1e-8);
        prop_assert!(t.angular_momentum_drift() < 1e-8 * t.angular_momenta[0].abs().max(1.0));
        prop_assert!(t.max_null_residual() < 1e-9);
        prop_assert!(t.samples.windows(2).all(|w| w[1].affine > w[0].affine));
    }
}
