//! One-dimensional rules used on leaves and across levels.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Chebyshev–Lobatto nodes `cos(jπ/n)`, j = 0..=n, mapped to [a, b] in ascending order.
pub fn lobatto_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let x = (PI * j as f64 / n as f64).cos();
            a + (b - a) * (1.0 - x) / 2.0
        })
        .collect()
}

/// Clenshaw–Curtis weights for the ascending nodes of [`lobatto_nodes`] on [a, b].
pub fn clenshaw_curtis(n: usize, a: f64, b: f64) -> Vec<f64> {
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = PI * j as f64 / nf;
        let mut s = 0.0;
        for k in 1..=n / 2 {
            let bk = if 2 * k == n { 1.0 } else { 2.0 };
            s += bk / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
        }
        let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = cj / nf * (1.0 - s);
    }
    // Symmetric rule, so reversing the node order leaves the weights unchanged.
    w.iter().map(|v| v * (b - a) / 2.0).collect()
}

/// Chebyshev differentiation matrix for the ascending nodes of [`lobatto_nodes`] on [a, b].
pub fn cheb_diff(n: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    let x: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let c = |j: usize| (if j == 0 || j == n { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[i][j] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
        // Negative-sum trick keeps derivatives of constants at zero.
        d[i][i] = -(0..=n).filter(|&j| j != i).map(|j| d[i][j]).sum::<f64>();
    }
    // Ascending order reverses x, and t = a + (b−a)(1−x)/2 gives d/dt = −2/(b−a) d/dx.
    let s = -2.0 / (b - a);
    (0..=n)
        .map(|i| (0..=n).map(|j| s * d[i][j]).collect())
        .collect()
}

/// Product rule on the unit sphere: Gauss–Legendre in cos θ, trapezoid in φ.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub theta: Vec<f64>,
    /// Weights in cos θ.
    pub theta_weights: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_weight: f64,
}

impl SphereRule {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        // Descending cos θ gives ascending θ.
        let theta = x.iter().rev().map(|c| c.acos()).collect();
        let theta_weights = w.into_iter().rev().collect();
        let phi = (0..n_phi).map(|j| 2.0 * PI * (j as f64 + 0.5) / n_phi as f64).collect();
        Self {
            theta,
            theta_weights,
            phi,
            phi_weight: 2.0 * PI / n_phi as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `k` as `(θ, φ, weight in dθ dφ)`. The weight includes the 1/sin θ from d(cos θ).
    pub fn node(&self, k: usize) -> (f64, f64, f64) {
        let (i, j) = (k / self.phi.len(), k % self.phi.len());
        let th = self.theta[i];
        (th, self.phi[j], self.theta_weights[i] * self.phi_weight / th.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "p={p}: {q} vs {exact}");
        }
        assert!(x.windows(2).all(|s| s[0] < s[1]));
    }

    #[test]
    fn clenshaw_curtis_matches_exp_integral() {
        let n = 16;
        let t = lobatto_nodes(n, 0.5, 3.0);
        let w = clenshaw_curtis(n, 0.5, 3.0);
        let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t.exp()).sum();
        assert!((q - (3f64.exp() - 0.5f64.exp())).abs() < 1e-12);
        assert!(t.windows(2).all(|s| s[0] < s[1]));
        assert_eq!(t[0], 0.5);
    }

    #[test]
    fn cheb_diff_differentiates_sine() {
        let n = 24;
        let t = lobatto_nodes(n, -1.0, 2.0);
        let d = cheb_diff(n, -1.0, 2.0);
        for i in 0..=n {
            let df: f64 = (0..=n).map(|j| d[i][j] * t[j].sin()).sum();
            assert!((df - t[i].cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn sphere_rule_area_and_moments() {
        let rule = SphereRule::new(12, 24);
        let mut area = 0.0;
        let mut z2 = 0.0;
        for k in 0..rule.len() {
            let (th, _, w) = rule.node(k);
            area += w * th.sin();
            z2 += w * th.sin() * th.cos().powi(2);
        }
        assert!((area - 4.0 * PI).abs() < 1e-13);
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
