//! Quadrature rules, interpolation and the entire functions
//! `(e^{zt} - 1)/z` that appear in every Duhamel kernel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    /// Composite rule over `panels` equal sub-intervals of `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * h;
                self.on(lo, lo + h).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex64) -> Complex64 {
    let em1 = libm::expm1(z.re);
    let (s, c) = (libm::sin(z.im), libm::cos(z.im));
    let half = libm::sin(0.5 * z.im);
    // e^x cos y - 1 = expm1(x) cos y - 2 sin²(y/2)
    Complex64::new(em1 * c - 2.0 * half * half, (em1 + 1.0) * s)
}

/// Below this `|σ|` the kernel `(e^{σt} - 1)/σ` switches to its Taylor series.
pub const SMALL_DENOMINATOR: f64 = 1e-8;

/// `(e^{zt} - 1)/z`, continued by `t` at `z = 0`.
pub fn phi1(z: Complex64, t: f64) -> Complex64 {
    if z.norm() < SMALL_DENOMINATOR {
        // t + z t²/2 + z² t³/6
        return Complex64::new(t, 0.0) + z * (t * t / 2.0) + z * z * (t * t * t / 6.0);
    }
    cexpm1(z * t) / z
}

/// `d/dz (e^{zt} - 1)/z`.
pub fn phi1_derivative(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < 0.1 {
        // Σ_{n≥1} n z^{n-1} t^{n+1} / (n+1)!
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        let mut tp = t * t;
        let mut fact = 2.0;
        for n in 1..30 {
            let term = zp * (n as f64 * tp / fact);
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
            zp *= z;
            tp *= t;
            fact *= (n + 2) as f64;
        }
        return sum;
    }
    (zt * zt.exp() - cexpm1(zt)) / (z * z)
}

/// Divided difference `(g(a) - g(b))/(a - b)` of `g(z) = (e^{zt}-1)/z`.
///
/// When `|a - b| t` is small the direct quotient cancels, so the difference
/// is written as `∫_0^1 g'(b + θ(a-b)) dθ` and integrated by Gauss-Legendre.
pub fn phi1_divided_difference(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    let d = a - b;
    if d.norm() * t > 0.5 {
        return (phi1(a, t) - phi1(b, t)) / d;
    }
    gl8_unit()
        .map(|(th, w)| phi1_derivative(b + d * th, t) * w)
        .sum()
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss-Legendre on `[0, 1]`.
fn gl8_unit() -> impl Iterator<Item = (f64, f64)> {
    GL8_NODES.iter().zip(GL8_WEIGHTS.iter()).flat_map(|(x, w)| {
        [(0.5 - 0.5 * x, 0.5 * w), (0.5 + 0.5 * x, 0.5 * w)]
    })
}

/// Lagrange weights for evaluating the interpolant through `nodes` at `x`.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(1.0, |acc, (_, xj)| acc * (x - xj) / (xi - xj))
        })
        .collect()
}

/// Barycentric weights for a fixed node set.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            1.0 / nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(1.0, |acc, (_, xj)| acc * (xi - xj))
        })
        .collect()
}

/// Values `ℓ_j(x)` of the Lagrange basis via the barycentric formula.
pub fn barycentric_basis(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    if let Some(hit) = nodes.iter().position(|&n| n == x) {
        let mut out = vec![0.0; nodes.len()];
        out[hit] = 1.0;
        return out;
    }
    let terms: Vec<f64> = nodes.iter().zip(bary).map(|(n, w)| w / (x - n)).collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}

/// Composite Simpson on uniform samples; an odd number of intervals closes
/// with the 3/8 rule. Two samples fall back to the trapezoid.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) { (n - 1, false) } else { (n - 4, true) };
            let mut s = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = if simpson_end == 0 { 0.0 } else { s * h / 3.0 };
            if tail {
                let k = simpson_end;
                total += 3.0 * h / 8.0
                    * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
            }
            total
        }
    }
}

/// Chebyshev-Lobatto points on `[0, T]`, increasing.
pub fn chebyshev_lobatto(n: usize, t_final: f64) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|j| 0.5 * t_final * (1.0 - libm::cos(PI * j as f64 / (n - 1) as f64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 8, 16] {
            let gl = GaussLegendre::new(n);
            assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let approx = gl.integrate(-1.0, 1.0, |x| libm::pow(x, deg as f64));
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn tabulated_rule_matches_newton() {
        let gl = GaussLegendre::new(8);
        let mut tab: Vec<(f64, f64)> = gl8_unit().collect();
        tab.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for ((x, w), (y, v)) in gl.on(0.0, 1.0).zip(tab) {
            assert!((x - y).abs() < 1e-15 && (w - v).abs() < 1e-15);
        }
    }

    #[test]
    fn phi1_limits_and_continuity() {
        let t = 0.3;
        assert_eq!(phi1(Complex64::new(0.0, 0.0), t), Complex64::new(t, 0.0));
        let tiny = Complex64::new(1e-9, -2e-9);
        let small = Complex64::new(1.1e-8, 0.0);
        assert!((phi1(tiny, t) - t).norm() < 1e-9);
        assert!((phi1(small, t) - (t + 1.1e-8 * t * t / 2.0)).norm() < 1e-15);
        let z = Complex64::new(-3.0, 7.0);
        let direct = ((z * t).exp() - 1.0) / z;
        assert!((phi1(z, t) - direct).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let t = 0.7;
        for z in [Complex64::new(0.05, 0.02), Complex64::new(-2.0, 3.0), Complex64::new(10.0, -1.0)] {
            let h = 1e-6;
            let fd = (phi1(z + h, t) - phi1(z - h, t)) / (2.0 * h);
            let d = phi1_derivative(z, t);
            assert!((fd - d).norm() < 1e-7 * (1.0 + d.norm()), "{z}");
        }
    }

    #[test]
    fn divided_difference_agrees_across_branches() {
        let t = 1.0;
        let b = Complex64::new(-1.0, 2.0);
        let a_far = b + Complex64::new(0.6, 0.0);
        let a_near = b + Complex64::new(0.4, 0.0);
        let direct_near = (phi1(a_near, t) - phi1(b, t)) / (a_near - b);
        assert!((phi1_divided_difference(a_near, b, t) - direct_near).norm() < 1e-13);
        assert_eq!(phi1_divided_difference(a_far, b, t), (phi1(a_far, t) - phi1(b, t)) / (a_far - b));
        let same = phi1_divided_difference(b, b, t);
        assert!((same - phi1_derivative(b, t)).norm() < 1e-14);
    }

    #[test]
    fn simpson_integrates_cubics() {
        for n in [3usize, 4, 5, 8, 11] {
            let h = 1.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| {
                let x = i as f64 * h;
                x * x * x - x + 2.0
            }).collect();
            assert!((simpson_uniform(&v, h) - (0.25 - 0.5 + 2.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let nodes = chebyshev_lobatto(9, 2.0);
        let bary = barycentric_weights(&nodes);
        let f = |x: f64| 3.0 * x * x * x * x - x + 1.0;
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        for x in [0.0, 0.123, 1.5, 2.0] {
            let basis = barycentric_basis(&nodes, &bary, x);
            let interp: f64 = basis.iter().zip(&vals).map(|(b, v)| b * v).sum();
            assert!((interp - f(x)).abs() < 1e-12);
        }
        let lw = lagrange_weights(&[0.0, 1.0, 2.0, 3.0], 1.5);
        assert!((lw.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
