//! Fixed Gauss–Legendre rules and double-exponential (tanh-sinh) quadrature.
//!
//! The tanh-sinh integrator hands the integrand both the abscissa and its
//! distances to the two endpoints. Integrands with algebraic endpoint
//! singularities such as `(x - y)^(α-1)` must use those distances rather
//! than recomputing `b - x`, which cancels catastrophically near `b`.

use std::f64::consts::FRAC_PI_2;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        let half = order.div_ceil(2);
        for i in 0..half {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Iterates over `(node, weight)` pairs mapped onto `[0, 1]`.
    pub fn unit_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Double-exponential quadrature on a finite interval.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub rel_tol: f64,
    pub max_level: u32,
    t_max: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            max_level: 9,
            t_max: 4.5,
        }
    }
}

impl TanhSinh {
    /// Runs every refinement level up to `level` without early exit, so the
    /// node set (and therefore linearity in the integrand) is fixed.
    pub fn fixed(level: u32) -> Self {
        Self {
            rel_tol: 0.0,
            max_level: level,
            ..Self::default()
        }
    }

    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f(x, x - a, b - x)` over `[a, b]`.
    pub fn integrate<F>(&self, a: f64, b: f64, mut f: F) -> QuadResult
    where
        F: FnMut(f64, f64, f64) -> f64,
    {
        let half = 0.5 * (b - a);
        if half == 0.0 {
            return QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 0,
            };
        }
        let mut evaluations = 0usize;
        let mut sample = |t: f64, evaluations: &mut usize| -> f64 {
            let u = FRAC_PI_2 * t.sinh();
            let cosh_u = u.cosh();
            let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
            // distance from the nearer endpoint, in units of the half width
            let comp = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
            let (x, da, db) = if u >= 0.0 {
                let db = half * comp;
                (b - db, 2.0 * half - db, db)
            } else {
                let da = half * comp;
                (a + da, da, 2.0 * half - da)
            };
            if da <= 0.0 || db <= 0.0 || w == 0.0 {
                return 0.0;
            }
            *evaluations += 1;
            let v = f(x, da, db);
            if v.is_finite() {
                w * v
            } else {
                0.0
            }
        };

        let mut h = 0.5;
        let mut sum = sample(0.0, &mut evaluations);
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > self.t_max {
                break;
            }
            sum += sample(t, &mut evaluations) + sample(-t, &mut evaluations);
            k += 1;
        }
        let mut estimate = sum * h * half;
        let mut error = f64::INFINITY;
        for _ in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1;
            loop {
                let t = k as f64 * h;
                if t > self.t_max {
                    break;
                }
                sum += sample(t, &mut evaluations) + sample(-t, &mut evaluations);
                k += 2;
            }
            let next = sum * h * half;
            error = (next - estimate).abs();
            estimate = next;
            if self.rel_tol > 0.0 && (error <= self.rel_tol * estimate.abs() || error < 1e-300) {
                break;
            }
        }
        QuadResult {
            value: estimate,
            error_estimate: error,
            evaluations,
        }
    }
}
