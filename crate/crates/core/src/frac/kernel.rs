//! The Volterra kernel `K_H(t, s)` representing fBm as `∫ K_H(t, s) dW_s`.
//!
//! For `H < 1/2`
//!
//! ```text
//! K_H(t,s) = c_H (t−s)^{H−1/2} + c_H (1/2−H) ∫_s^t (u−s)^{H−3/2} (1 − (s/u)^{1/2−H}) du
//! ```
//!
//! and for `H > 1/2`
//!
//! ```text
//! K_H(t,s) = c_H (H−1/2) s^{1/2−H} ∫_s^t (u−s)^{H−3/2} u^{H−1/2} du,
//! ```
//!
//! with `K_H(t,s) = 0` for `s >= t`. The substitution `u = s/x` turns both
//! inner integrals into `s^{H−1/2} F(s/t)` with a one-variable profile
//! `F(z) = ∫_z^1 φ(x) dx`; the profile and its companion
//! `P(z) = ∫_0^z φ(x) x^{H+1/2} dx` give closed forms for the per-cell
//! moments `∫_cell K_H(t,s) ds` used by simulation and by the `K_H`
//! transform. Both integrands have algebraic singularities at `x = 0` and
//! `x = 1`; each half of `[0, 1]` is integrated after a power substitution
//! that makes the integrand bounded.

use ndarray::Array2;

use crate::error::{check_hurst, check_positive, FbmError, Result};
use crate::quadrature::{GaussLegendre, TanhSinh};
use crate::sim::TimeGrid;
use crate::special::gamma;

/// Normalizing constant `c_H = √(2H Γ(3/2−H) / (Γ(H+1/2) Γ(2−2H)))`.
pub fn c_h(hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(c_h_unchecked(hurst))
}

pub(crate) fn c_h_unchecked(h: f64) -> f64 {
    (2.0 * h * gamma(1.5 - h) / (gamma(h + 0.5) * gamma(2.0 - 2.0 * h))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Rough,
    Brownian,
    Smooth,
}

/// Precomputed constants and quadrature rules for one Hurst index.
#[derive(Debug, Clone)]
pub struct KernelProfile {
    hurst: f64,
    c_h: f64,
    branch: Branch,
    cell_rule: GaussLegendre,
    point_rule: GaussLegendre,
}

impl KernelProfile {
    pub fn new(hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        let branch = if hurst < 0.5 {
            Branch::Rough
        } else if hurst > 0.5 {
            Branch::Smooth
        } else {
            Branch::Brownian
        };
        Ok(Self {
            hurst,
            c_h: c_h_unchecked(hurst),
            branch,
            cell_rule: GaussLegendre::new(16),
            point_rule: GaussLegendre::new(32),
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn c_h(&self) -> f64 {
        self.c_h
    }

    /// `K_H(t, s)` for `0 < s < t`, with `gap = t − s` supplied exactly.
    pub fn eval_with_gap(&self, t: f64, s: f64, gap: f64) -> f64 {
        if gap <= 0.0 {
            return 0.0;
        }
        let h = self.hurst;
        match self.branch {
            Branch::Brownian => 1.0,
            _ if s <= 0.0 => f64::INFINITY,
            Branch::Rough => {
                let z = s / t;
                let zc = gap / t;
                let tail = self.phi_segment(z, 1.0, zc, 0.0, &self.point_rule);
                self.c_h * (gap.powf(h - 0.5) + (0.5 - h) * s.powf(h - 0.5) * tail)
            }
            Branch::Smooth => {
                let z = s / t;
                let zc = gap / t;
                let tail = self.phi_segment(z, 1.0, zc, 0.0, &self.point_rule);
                self.c_h * (h - 0.5) * s.powf(h - 0.5) * tail
            }
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        if s >= t {
            return 0.0;
        }
        self.eval_with_gap(t, s, t - s)
    }

    /// `∫_lo^hi φ(x) dx`, where `lo_c = 1 − lo` and `hi_c = 1 − hi`.
    fn phi_segment(&self, lo: f64, hi: f64, lo_c: f64, hi_c: f64, rule: &GaussLegendre) -> f64 {
        self.segment(lo, hi, lo_c, hi_c, rule, Profile::Tail)
    }

    /// `∫_lo^hi φ(x) x^{H+1/2} dx`.
    fn psi_segment(&self, lo: f64, hi: f64, lo_c: f64, hi_c: f64, rule: &GaussLegendre) -> f64 {
        self.segment(lo, hi, lo_c, hi_c, rule, Profile::Head)
    }

    fn segment(
        &self,
        lo: f64,
        hi: f64,
        lo_c: f64,
        hi_c: f64,
        rule: &GaussLegendre,
        which: Profile,
    ) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut acc = 0.0;
        if lo < 0.5 {
            acc += self.left_piece(lo, hi.min(0.5), rule, which);
        }
        if hi > 0.5 {
            let (from_c, to_c) = if lo < 0.5 { (0.5, hi_c) } else { (lo_c, hi_c) };
            acc += self.right_piece(from_c, to_c, rule, which);
        }
        acc
    }

    /// Piece inside `[0, 1/2]`, substituted so the `x → 0` behaviour is smooth.
    fn left_piece(&self, lo: f64, hi: f64, rule: &GaussLegendre, which: Profile) -> f64 {
        let h = self.hurst;
        match (self.branch, which) {
            (Branch::Rough, _) => {
                // x = w^q with q = 1/(1/2 − H), so x^{1/2−H} = w
                let a = 0.5 - h;
                let q = 1.0 / a;
                rule.integrate(lo.powf(a), hi.powf(a), |w| {
                    let x = w.powf(q);
                    let base = q * (1.0 - x).powf(h - 1.5) * (1.0 - w);
                    match which {
                        Profile::Tail => base,
                        Profile::Head => base * w.powf(q - 1.0),
                    }
                })
            }
            (Branch::Smooth, Profile::Tail) => {
                if lo <= 0.0 {
                    return f64::INFINITY;
                }
                // x = e^u
                rule.integrate(lo.ln(), hi.ln(), |u| {
                    let x = u.exp();
                    (1.0 - x).powf(h - 1.5) * x.powf(1.0 - 2.0 * h)
                })
            }
            (Branch::Smooth, Profile::Head) => {
                // x = w^q with q = 1/(3/2 − H)
                let e = 1.5 - h;
                let q = 1.0 / e;
                rule.integrate(lo.powf(e), hi.powf(e), |w| {
                    let x = w.powf(q);
                    q * (1.0 - x).powf(h - 1.5)
                })
            }
            (Branch::Brownian, _) => 0.0,
        }
    }

    /// Piece inside `[1/2, 1]`, parametrized by complements `1 − x`.
    fn right_piece(&self, from_c: f64, to_c: f64, rule: &GaussLegendre, which: Profile) -> f64 {
        let h = self.hurst;
        match self.branch {
            Branch::Rough => {
                // 1 − x = v^p with p = 1/(H + 1/2)
                let b = h + 0.5;
                let a = 0.5 - h;
                let p = 1.0 / b;
                rule.integrate(to_c.powf(b), from_c.powf(b), |v| {
                    let y = v.powf(p);
                    // (1 − x^{1/2−H}) / (1 − x), accurate as y → 0
                    let ratio = if y > 0.0 {
                        -(a * (-y).ln_1p()).exp_m1() / y
                    } else {
                        a
                    };
                    match which {
                        Profile::Tail => p * ratio * (1.0 - y).powf(-b),
                        Profile::Head => p * ratio,
                    }
                })
            }
            Branch::Smooth => {
                // 1 − x = v^p with p = 1/(H − 1/2)
                let e = h - 0.5;
                let p = 1.0 / e;
                rule.integrate(to_c.powf(e), from_c.powf(e), |v| {
                    let x = 1.0 - v.powf(p);
                    match which {
                        Profile::Tail => p * x.powf(-2.0 * h),
                        Profile::Head => p * x.powf(0.5 - h),
                    }
                })
            }
            Branch::Brownian => 0.0,
        }
    }

    /// Profile `F(z) = ∫_z^1 φ`.
    pub fn tail(&self, z: f64) -> f64 {
        self.phi_segment(z, 1.0, 1.0 - z, 0.0, &self.point_rule)
    }

    /// Companion `P(z) = ∫_0^z φ(x) x^{H+1/2} dx`.
    pub fn head(&self, z: f64) -> f64 {
        self.psi_segment(0.0, z, 1.0, 1.0 - z, &self.point_rule)
    }

    /// Per-cell moments `w[i-1][j-1] = ∫_{t_{j−1}}^{t_j} K_H(t_i, s) ds`.
    pub fn cell_weights(&self, grid: &TimeGrid) -> KernelWeights {
        let n = grid.steps();
        let dt = grid.dt();
        let h = self.hurst;
        let b = h + 0.5;
        let mut w = Array2::<f64>::zeros((n, n));
        if self.branch == Branch::Brownian {
            for i in 0..n {
                for j in 0..=i {
                    w[[i, j]] = dt;
                }
            }
            return KernelWeights {
                grid: *grid,
                profile: self.clone(),
                weights: w,
            };
        }
        let mut head = vec![0.0; n + 1];
        let mut tail = vec![0.0; n + 1];
        let mut cumulative = vec![0.0; n + 1];
        for i in 1..=n {
            let fi = i as f64;
            let z = |j: usize| j as f64 / fi;
            let zc = |j: usize| (i - j) as f64 / fi;
            head[0] = 0.0;
            for j in 1..=i {
                head[j] =
                    head[j - 1] + self.psi_segment(z(j - 1), z(j), zc(j - 1), zc(j), &self.cell_rule);
            }
            tail[i] = 0.0;
            for j in (1..i).rev() {
                tail[j] =
                    tail[j + 1] + self.phi_segment(z(j), z(j + 1), zc(j), zc(j + 1), &self.cell_rule);
            }
            cumulative[0] = 0.0;
            for j in 1..=i {
                cumulative[j] = (head[j] + z(j).powf(b) * tail[j]) / b;
            }
            let t = grid.time(i);
            let tb = t.powf(b);
            for j in 1..=i {
                let profile_part = tb * (cumulative[j] - cumulative[j - 1]);
                w[[i - 1, j - 1]] = match self.branch {
                    Branch::Rough => {
                        let k = (i - j) as f64;
                        let singular = dt.powf(b) * ((k + 1.0).powf(b) - k.powf(b)) / b;
                        self.c_h * (singular + (0.5 - h) * profile_part)
                    }
                    Branch::Smooth => self.c_h * (h - 0.5) * profile_part,
                    Branch::Brownian => unreachable!(),
                };
            }
        }
        KernelWeights {
            grid: *grid,
            profile: self.clone(),
            weights: w,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Profile {
    Tail,
    Head,
}

/// Lower-triangular matrix of cell moments of the kernel on a grid.
#[derive(Debug, Clone)]
pub struct KernelWeights {
    grid: TimeGrid,
    profile: KernelProfile,
    weights: Array2<f64>,
}

impl KernelWeights {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        Ok(KernelProfile::new(hurst)?.cell_weights(grid))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn hurst(&self) -> f64 {
        self.profile.hurst
    }

    pub fn profile(&self) -> &KernelProfile {
        &self.profile
    }

    /// `∫_{t_{j−1}}^{t_j} K_H(t_i, s) ds` for `1 <= j <= i <= n`.
    #[inline]
    pub fn moment(&self, i: usize, j: usize) -> f64 {
        self.weights[[i - 1, j - 1]]
    }

    /// Row of moments for time `t_i`, cells `1..=i`.
    pub fn row(&self, i: usize) -> &[f64] {
        let row = self.weights.row(i - 1).to_slice().expect("standard layout");
        &row[..i]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.weights
    }
}

/// Pointwise kernel `K_H(t, s)`; zero for `s >= t`, `+∞` at `s = 0 < t`
/// when `H ≠ 1/2`.
pub fn kernel_k(t: f64, s: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    for (name, v) in [("t", t), ("s", s)] {
        if !v.is_finite() || v < 0.0 {
            return Err(FbmError::InvalidParameter {
                name,
                value: v,
                constraint: "time must be non-negative",
            });
        }
    }
    Ok(KernelProfile::new(hurst)?.eval(t, s))
}

/// `∫_0^{min(t1,t2)} K_H(t1,u) K_H(t2,u) du`, integrated cell by cell over a
/// uniform partition with `cells` cells; the end cells use tanh-sinh to
/// absorb the kernel singularities.
pub fn kernel_covariance(t1: f64, t2: f64, hurst: f64, cells: usize) -> Result<f64> {
    check_positive("t1", t1)?;
    check_positive("t2", t2)?;
    let profile = KernelProfile::new(hurst)?;
    let (lo_t, hi_t) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let cells = cells.max(1);
    let width = lo_t / cells as f64;
    let ts = TanhSinh::with_tolerance(1e-10);
    let rule = GaussLegendre::new(16);
    let product = |u: f64, gap_lo: f64| {
        let gap_hi = (hi_t - lo_t) + gap_lo;
        profile.eval_with_gap(lo_t, u, gap_lo) * profile.eval_with_gap(hi_t, u, gap_hi)
    };
    let mut acc = 0.0;
    for c in 0..cells {
        let a = c as f64 * width;
        let b = if c + 1 == cells { lo_t } else { (c + 1) as f64 * width };
        if c == 0 || c + 1 == cells {
            acc += ts
                .integrate(a, b, |u, _, db| product(u, (lo_t - b) + db))
                .value;
        } else {
            acc += rule.integrate(a, b, |u| product(u, lo_t - u));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::covariance::covariance_unchecked;
    use approx::assert_relative_eq;

    #[test]
    fn c_h_values() {
        assert_relative_eq!(c_h(0.5).unwrap(), 1.0, max_relative = 1e-14);
        // direct Gamma evaluation (mpmath, 30 digits)
        assert_relative_eq!(c_h(0.25).unwrap(), 0.645_998_003_740_752, max_relative = 1e-12);
        let c = c_h(0.75).unwrap();
        assert!(c.is_finite() && c > 0.0);
        assert!(c_h(1.0).is_err());
    }

    #[test]
    fn kernel_simple_values() {
        assert_relative_eq!(kernel_k(1.0, 0.5, 0.5).unwrap(), 1.0);
        for h in [0.1, 0.25, 0.5, 0.75] {
            assert_eq!(kernel_k(0.5, 0.7, h).unwrap(), 0.0);
            assert_eq!(kernel_k(0.5, 0.5, h).unwrap(), 0.0);
        }
        assert!(kernel_k(1.0, 0.0, 0.25).unwrap().is_infinite());
        assert!(kernel_k(-1.0, 0.0, 0.25).is_err());
    }

    #[test]
    fn kernel_matches_direct_quadrature() {
        // mpmath (25 digits) on the defining integrals
        let cases = [
            (1.0, 0.5, 0.25, 0.820_322_623_764_752_8),
            (2.0, 0.1, 0.25, 0.81939627628447),
            (1.0, 0.999, 0.25, 3.633_016_682_901_712),
            (1.0, 0.3, 0.4, 0.928_885_337_612_034_4),
            (1.0, 0.01, 0.1, 1.7925214203033013),
            (1.0, 0.5, 0.75, 0.937_591_963_698_057_2),
        ];
        for (t, s, h, want) in cases {
            let got = kernel_k(t, s, h).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn cell_weights_sum_to_kernel_transform_of_one() {
        // Σ_j w_ij = ∫_0^{t_i} K(t_i, s) ds, cross-checked with tanh-sinh
        let grid = TimeGrid::new(1.0, 16).unwrap();
        for h in [0.1, 0.25, 0.4, 0.75] {
            let profile = KernelProfile::new(h).unwrap();
            let w = profile.cell_weights(&grid);
            for i in [1usize, 5, 16] {
                let t = grid.time(i);
                let sum: f64 = w.row(i).iter().sum();
                let direct = TanhSinh::with_tolerance(1e-10)
                    .integrate(0.0, t, |s, _, gap| profile.eval_with_gap(t, s, gap))
                    .value;
                assert_relative_eq!(sum, direct, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn cell_weight_matches_cell_quadrature() {
        let grid = TimeGrid::new(2.0, 10).unwrap();
        let profile = KernelProfile::new(0.25).unwrap();
        let w = profile.cell_weights(&grid);
        let ts = TanhSinh::with_tolerance(1e-11);
        for (i, j) in [(10, 1), (10, 4), (10, 10), (3, 2)] {
            let t = grid.time(i);
            let (a, b) = (grid.time(j - 1), grid.time(j));
            let direct = ts
                .integrate(a, b, |s, _, db| profile.eval_with_gap(t, s, (t - b) + db))
                .value;
            assert_relative_eq!(w.moment(i, j), direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn kernel_reproduces_covariance() {
        for h in [0.25, 0.4, 0.75] {
            let c = kernel_covariance(1.0, 2.0, h, 32).unwrap();
            assert_relative_eq!(c, covariance_unchecked(1.0, 2.0, h), max_relative = 1e-7);
            let v = kernel_covariance(0.7, 0.7, h, 32).unwrap();
            assert_relative_eq!(v, 0.7f64.powf(2.0 * h), max_relative = 1e-7);
        }
    }

    #[test]
    fn brownian_weights_are_cell_widths() {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let w = KernelWeights::new(0.5, &grid).unwrap();
        assert_eq!(w.moment(8, 3), grid.dt());
        assert_eq!(w.row(4).len(), 4);
    }
}
