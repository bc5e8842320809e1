use crate::error::{check_hurst, check_positive, FbmError, Result};

/// `E[B_s B_t] = ½(s^{2H} + t^{2H} − |t−s|^{2H})` for one fBm component.
pub fn fbm_covariance(s: f64, t: f64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    for (name, v) in [("s", s), ("t", t)] {
        if !v.is_finite() || v < 0.0 {
            return Err(FbmError::InvalidParameter {
                name,
                value: v,
                constraint: "time must be non-negative",
            });
        }
    }
    Ok(covariance_unchecked(s, t, hurst))
}

#[inline]
pub(crate) fn covariance_unchecked(s: f64, t: f64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance at lag `k` of fractional Gaussian noise with step `dt`.
pub fn fgn_autocovariance(k: usize, hurst: f64, dt: f64) -> Result<f64> {
    check_hurst(hurst)?;
    check_positive("dt", dt)?;
    Ok(fgn_autocovariance_unchecked(k, hurst, dt))
}

#[inline]
pub(crate) fn fgn_autocovariance_unchecked(k: usize, hurst: f64, dt: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    let lag = |x: f64| x.abs().powf(h2);
    0.5 * dt.powf(h2) * (lag(k + 1.0) - 2.0 * lag(k) + lag(k - 1.0))
}
