/// Two-sided normal quantile at 95%.
pub const Z95: f64 = 1.959964;

/// Wilson score interval for `k` failures in `n` shots.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n >= 1 && k <= n, "need 0 <= k <= n and n >= 1");
    let (ki, ni) = (k, n);
    let (k, n) = (k as f64, n as f64);
    let z2 = z * z;
    let center = (k + z2 / 2.0) / (n + z2);
    let half = z * (k * (n - k) / n + z2 / 4.0).sqrt() / (n + z2);
    let lo = if ki == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if ki == ni {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
