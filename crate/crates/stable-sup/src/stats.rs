//! Small statistical helpers shared by the verification suites and tests.

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    assert!(n >= 2.0);
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov–Smirnov distance sup_x |F_n(x) − G_m(x)|.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        // advance both sides past the current value so ties move F and G
        // together before the gap is measured
        let v = a[i].min(b[j]);
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    // once a side is exhausted the gap can only shrink, so d is final
    d
}

/// Rejection threshold for the two-sample KS distance at significance level
/// 0.01: c(0.01)·sqrt((n+m)/(nm)) with c(0.01) = 1.628.
pub fn ks_threshold_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Fit r in mean_n ≈ C·n^{poly_degree}·rⁿ by OLS on log(mean_n/n^{poly_degree})
/// against n, keeping only levels with positive mean and relative standard
/// error at most 20%. Returns (r, number of levels used); r is NaN when
/// fewer than two levels survive the filter.
pub fn fit_geometric_rate(levels: &[(f64, f64, f64)], poly_degree: f64) -> (f64, usize) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(n, mean, stderr) in levels {
        if mean > 0.0 && stderr <= 0.2 * mean {
            xs.push(n);
            ys.push((mean / n.powf(poly_degree)).ln());
        }
    }
    if xs.len() < 2 {
        return (f64::NAN, xs.len());
    }
    let (slope, _) = ols_fit(&xs, &ys);
    (slope.exp(), xs.len())
}

/// Least-squares slope and intercept of y against x.
pub fn ols_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert!(x.len() == y.len() && x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
