//! Metric ratios evaluated without logarithms, by exact rearrangement and
//! binomial series in double-double arithmetic.

use twofloat::TwoFloat;

/// `√(1 - r_s/r)` in double-double.
pub fn proper_time_factor(r_s: f64, r: f64) -> f64 {
    let f = TwoFloat::from(1.0) - TwoFloat::from(r_s) / TwoFloat::from(r);
    f.sqrt().hi()
}

/// `u = f(r_a)/f(r_b) - 1 = r_s (r_a - r_b) / (r_a (r_b - r_s))`.
pub fn metric_ratio_minus_one(r_s: f64, r_a: f64, r_b: f64) -> f64 {
    r_s * (r_a - r_b) / (r_a * (r_b - r_s))
}

/// `(1 + u)^p - 1` by the binomial series; requires `|u| < 0.5`.
pub fn binomial_minus_one(u: f64, p: f64) -> f64 {
    assert!(u.abs() < 0.5, "series oracle needs |u| < 0.5");
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..400 {
        term *= (p - k as f64) / (k as f64 + 1.0) * u;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Redshift `Ω_B/Ω_A = √(f(r_a)/f(r_b))`.
pub fn redshift_ratio(r_s: f64, r_a: f64, r_b: f64) -> f64 {
    let u = metric_ratio_minus_one(r_s, r_a, r_b);
    (TwoFloat::from(1.0) + TwoFloat::from(binomial_minus_one(u, 0.5))).hi()
}

/// `δ = (f(r_a)/f(r_b))^{1/4} - 1`.
pub fn delta(r_s: f64, r_a: f64, r_b: f64) -> f64 {
    binomial_minus_one(metric_ratio_minus_one(r_s, r_a, r_b), 0.25)
}
