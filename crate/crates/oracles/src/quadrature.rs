//! Adaptive Gauss-Kronrod (7/15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over `[a, b]` until the summed Kronrod-minus-Gauss error
/// falls below `rel_tol · |I|`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Integral {
    let mut parts = vec![(a, b, kronrod(&f, a, b))];
    loop {
        let value: f64 = parts.iter().map(|p| p.2 .0).sum();
        let error: f64 = parts.iter().map(|p| p.2 .1).sum();
        if error <= rel_tol * value.abs() || parts.len() >= MAX_INTERVALS {
            return Integral {
                value,
                error,
                intervals: parts.len(),
            };
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("at least one interval");
        let (lo, hi, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        parts.push((lo, mid, kronrod(&f, lo, mid)));
        parts.push((mid, hi, kronrod(&f, mid, hi)));
    }
}

/// `∫_{-∞}^{∞} f(center + scale·v) scale dv` through `v = t/(1 - t²)`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, center: f64, scale: f64, rel_tol: f64) -> Integral {
    let g = |t: f64| {
        let w = 1.0 - t * t;
        let v = t / w;
        let jac = (1.0 + t * t) / (w * w);
        let y = f(center + scale * v);
        if y == 0.0 {
            0.0
        } else {
            y * jac * scale
        }
    };
    integrate(g, -1.0, 1.0, rel_tol)
}

/// `ln ∫ F_A(Ω) F_B(Ω) dΩ` for a normalized Gaussian `F_A` (peak `R σ`,
/// width `σ`) and a normalized `F_B` with peak and width both multiplied by
/// `s = 1 + scale_minus_one`.
///
/// Works in `u = (Ω - Ω_A)/σ`, where the integrand is
/// `(2π)^{-1/2} s^{-1/2} exp(g(u))`, `g = -u²/4 - ((u - c)/s)²/4`,
/// `c = R(s - 1)`. The exponent is shifted by its maximum so that
/// overlaps far below the f64 range still have a finite logarithm.
pub fn ln_scaled_overlap(peak_over_width: f64, scale_minus_one: f64, rel_tol: f64) -> f64 {
    let s = 1.0 + scale_minus_one;
    let c = peak_over_width * scale_minus_one;
    let g = |u: f64| {
        let w = (u - c) / s;
        -0.25 * u * u - 0.25 * w * w
    };
    // g is quadratic, so Newton lands on the peak in one step; the extra
    // passes clean up rounding.
    let dg = |u: f64| -0.5 * u - 0.5 * (u - c) / (s * s);
    let d2g = -0.5 - 0.5 / (s * s);
    let mut peak = 0.0;
    for _ in 0..3 {
        peak -= dg(peak) / d2g;
    }
    let g_max = g(peak);
    let width = (-1.0 / d2g).sqrt();
    let integral = integrate_real_line(|u| (g(u) - g_max).exp(), peak, width, rel_tol);
    integral.value.ln() + g_max - 0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * s.ln()
}

/// [`ln_scaled_overlap`] for the gravitational image of the packet, whose
/// frequencies scale by `(1 + δ)²`.
pub fn ln_redshifted_overlap(peak_over_width: f64, delta: f64, rel_tol: f64) -> f64 {
    ln_scaled_overlap(peak_over_width, delta * (2.0 + delta), rel_tol)
}

/// `∫ |F(Ω₀ + w)|² dw` for an amplitude given as a function of the offset
/// `w` from its peak. Offsets avoid the rounding of `Ω₀ + w` at optical
/// frequencies, which would otherwise limit the result to about 1e-9.
pub fn norm_from_offset<F: Fn(f64) -> f64>(amplitude_at_offset: F, sigma: f64, rel_tol: f64) -> f64 {
    integrate_real_line(
        |w| {
            let a = amplitude_at_offset(w);
            a * a
        },
        0.0,
        sigma,
        rel_tol,
    )
    .value
}

/// `∫ F(Ω)² dΩ` for `F = (2πσ²)^{-1/4} exp(-(Ω - Ω₀)²/(4σ²))`.
pub fn gaussian_norm(sigma: f64, rel_tol: f64) -> f64 {
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    norm_from_offset(
        |w| {
            let u = w / (2.0 * sigma);
            norm * (-u * u).exp()
        },
        sigma,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_exponentials() {
        let i = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14);
        assert!((i.value - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
        let i = integrate(f64::exp, 0.0, 1.0, 1e-14);
        assert!((i.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn gaussian_over_real_line() {
        let i = integrate_real_line(|x| (-x * x).exp(), 0.3, 1.0, 1e-13);
        assert!((i.value / std::f64::consts::PI.sqrt() - 1.0).abs() < 1e-12);
        for sigma in [1e-3, 1.0, 1e6] {
            assert!((gaussian_norm(sigma, 1e-13) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_packets_overlap_to_one() {
        assert!(ln_redshifted_overlap(1e5, 0.0, 1e-13).abs() < 1e-12);
    }
}
