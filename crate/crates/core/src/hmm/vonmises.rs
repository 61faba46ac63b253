//! Von Mises density and concentration estimation.

use std::f64::consts::PI;

/// Below this argument Bessel functions use the power series, above it the
/// large-argument expansion.
const SERIES_LIMIT: f64 = 20.0;

/// `I_nu(x) * exp(-x)` for `nu` in `{0, 1}` and `x >= 0`.
pub fn bessel_i_scaled(nu: u32, x: f64) -> f64 {
    debug_assert!(nu <= 1 && x >= 0.0);
    if x <= SERIES_LIMIT {
        let half = x / 2.0;
        let q = half * half;
        let mut term = if nu == 0 { 1.0 } else { half };
        let mut sum = term;
        for k in 1..500 {
            let k = k as f64;
            term *= q / (k * (k + nu as f64));
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        let mu = 4.0 * (nu * nu) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut prev = f64::INFINITY;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
            if term.abs() >= prev || term.abs() < 1e-17 {
                break;
            }
            sum += term;
            prev = term.abs();
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// `ln I_0(kappa)`.
pub fn log_i0(kappa: f64) -> f64 {
    bessel_i_scaled(0, kappa).ln() + kappa
}

/// Mean resultant length of a von Mises distribution, `I_1(k) / I_0(k)`.
pub fn mean_resultant_length(kappa: f64) -> f64 {
    if kappa <= 0.0 {
        return 0.0;
    }
    bessel_i_scaled(1, kappa) / bessel_i_scaled(0, kappa)
}

pub fn von_mises_logpdf(mu: f64, kappa: f64, theta: f64) -> f64 {
    kappa * ((theta - mu).cos() - 1.0) - (2.0 * PI).ln() - bessel_i_scaled(0, kappa).ln()
}

/// Concentration whose mean resultant length is `r_bar`: the rational
/// approximation `r(2 - r^2) / (1 - r^2)` polished by up to five Newton steps,
/// capped at `kappa_cap`.
pub fn estimate_kappa(r_bar: f64, kappa_cap: f64) -> f64 {
    if r_bar <= 0.0 {
        return 0.0;
    }
    if r_bar >= 1.0 {
        return kappa_cap;
    }
    let r2 = r_bar * r_bar;
    let mut kappa = r_bar * (2.0 - r2) / (1.0 - r2);
    if kappa >= kappa_cap {
        return kappa_cap;
    }
    for _ in 0..5 {
        let a = mean_resultant_length(kappa);
        let f = a - r_bar;
        if f.abs() < 1e-14 {
            break;
        }
        let slope = 1.0 - a / kappa - a * a;
        if slope <= 0.0 {
            break;
        }
        kappa = (kappa - f / slope).clamp(1e-12, kappa_cap);
    }
    kappa.min(kappa_cap)
}
