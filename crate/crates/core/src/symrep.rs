//! Local algebra of the symmetric power classes sym^m[g(θ)]: traces, local
//! factors, power-series coefficients λ_m^{z,ν}, Chebyshev-expansion
//! coefficients μ_{m,ν'}^{z,ν}, the generalized divisor function d_z, and the
//! Sato–Tate measure (2/π)sin²θ dθ.

use crate::{check_order, quad, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Validate an angle θ ∈ [0, π].
fn check_angle(theta: f64) -> Result<f64> {
    if (0.0..=PI).contains(&theta) {
        Ok(theta)
    } else {
        Err(Error::Domain(format!("angle must lie in [0, π], got {theta}")))
    }
}

/// The positive angle multiples of the conjugate eigenvalue pairs
/// e^{±iaθ} in the spectrum of sym^m[g(θ)]. Even orders additionally
/// contain the fixed eigenvalue 1 (angle multiple 0), handled separately
/// wherever it matters.
pub fn positive_angle_multiples(m: u32) -> &'static [u32] {
    match m {
        1 => &[1],
        2 => &[2],
        3 => &[3, 1],
        4 => &[4, 2],
        _ => unreachable!("order validated to 1..=4"),
    }
}

/// tr(sym^m[g(θ)]) = Σ_{j=0}^m cos((m−2j)θ) = sin((m+1)θ)/sin θ.
///
/// The cosine-sum form is exact and branch-free at the removable
/// singularities θ ∈ {0, π} of the quotient form.
pub fn sym_trace(m: u32, theta: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=m {
        let a = m as f64 - 2.0 * j as f64;
        acc += (a * theta).cos();
    }
    acc
}

/// Same trace evaluated from c = cos θ by Chebyshev recurrences — used in
/// hot loops where θ itself is never materialized.
pub fn sym_trace_from_cos(m: u32, c: f64) -> f64 {
    let c2 = 2.0 * c * c - 1.0;
    match m {
        1 => 2.0 * c,
        2 => 1.0 + 2.0 * c2,
        3 => {
            let c3 = 2.0 * c * c2 - c;
            2.0 * c + 2.0 * c3
        }
        4 => {
            let c4 = 2.0 * c2 * c2 - 1.0;
            1.0 + 2.0 * c2 + 2.0 * c4
        }
        _ => unreachable!("order validated to 1..=4"),
    }
}

/// log D(x, sym^m[g(θ)]) = −Σ_{j=0}^m log|1 − e^{i(m−2j)θ} x|, grouped over
/// conjugate pairs so only real arithmetic is used:
/// each pair contributes −log(1 − 2x·cos(aθ) + x²), and even m contribute
/// an extra −log(1 − x) from the fixed eigenvalue.
pub fn local_factor_log(m: u32, theta: f64, x: f64) -> Result<f64> {
    check_order(m)?;
    check_angle(theta)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "local factor needs x ∈ [0, 1), got {x} (divergent at x ≥ 1)"
        )));
    }
    Ok(local_factor_log_from_cos(m, theta.cos(), x))
}

/// Unchecked hot-path form of [`local_factor_log`], parameterized by
/// c = cos θ. cos(aθ) for the needed multiples a is produced by Chebyshev
/// recurrences, so no trigonometric calls occur.
#[inline]
pub fn local_factor_log_from_cos(m: u32, c: f64, x: f64) -> f64 {
    let a = 1.0 + x * x;
    let b = 2.0 * x;
    let c2 = 2.0 * c * c - 1.0;
    // One ln of the product instead of one per factor: every factor lies in
    // [(1−x)², (1+x)²], so the product of at most three stays well inside
    // f64 range and the rounding difference is a few ulp.
    match m {
        1 => -(a - b * c).ln(),
        2 => -((a - b * c2) * (1.0 - x)).ln(),
        3 => {
            let c3 = 2.0 * c * c2 - c;
            -((a - b * c3) * (a - b * c)).ln()
        }
        4 => {
            let c4 = 2.0 * c2 * c2 - 1.0;
            -((a - b * c4) * (a - b * c2) * (1.0 - x)).ln()
        }
        _ => unreachable!("order validated to 1..=4"),
    }
}

/// Power-series coefficients λ_m^{z,ν} of D(x, sym^m[g(θ)])^z = Σ_ν λ x^ν.
#[derive(Debug, Clone)]
pub struct PowerSeriesCoeffs {
    pub m: u32,
    pub z: Complex64,
    pub theta: f64,
    /// coeffs[ν] = λ_m^{z,ν}[g(θ)] for ν = 0..=ν_max (real for real z).
    pub coeffs: Vec<Complex64>,
}

/// Compute λ_m^{z,ν} for ν = 0..=nu_max by the exp-of-series recurrence
/// applied to z·log D: with log D = Σ_{ν≥1} tr(sym^m[g(νθ)]) x^ν/ν,
/// ν·λ_ν = z·Σ_{j=1}^{ν} tr(sym^m[g(jθ)])·λ_{ν−j}.
pub fn power_series_coeffs(
    m: u32,
    z: Complex64,
    theta: f64,
    nu_max: usize,
) -> Result<PowerSeriesCoeffs> {
    check_order(m)?;
    check_angle(theta)?;
    // tr(sym^m[g(θ)]^j) = tr(sym^m[g(jθ)]): the eigenvalues are e^{i(m−2l)jθ}.
    let traces: Vec<f64> = (1..=nu_max)
        .map(|j| sym_trace(m, (j as f64 * theta).rem_euclid(2.0 * PI)))
        .collect();
    let mut coeffs = Vec::with_capacity(nu_max + 1);
    coeffs.push(Complex64::new(1.0, 0.0));
    for nu in 1..=nu_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=nu {
            acc += traces[j - 1] * coeffs[nu - j];
        }
        coeffs.push(acc * z / nu as f64);
    }
    Ok(PowerSeriesCoeffs { m, z, theta, coeffs })
}

/// Chebyshev-expansion coefficient
/// μ_{m,ν'}^{z,ν} = (2/π)∫₀^π λ_m^{z,ν}[g(θ)]·sin((ν'+1)θ)·sin θ dθ,
/// computed by adaptive Gauss–Legendre quadrature.
pub fn mu_coeff(m: u32, z: Complex64, nu: usize, nu_prime: usize) -> Result<Complex64> {
    check_order(m)?;
    if nu_prime > m as usize * nu {
        return Err(Error::Domain(format!(
            "nu_prime must lie in [0, m·nu] = [0, {}], got {nu_prime}",
            m as usize * nu
        )));
    }
    // For odd m every trace obeys tr(j(π−θ)) = (−1)^j tr(jθ), so the
    // recurrence gives λ^{z,ν}(π−θ) = (−1)^ν λ^{z,ν}(θ), while the weight
    // sin((ν'+1)θ)·sinθ picks up (−1)^{ν'}. When ν+ν' is odd the integrand
    // is antisymmetric about π/2 and the coefficient vanishes identically
    // (quadrature would only chase cancellation noise there).
    if m % 2 == 1 && (nu + nu_prime) % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let kp = (nu_prime + 1) as f64;
    let integrand = |theta: f64| -> Complex64 {
        let lam = lambda_at(m, z, theta, nu);
        lam * ((kp * theta).sin() * theta.sin() * (2.0 / PI))
    };
    // 1e-9 rather than machine-level: |λ| reaches (|z|(m+1))^ν/ν!, and the
    // coefficient extraction cancels most of it, so node roundoff leaves a
    // floor that a tighter relative criterion can never settle below.
    quad::adaptive_c(integrand, 0.0, PI, 1e-9)
}

/// λ_m^{z,ν}[g(θ)] alone (the last coefficient of the recurrence).
pub(crate) fn lambda_at(m: u32, z: Complex64, theta: f64, nu: usize) -> Complex64 {
    let traces: Vec<f64> = (1..=nu)
        .map(|j| sym_trace(m, (j as f64 * theta).rem_euclid(2.0 * PI)))
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); nu + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for n in 1..=nu {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            acc += traces[j - 1] * coeffs[n - j];
        }
        coeffs[n] = acc * z / n as f64;
    }
    coeffs[nu]
}

/// Generalized divisor function at prime powers:
/// d_z(p^ν) = ∏_{j=0}^{ν−1} (z+j)/(j+1), the coefficient of ζ(s)^z.
pub fn dz(z: Complex64, nu: usize) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for j in 0..nu {
        v *= (z + j as f64) / (j as f64 + 1.0);
    }
    v
}

/// Sato–Tate CDF F(θ) = (θ − sin θ cos θ)/π on [0, π].
pub fn sato_tate_cdf(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    Ok((theta - theta.sin() * theta.cos()) / PI)
}

/// Inverse Sato–Tate CDF, solved to 1e-12 by bisection-safeguarded Newton.
///
/// Near the endpoints the CDF degenerates cubically; the initial guess
/// θ ≈ (3πu/2)^{1/3} (and its mirror) keeps Newton in its contraction
/// region, and any step leaving the current bracket falls back to bisection.
pub fn sato_tate_inverse(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("CDF probe must lie in [0,1], got {u}")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(PI);
    }
    let mut theta = if u < 0.1 {
        (1.5 * PI * u).cbrt()
    } else if u > 0.9 {
        PI - (1.5 * PI * (1.0 - u)).cbrt()
    } else {
        PI * u
    };
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..200 {
        let f = (theta - theta.sin() * theta.cos()) / PI - u;
        if f > 0.0 {
            hi = theta;
        } else {
            lo = theta;
        }
        if f.abs() < 1e-16 || hi - lo < 1e-14 {
            break;
        }
        let deriv = 2.0 * theta.sin().powi(2) / PI;
        let step = f / deriv;
        let next = theta - step;
        theta = if step.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(theta)
}
