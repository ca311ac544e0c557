//! Local symmetric power algebra against independent constructions:
//! complex-arithmetic local factors, brute-force power series, the
//! Chebyshev basis, and the divisor-function bound on μ.

use num_complex::Complex64;
use symlval::quad;
use symlval::symrep::{
    dz, local_factor_log, mu_coeff, power_series_coeffs, sym_trace,
};

/// log D via the defining complex product ∏_j (1 − e^{i(m−2j)θ} x)^{−1}.
fn local_factor_log_complex(m: u32, theta: f64, x: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=m {
        let a = m as f64 - 2.0 * j as f64;
        let eig = Complex64::new(0.0, a * theta).exp();
        acc -= (Complex64::new(1.0, 0.0) - eig * x).norm().ln();
    }
    acc
}

#[test]
fn local_factor_matches_complex_product() {
    for m in 1..=4u32 {
        for i in 0..10 {
            for j in 0..10 {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / 10.0;
                let x = 0.09 * (j as f64 + 0.5);
                let fast = local_factor_log(m, theta, x).unwrap();
                let slow = local_factor_log_complex(m, theta, x);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "m={m} θ={theta} x={x}: {fast} vs {slow}"
                );
            }
        }
    }
}

#[test]
fn chebyshev_orthogonality_under_module_quadrature() {
    // (2/π)∫₀^π sin((a+1)θ)sin((b+1)θ) dθ = δ_{ab}
    for a in 0..=10u32 {
        for b in a..=10u32 {
            let val = quad::adaptive(
                |th: f64| {
                    ((a as f64 + 1.0) * th).sin() * ((b as f64 + 1.0) * th).sin()
                        * (2.0 / std::f64::consts::PI)
                },
                0.0,
                std::f64::consts::PI,
                1e-12,
            )
            .unwrap();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((val - want).abs() < 1e-10, "a={a} b={b}: {val}");
        }
    }
}

/// Brute-force λ_m^{z,ν} by expanding D^z = ∏_j (1−e^{iaθ}x)^{−z} with the
/// generalized binomial series and convolving the m+1 factors.
fn lambda_bruteforce(m: u32, z: Complex64, theta: f64, nu_max: usize) -> Vec<Complex64> {
    let mut series = vec![Complex64::new(0.0, 0.0); nu_max + 1];
    series[0] = Complex64::new(1.0, 0.0);
    for j in 0..=m {
        let a = m as f64 - 2.0 * j as f64;
        let eig = Complex64::new(0.0, a * theta).exp();
        // (1−eig·x)^{−z} = Σ_k dz-style coefficient (z)_k/k!·eig^k x^k
        let mut factor = vec![Complex64::new(0.0, 0.0); nu_max + 1];
        let mut coef = Complex64::new(1.0, 0.0);
        factor[0] = coef;
        for k in 1..=nu_max {
            coef = coef * (z + (k as f64 - 1.0)) / k as f64 * eig;
            factor[k] = coef;
        }
        let mut next = vec![Complex64::new(0.0, 0.0); nu_max + 1];
        for s in 0..=nu_max {
            for t in 0..=(nu_max - s) {
                next[s + t] += series[s] * factor[t];
            }
        }
        series = next;
    }
    series
}

#[test]
fn power_series_matches_bruteforce_expansion() {
    let theta = 0.7;
    for (z, tol) in [
        (Complex64::new(2.0, 0.0), 1e-12),
        (Complex64::new(0.7, 0.3), 1e-12),
    ] {
        let got = power_series_coeffs(3, z, theta, 6).unwrap();
        let want = lambda_bruteforce(3, z, theta, 6);
        for nu in 0..=6 {
            assert!(
                (got.coeffs[nu] - want[nu]).norm() < tol,
                "ν={nu}: {} vs {}",
                got.coeffs[nu],
                want[nu]
            );
        }
    }
}

#[test]
fn lambda_reference_values() {
    // Frozen output of the brute-force expansion above at m=3, θ=0.7,
    // kept as a regression pin independent of both implementations.
    let got = power_series_coeffs(3, Complex64::new(2.0, 0.0), 0.7, 6).unwrap();
    let want = [
        1.0,
        1.039_984_330_738_525,
        -0.099_803_652_790_090,
        0.181_284_754_943_784,
        -0.867_605_913_001_465,
        -2.611_987_766_091_978,
        -0.749_928_671_561_342,
    ];
    for (nu, &w) in want.iter().enumerate() {
        assert!(
            (got.coeffs[nu].re - w).abs() < 1e-12 && got.coeffs[nu].im.abs() < 1e-14,
            "ν={nu}: {} vs {w}",
            got.coeffs[nu]
        );
    }

    let got = power_series_coeffs(3, Complex64::new(0.7, 0.3), 0.7, 6).unwrap();
    let want = [
        (1.0, 0.0),
        (0.363_994_515_758_484, 0.155_997_649_610_779),
        (-0.170_127_204_499_239, -0.039_305_814_602_601),
        (0.167_994_542_348_969, 0.038_752_934_406_436),
        (-0.429_089_065_910_421, -0.142_514_051_240_792),
        (-0.578_566_986_726_223, -0.346_363_250_414_429),
        (0.092_077_591_045_999, -0.012_474_511_537_894),
    ];
    for (nu, &(re, im)) in want.iter().enumerate() {
        let c = got.coeffs[nu];
        assert!(
            (c.re - re).abs() < 1e-12 && (c.im - im).abs() < 1e-12,
            "ν={nu}: {c}"
        );
    }
}

#[test]
fn power_series_multiplicative_in_z() {
    // D^{z₁}·D^{z₂} = D^{z₁+z₂}: coefficients convolve.
    let theta = 1.1;
    let z1 = Complex64::new(0.8, 0.0);
    let z2 = Complex64::new(1.4, -0.6);
    for m in 1..=4u32 {
        let c1 = power_series_coeffs(m, z1, theta, 10).unwrap();
        let c2 = power_series_coeffs(m, z2, theta, 10).unwrap();
        let c12 = power_series_coeffs(m, z1 + z2, theta, 10).unwrap();
        for nu in 0..=10usize {
            let conv: Complex64 = (0..=nu).map(|k| c1.coeffs[k] * c2.coeffs[nu - k]).sum();
            assert!(
                (conv - c12.coeffs[nu]).norm() < 1e-10,
                "m={m} ν={nu}: {conv} vs {}",
                c12.coeffs[nu]
            );
        }
    }
}

#[test]
fn mu_first_order_identity() {
    // μ_{m,ν'}^{z,1} = z·δ(ν'=m) to 1e-8.
    for m in 1..=4u32 {
        for z in [
            Complex64::new(0.5, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 1.0),
        ] {
            for nu_prime in 0..=(m as usize) {
                let mu = mu_coeff(m, z, 1, nu_prime).unwrap();
                let want = if nu_prime == m as usize { z } else { Complex64::new(0.0, 0.0) };
                assert!(
                    (mu - want).norm() < 1e-8,
                    "m={m} z={z} ν'={nu_prime}: {mu} vs {want}"
                );
            }
        }
    }
}

#[test]
fn mu_divisor_function_bound() {
    // Σ_{ν' ≤ mν} |μ_{m,ν'}^{z,ν}| ≤ d_{(m+1)|z|}(p^ν).
    for m in 1..=4u32 {
        for &zr in &[0.5, 1.0, 2.0, 3.5] {
            let z = Complex64::new(zr, 0.0);
            for nu in 1..=4usize {
                let total: f64 = (0..=(m as usize * nu))
                    .map(|np| mu_coeff(m, z, nu, np).unwrap().norm())
                    .sum();
                let bound = dz(Complex64::new((m as f64 + 1.0) * zr, 0.0), nu).re;
                assert!(
                    total <= bound + 1e-9,
                    "m={m} z={zr} ν={nu}: Σ|μ| = {total} > d = {bound}"
                );
            }
        }
    }
}

#[test]
fn trace_bound_and_symmetry_grid() {
    for m in 1..=4u32 {
        for i in 0..=400 {
            let theta = std::f64::consts::PI * i as f64 / 400.0;
            let t = sym_trace(m, theta);
            assert!(t.abs() <= m as f64 + 1.0 + 1e-12, "m={m} θ={theta}: {t}");
            // even orders are symmetric under θ ↦ π−θ
            if m % 2 == 0 {
                let mirror = sym_trace(m, std::f64::consts::PI - theta);
                assert!((t - mirror).abs() < 1e-12);
            }
        }
    }
}
