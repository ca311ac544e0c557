//! Extremal constants of the value distribution: the exponents A_m^±, the
//! per-prime extremal angles θ_{m,p}^±, the Euler-product constants B_m^±,
//! and the derived bound/extreme-value predictors.

use crate::primes::{self, PrimeTable};
use crate::symrep::local_factor_log_from_cos;
use crate::{check_order, quad, Error, Result, Sign};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// A_m^±, B_m^± and the metadata of the B computation for one (m, sign).
#[derive(Debug, Clone)]
pub struct ExtremalConstants {
    pub m: u32,
    pub sign: Sign,
    /// Exact extremal trace value A_m^±.
    pub a: f64,
    /// Euler-product constant B_m^±, from primes up to `cutoff` plus a
    /// fitted C/p² tail completion.
    pub b: f64,
    pub cutoff: u64,
    /// Heuristic bound on the absolute error of `b` from truncation.
    pub tail_bound: f64,
    /// Set when `tail_bound` exceeded the tolerance requested at build time.
    pub warning: bool,
}

/// Exact extremal values of ±tr(sym^m[g(θ)]): A_m^+ = m+1 for all m;
/// A_m^− = m+1 for odd m, A_2^− = 1, A_4^− = 5/4.
///
/// The returned rational is cross-checked at runtime against a grid search
/// of the trace, since downstream formulas use A inside exponents.
pub fn a_const(m: u32, sign: Sign) -> Result<f64> {
    check_order(m)?;
    let a = match (m, sign) {
        (_, Sign::Plus) => (m + 1) as f64,
        (1, Sign::Minus) | (3, Sign::Minus) => (m + 1) as f64,
        (2, Sign::Minus) => 1.0,
        (4, Sign::Minus) => 1.25,
        _ => unreachable!(),
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..=4096 {
        let theta = PI * i as f64 / 4096.0;
        best = best.max(sign.as_f64() * crate::symrep::sym_trace(m, theta));
    }
    if (best - a).abs() > 1e-6 {
        return Err(Error::Instability(format!(
            "grid extremum {best} of ±trace disagrees with exact A_{m}^{sign} = {a}"
        )));
    }
    Ok(a)
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, refined until
/// the bracket width drops below `xtol`. Returns the midpoint.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Number of coarse-grid intervals for the extremal-angle search.
const GRID: usize = 1024;

/// The angle θ_{m,p}^± at which D(p⁻¹, sym^m[g(θ)]) is maximized (sign +)
/// or minimized (sign −) over [0, π].
///
/// A 1024-interval coarse grid captures every basin (the objectives for
/// m = 3, 4 have several local extrema, and for m = 4 the objective is
/// exactly symmetric under θ → π−θ, so minima come in equal pairs); ties
/// are broken toward the smallest angle, then golden-section refinement
/// tightens the bracket to 1e-12.
pub fn extremal_angle(m: u32, p: u64, sign: Sign) -> Result<f64> {
    check_order(m)?;
    if p < 2 {
        return Err(Error::Domain(format!("p must be a prime ≥ 2, got {p}")));
    }
    let x = 1.0 / p as f64;
    let s = sign.as_f64();
    let objective = |theta: f64| s * local_factor_log_from_cos(m, theta.cos(), x);
    let mut values = [0.0f64; GRID + 1];
    let mut vmax = f64::NEG_INFINITY;
    for (i, v) in values.iter_mut().enumerate() {
        *v = objective(PI * i as f64 / GRID as f64);
        vmax = vmax.max(*v);
    }
    // Smallest-θ tie-break among near-ties (exact mirror minima for m = 4
    // differ only by rounding noise in cos).
    let tie = vmax - 1e-11 * (1.0 + vmax.abs());
    let best = values.iter().position(|&v| v >= tie).expect("max exists");
    let lo = PI * best.saturating_sub(1) as f64 / GRID as f64;
    let hi = PI * (best + 1).min(GRID) as f64 / GRID as f64;
    Ok(golden_max(objective, lo, hi, 1e-12))
}

/// Compute B_m^± from primes up to `cutoff`:
/// B = exp{ϖ₀ + A⁻¹ Σ_{p≤cutoff} (±log D(p⁻¹, θ_{m,p}^±) − A/p) + A⁻¹·tail},
/// where the summand is Θ(p⁻²), the tail is completed by a fitted C/p²
/// model (C estimated on p ∈ [cutoff/2, cutoff]) times the exact prime-zeta
/// remainder, and `tail_bound` reflects the spread of the fit.
///
/// `tol` only controls the `warning` flag; the computation itself always runs.
pub fn b_const(m: u32, sign: Sign, cutoff: u64, tol: f64) -> Result<ExtremalConstants> {
    check_order(m)?;
    if cutoff < 1_000 {
        return Err(Error::Domain(format!(
            "B-constant cutoff must be ≥ 10³, got {cutoff}"
        )));
    }
    let a = a_const(m, sign)?;
    let table = primes_up_to_cached(cutoff)?;
    let s = sign.as_f64();
    // Per-prime extremal summands, computed independently (parallel map with
    // deterministic output order).
    let summands: Vec<(u64, f64)> = table
        .primes
        .par_iter()
        .map(|&p| {
            let theta = extremal_angle(m, p, sign).expect("validated inputs");
            let x = 1.0 / p as f64;
            let g = s * local_factor_log_from_cos(m, theta.cos(), x) - a * x;
            (p, g)
        })
        .collect();
    let values: Vec<f64> = summands.iter().map(|&(_, g)| g).collect();
    let head = quad::pairwise_sum(&values);

    // Fit the tail constant C in g_p ≈ C/p² on the top half of the range.
    let window: Vec<f64> = summands
        .iter()
        .filter(|&&(p, _)| p >= cutoff / 2)
        .map(|&(p, g)| (p as f64) * (p as f64) * g)
        .collect();
    if window.len() < 8 {
        return Err(Error::Precision(
            "too few primes in the tail-fit window; increase cutoff".into(),
        ));
    }
    let c_bar = window.iter().sum::<f64>() / window.len() as f64;
    let spread = window
        .iter()
        .map(|w| (w - c_bar).abs())
        .fold(0.0f64, f64::max);
    let r2 = primes::prime_zeta_tail(2.0, &table);

    let mertens = primes::mertens_constant(1e-10)?;
    let b = (mertens + (head + c_bar * r2) / a).exp();
    let tail_bound = b * 4.0 * spread * r2 / a + b * 1e-14;
    Ok(ExtremalConstants {
        m,
        sign,
        a,
        b,
        cutoff,
        tail_bound,
        warning: tail_bound > tol,
    })
}

/// Closed-form reference for B_m^± where one exists:
/// B_m^+ = e^γ for all m; B_1^− = B_3^− = e^γ/ζ(2); B_2^− = e^γ/ζ(2)².
/// B_4^− has no known closed form (None).
pub fn b_closed_form(m: u32, sign: Sign) -> Result<Option<f64>> {
    check_order(m)?;
    let eg = primes::euler_gamma().exp();
    Ok(match (m, sign) {
        (_, Sign::Plus) => Some(eg),
        (1, Sign::Minus) | (3, Sign::Minus) => Some(eg / primes::zeta(2.0)),
        (2, Sign::Minus) => Some(eg / primes::zeta(2.0).powi(2)),
        (4, Sign::Minus) => None,
        _ => unreachable!(),
    })
}

/// Shared prime tables for repeated B computations at standard cutoffs.
fn primes_up_to_cached(limit: u64) -> Result<std::sync::Arc<PrimeTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, std::sync::Arc<PrimeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("prime cache poisoned");
    if let Some(t) = guard.get(&limit) {
        return Ok(t.clone());
    }
    let t = std::sync::Arc::new(primes::primes_up_to(limit)?);
    guard.insert(limit, t.clone());
    Ok(t)
}

/// Default cutoff for cached B constants used by the predictors.
pub const B_DEFAULT_CUTOFF: u64 = 100_000;

/// B_m^± at the default cutoff, computed once and cached.
pub fn b_const_cached(m: u32, sign: Sign) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, Sign), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&b) = cache.lock().expect("B cache poisoned").get(&(m, sign)) {
        return Ok(b);
    }
    let b = b_const(m, sign, B_DEFAULT_CUTOFF, 1e-6)?.b;
    cache.lock().expect("B cache poisoned").insert((m, sign), b);
    Ok(b)
}

fn check_weight_level(k: u64, n: u64) -> Result<f64> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Domain(format!("weight k must be even and ≥ 2, got {k}")));
    }
    primes::level_profile(n)?;
    Ok((k as f64) * (n as f64))
}

/// Predicted extreme value (B_m^± log log kN)^{±A_m^±}.
///
/// Requires kN > e so that log log kN is positive (the formula's own domain
/// of definition; weight-12 level-1 forms with kN = 12 are admissible).
pub fn extreme_value_prediction(m: u32, sign: Sign, k: u64, n: u64) -> Result<f64> {
    let kn = check_weight_level(k, n)?;
    let ll = kn.ln().ln();
    if !(ll > 0.0) {
        return Err(Error::Domain(format!(
            "kN = {kn} too small: log log kN must be positive"
        )));
    }
    let a = a_const(m, sign)?;
    let b = b_const_cached(m, sign)?;
    Ok((b * ll).powf(sign.as_f64() * a))
}

/// GRH-conditional bracket
/// ((2B⁻ log log kN)^{−A⁻}, (2B⁺ log log kN)^{A⁺}) for L(1, sym^m f).
pub fn grh_bound_interval(m: u32, k: u64, n: u64) -> Result<(f64, f64)> {
    let kn = check_weight_level(k, n)?;
    let ll = kn.ln().ln();
    if !(ll > 0.0) {
        return Err(Error::Domain(format!(
            "kN = {kn} too small: log log kN must be positive"
        )));
    }
    let lower = (2.0 * b_const_cached(m, Sign::Minus)? * ll).powf(-a_const(m, Sign::Minus)?);
    let upper = (2.0 * b_const_cached(m, Sign::Plus)? * ll).powf(a_const(m, Sign::Plus)?);
    Ok((lower, upper))
}

/// Threshold T_{k,N} = log₂(kN) − log₃(kN) − log₄(kN) − c₁₁ up to which the
/// tail law is valid. Requires log₄(kN) > 0, i.e. kN > e^(e^e) ≈ 3.81·10⁶.
pub fn mv_threshold(k: u64, n: u64, c11: f64) -> Result<f64> {
    let kn = check_weight_level(k, n)?;
    let l2 = kn.ln().ln();
    let l3 = l2.ln();
    let l4 = l3.ln();
    if !(l4 > 0.0) {
        return Err(Error::Domain(format!(
            "kN = {kn} below the iterated-log guard (need log₄ kN > 0, kN > ~3.82e6)"
        )));
    }
    Ok(l2 - l3 - l4 - c11)
}

/// Main term (k−1)·φ(N)/12 of the size of the newform family H_k*(N).
pub fn family_size(k: u64, n: u64) -> Result<f64> {
    check_weight_level(k, n)?;
    let phi = primes::level_profile(n)?.phi;
    Ok((k as f64 - 1.0) * phi as f64 / 12.0)
}
