//! Extremal constants: closed forms, frozen angle references, truncation
//! consistency, and the p²-decay of the extremal sums.

use std::f64::consts::PI;
use symlval::constants::{a_const, b_closed_form, b_const, extremal_angle};
use symlval::primes::primes_up_to;
use symlval::symrep::local_factor_log;
use symlval::Sign;

const E_GAMMA: f64 = 1.781_072_417_990_198;
const E_GAMMA_OVER_Z2: f64 = 1.082_762_193_260_924_6;
const E_GAMMA_OVER_Z2SQ: f64 = 0.658_240_482_146_223_4;

#[test]
fn closed_forms_match_reference_constants() {
    for m in 1..=4u32 {
        let c = b_closed_form(m, Sign::Plus).unwrap().unwrap();
        assert!((c - E_GAMMA).abs() < 1e-14, "m={m}: {c}");
    }
    let c = b_closed_form(1, Sign::Minus).unwrap().unwrap();
    assert!((c - E_GAMMA_OVER_Z2).abs() < 1e-14);
    let c = b_closed_form(3, Sign::Minus).unwrap().unwrap();
    assert!((c - E_GAMMA_OVER_Z2).abs() < 1e-14);
    let c = b_closed_form(2, Sign::Minus).unwrap().unwrap();
    assert!((c - E_GAMMA_OVER_Z2SQ).abs() < 1e-14);
    assert!(b_closed_form(4, Sign::Minus).unwrap().is_none());
}

#[test]
fn b_const_approaches_closed_forms_at_moderate_cutoff() {
    for m in 1..=4u32 {
        let c = b_const(m, Sign::Plus, 10_000, 1e-2).unwrap();
        assert!(
            (c.b - E_GAMMA).abs() < 1e-3,
            "m={m}: B⁺ = {} vs {E_GAMMA}",
            c.b
        );
        assert!(!c.warning);
    }
    let c = b_const(2, Sign::Minus, 10_000, 1e-2).unwrap();
    assert!((c.b - E_GAMMA_OVER_Z2SQ).abs() < 1e-3, "B₂⁻ = {}", c.b);
}

#[test]
fn b_const_numeric_only_case() {
    // B₄⁻ has no closed form; pin the numeric value.
    let c = b_const(4, Sign::Minus, 100_000, 1e-4).unwrap();
    assert!((c.b - 1.090_071_6).abs() < 1e-5, "B₄⁻ = {}", c.b);
}

#[test]
fn b_const_cutoff_consistency() {
    // Doubling the truncation must move B by less than the reported bound.
    for m in 1..=4u32 {
        let coarse = b_const(m, Sign::Plus, 10_000, 1.0).unwrap();
        let fine = b_const(m, Sign::Plus, 100_000, 1.0).unwrap();
        assert!(
            (coarse.b - fine.b).abs() <= coarse.tail_bound,
            "m={m}: |{} − {}| = {} > bound {}",
            coarse.b,
            fine.b,
            (coarse.b - fine.b).abs(),
            coarse.tail_bound
        );
    }
}

#[test]
fn order_four_minus_angles_are_prime_dependent() {
    // Frozen references from a high-resolution independent search. The
    // tolerance reflects the √ε localization plateau of value-based search.
    let cases = [
        (2u64, 0.950_383_983_732),
        (3, 0.944_178_411_318),
        (5, 0.935_495_608_040),
        (101, 0.913_313_041_939),
        (9973, 0.911_754_459_407),
    ];
    for &(p, want) in &cases {
        let got = extremal_angle(4, p, Sign::Minus).unwrap();
        assert!((got - want).abs() < 1e-6, "p={p}: θ = {got}, want {want}");
    }
    // p → ∞ limit is arccos(−1/4)/2; the sequence approaches it from above.
    let limit = (-0.25f64).acos() / 2.0;
    assert!((limit - 0.911_738_290_968_487_7).abs() < 1e-15);
    let far = extremal_angle(4, 9973, Sign::Minus).unwrap();
    let near = extremal_angle(4, 101, Sign::Minus).unwrap();
    assert!((far - limit).abs() < (near - limit).abs());
    // mirror symmetry: the search must return the smaller of the two
    // equivalent maxima (θ and π−θ)
    assert!(far < PI / 2.0);
}

#[test]
fn argmax_invariant_under_exponentiation() {
    // Maximizing log D and maximizing D itself give the same objective
    // value (the angles may differ within the flat-top plateau).
    for m in 1..=4u32 {
        for sign in [Sign::Plus, Sign::Minus] {
            let p = 17u64;
            let x = 1.0 / 17.0;
            let theta = extremal_angle(m, p, sign).unwrap();
            // golden search on D directly (monotone rescaling of log D)
            let f = |t: f64| sign.as_f64() * local_factor_log(m, t, x).unwrap();
            let mut best = f64::NEG_INFINITY;
            for i in 0..=40_000 {
                let t = PI * i as f64 / 40_000.0;
                best = best.max(f(t).exp());
            }
            let at_solution = f(theta).exp();
            // The search may never lose to the grid, and the grid can trail
            // the true maximum by at most O(spacing²) near a quadratic top.
            assert!(
                at_solution >= best - 1e-12 * best.abs().max(1.0),
                "m={m} {sign}: D(θ̂) = {at_solution} below grid best {best}"
            );
            assert!(
                at_solution - best <= 1e-7 * best.abs().max(1.0),
                "m={m} {sign}: D(θ̂) = {at_solution} too far above grid best {best}"
            );
        }
    }
}

#[test]
fn extremal_sum_decay_p_squared() {
    // p²·|±log D(p⁻¹, θ^±) − A^±/p| stays bounded: max over (10³,10⁴]
    // within a factor 2 of the max over [10², 10³].
    let table = primes_up_to(10_000).unwrap();
    for m in 1..=4u32 {
        for sign in [Sign::Plus, Sign::Minus] {
            let a = a_const(m, sign).unwrap();
            let g = |p: u64| -> f64 {
                let theta = extremal_angle(m, p, sign).unwrap();
                let ld = local_factor_log(m, theta, 1.0 / p as f64).unwrap();
                let pf = p as f64;
                pf * pf * (sign.as_f64() * ld - a / pf).abs()
            };
            let lo_max = table
                .iter()
                .filter(|&&p| (100..=1000).contains(&p))
                .map(|&p| g(p))
                .fold(0.0f64, f64::max);
            let hi_max = table
                .iter()
                .filter(|&&p| p > 1000)
                .map(|&p| g(p))
                .fold(0.0f64, f64::max);
            assert!(
                hi_max <= 2.0 * lo_max && hi_max >= lo_max / 2.0,
                "m={m} {sign}: window maxima {lo_max} vs {hi_max}"
            );
        }
    }
}
