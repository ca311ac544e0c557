//! Prime enumeration, arithmetic functions of the level, and the analytic
//! constants (γ, ϖ₀, ζ and prime-zeta values) the rest of the crate consumes.
//!
//! Constants are computed, not hard-coded, so the test suite can cross-check
//! them against independent oracles.

use crate::{Error, Result};

/// All primes up to a limit, in increasing order.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.primes.iter()
    }
}

/// Plain (bit-packed) sieve of Eratosthenes for limits that fit in memory.
fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate().skip(2) {
        if !c {
            primes.push(i as u64);
        }
    }
    primes
}

/// Segment size for the segmented extension (numbers per segment).
const SEGMENT: u64 = 1 << 21;

/// Threshold above which the segmented sieve takes over.
const SIMPLE_LIMIT: u64 = 10_000_000;

/// Enumerate all primes `p ≤ limit`.
///
/// Uses a flat sieve up to 10⁷ and a segmented sieve beyond, so memory stays
/// bounded by the segment size plus the output.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Domain(format!(
            "prime enumeration needs limit ≥ 2, got {limit}"
        )));
    }
    if limit <= SIMPLE_LIMIT {
        return Ok(PrimeTable {
            limit,
            primes: simple_sieve(limit),
        });
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut primes = base.clone();
    let mut lo = root + 1;
    let mut flags = vec![false; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        flags[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= hi {
                flags[(j - lo) as usize] = true;
                j += p;
            }
        }
        for (off, &c) in flags[..len].iter().enumerate() {
            if !c {
                primes.push(lo + off as u64);
            }
        }
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

/// Euler–Mascheroni constant γ via the Euler–Maclaurin expansion of H_n.
///
/// Accurate to well below 1e-14 (n = 10⁴ with corrections through n⁻⁸).
pub fn euler_gamma() -> f64 {
    let n = 10_000u64;
    // Kahan-compensated harmonic number.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for k in 1..=n {
        let term = 1.0 / k as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let nf = n as f64;
    let n2 = nf * nf;
    sum - nf.ln() - 0.5 / nf + 1.0 / (12.0 * n2) - 1.0 / (120.0 * n2 * n2)
        + 1.0 / (252.0 * n2 * n2 * n2)
}

/// Riemann ζ(s) for real s ≥ 2, by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s >= 2.0, "zeta implemented for s ≥ 2 only");
    if s > 55.0 {
        // ζ(s) − 1 ≈ 2^{−s}(1 + (3/2)^{−s} + …): two terms suffice.
        return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
    }
    let m = 32u64;
    let mf = m as f64;
    let mut sum = 0.0;
    for n in 1..m {
        sum += (n as f64).powf(-s);
    }
    let tail = mf.powf(1.0 - s) / (s - 1.0) + 0.5 * mf.powf(-s);
    // Bernoulli corrections: B₂/2!·s·M^{−s−1}, B₄/4!·s(s+1)(s+2)·M^{−s−3}, …
    let c1 = s * mf.powf(-s - 1.0) / 12.0;
    let c2 = s * (s + 1.0) * (s + 2.0) * mf.powf(-s - 3.0) / 720.0;
    let c3 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * mf.powf(-s - 5.0) / 30240.0;
    sum + tail + c1 - c2 + c3
}

/// Möbius function for the small arguments used by [`prime_zeta`].
fn moebius(mut k: u64) -> i32 {
    let mut mu = 1i32;
    let mut d = 2u64;
    while d * d <= k {
        if k % d == 0 {
            k /= d;
            if k % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if k > 1 {
        mu = -mu;
    }
    mu
}

/// Prime zeta P(s) = Σ_p p^{−s} for real s ≥ 2, via
/// P(s) = Σ_{k≥1} μ(k) log ζ(ks) / k.
pub fn prime_zeta(s: f64) -> f64 {
    assert!(s >= 2.0, "prime_zeta implemented for s ≥ 2 only");
    let mut total = 0.0;
    let mut k = 1u64;
    loop {
        let ks = k as f64 * s;
        // log ζ(ks) ≤ 2·2^{−ks}; stop when it cannot matter.
        if ks > 64.0 {
            break;
        }
        let mu = moebius(k);
        if mu != 0 {
            let lz = if ks > 55.0 {
                (2f64.powf(-ks) + 3f64.powf(-ks)).ln_1p()
            } else {
                zeta(ks).ln()
            };
            total += mu as f64 * lz / k as f64;
        }
        k += 1;
    }
    total
}

/// Tail Σ_{p > limit} p^{−s} of the prime zeta beyond the primes of `table`.
///
/// `table` must enumerate all primes up to its limit; `s ≥ 2`.
pub fn prime_zeta_tail(s: f64, table: &PrimeTable) -> f64 {
    let mut partial = 0.0;
    // Sum smallest terms first (largest primes) for rounding hygiene.
    for &p in table.primes.iter().rev() {
        partial += (p as f64).powf(-s);
    }
    let diff = prime_zeta(s) - partial;
    // For large s the true tail sinks below the rounding noise of the
    // subtraction (P(8) − Σ_{p≤10⁴} cancels 30 digits in a 16-digit type);
    // returning that noise poisons anything multiplied by a large
    // coefficient. Switch to the prime-counting integral
    // ∫_X^∞ t^{−s} dt/log t = E₁((s−1)·log X) with its asymptotic
    // expansion — whenever this branch is reachable y ≥ 20, so three
    // correction terms leave only a relative error far below the noise
    // threshold that triggered the switch.
    if diff <= 1e3 * f64::EPSILON * partial {
        let x = table.limit as f64;
        let y = (s - 1.0) * x.ln();
        let series = 1.0 - 1.0 / y + 2.0 / (y * y) - 6.0 / (y * y * y);
        return x.powf(1.0 - s) / y * series;
    }
    diff
}

/// Mertens' constant ϖ₀, defined by Σ_{p≤t} 1/p = log log t + ϖ₀ + o(1).
///
/// Computed as γ + Σ_p [log(1−1/p) + 1/p], with the sum over p > 10⁴
/// completed exactly through prime-zeta values:
/// Σ_{p>P} [log(1−1/p)+1/p] = −Σ_{ν≥2} R_ν(P)/ν where R_ν is the prime-zeta
/// tail. The scheme is accurate to ~1e-14; `tol` below 1e-12 is refused.
pub fn mertens_constant(tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if tol < 1e-12 {
        return Err(Error::Precision(format!(
            "mertens_constant is configured for absolute error ≤ 1e-12; {tol:e} requested"
        )));
    }
    let table = primes_up_to(10_000)?;
    let mut partial = Vec::with_capacity(table.len());
    for &p in table.iter() {
        let x = 1.0 / p as f64;
        partial.push((-x).ln_1p() + x);
    }
    let head = crate::quad::pairwise_sum(&partial);
    let mut tail = 0.0;
    for nu in 2..=60u32 {
        let r = prime_zeta_tail(nu as f64, &table);
        if r < 1e-18 {
            break;
        }
        tail -= r / nu as f64;
    }
    Ok(euler_gamma() + head + tail)
}

/// Factorization data of a squarefree level N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub n: u64,
    pub prime_factors: Vec<u64>,
    pub phi: u64,
    /// Least prime factor P⁻(N); `u64::MAX` encodes ∞ for N = 1.
    pub least_prime: u64,
}

/// Factor a squarefree level and compute φ(N) and P⁻(N).
pub fn level_profile(n: u64) -> Result<LevelProfile> {
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= rest {
        if rest % d == 0 {
            rest /= d;
            if rest % d == 0 {
                return Err(Error::NotSquarefree(n));
            }
            factors.push(d);
        }
        d += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    let phi = factors.iter().map(|p| p - 1).product();
    let least_prime = factors.first().copied().unwrap_or(u64::MAX);
    Ok(LevelProfile {
        n,
        prime_factors: factors,
        phi,
        least_prime,
    })
}

/// Membership in the admissible level set: N squarefree with
/// P⁻(N) ≥ Ξ·log(kN)·log log(kN). N = 1 belongs for every even k.
pub fn level_set_member(n: u64, k: u64, xi: f64) -> Result<bool> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Domain(format!("weight k must be even and ≥ 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::Domain("level must be positive".into()));
    }
    let profile = match level_profile(n) {
        Ok(p) => p,
        Err(Error::NotSquarefree(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if n == 1 {
        return Ok(true);
    }
    let kn = (k as f64) * (n as f64);
    let bound = xi * kn.ln() * kn.ln().ln();
    Ok(profile.least_prime as f64 >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(primes_up_to(10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap().primes, vec![2]);
        let t = primes_up_to(100).unwrap();
        assert_eq!(t.len(), 25);
        assert_eq!(*t.primes.last().unwrap(), 97);
        assert!(primes_up_to(1).is_err());
    }

    #[test]
    fn segmented_agrees_with_simple() {
        // Force the segmented path by a tiny fake threshold: instead compare
        // counts around the real threshold using known π(x) values.
        let t = primes_up_to(10_000_000).unwrap();
        assert_eq!(t.len(), 664_579); // π(10⁷)
        let seg = primes_up_to(10_100_000).unwrap();
        assert!(seg.primes.starts_with(&t.primes));
        assert_eq!(seg.len(), 670_820); // π(1.01·10⁷)
    }

    #[test]
    fn gamma_value() {
        assert!((euler_gamma() - 0.5772156649015329).abs() < 1e-14);
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-13);
        assert!((zeta(4.0) - pi.powi(4) / 90.0).abs() < 1e-13);
        assert!((zeta(60.0) - 1.0 - 2f64.powf(-60.0)).abs() < 1e-16);
    }

    #[test]
    fn moebius_small() {
        let want = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(moebius(i as u64 + 1), w, "mu({})", i + 1);
        }
    }

    #[test]
    fn level_profiles() {
        let p1 = level_profile(1).unwrap();
        assert_eq!(p1.phi, 1);
        assert_eq!(p1.least_prime, u64::MAX);
        let p6 = level_profile(6).unwrap();
        assert_eq!(p6.prime_factors, vec![2, 3]);
        assert_eq!(p6.phi, 2);
        assert!(matches!(level_profile(4), Err(Error::NotSquarefree(4))));
    }

    #[test]
    fn level_set_examples() {
        assert!(level_set_member(1, 2, 5.0).unwrap());
        assert!(level_set_member(1, 100, 100.0).unwrap());
        assert!(!level_set_member(4, 2, 1.0).unwrap());
        assert!(level_set_member(1_000_003, 2, 1.0).unwrap());
        assert!(level_set_member(6, 3, 1.0).is_err()); // odd k
    }
}
