//! Validation of a digit map against the theorem premises, the Pan (e, b)
//! condition, and the construction of a digit g certifying that the Pan
//! condition implies the m* hypothesis.

use serde::Serialize;
use thiserror::Error;

use crate::map::DigitMap;
use crate::nt;

#[derive(Debug, Error)]
pub enum HypothesesError {
    #[error("the Pan condition fails for e={e}, b={b}; no digit g is guaranteed to exist")]
    PanConditionFails { e: u64, b: u64 },
    #[error("base must be at least 3 to construct g, got {0}")]
    BaseTooSmall(u64),
    #[error("arithmetic overflow while building the certificate for e={e}, b={b}")]
    Overflow { e: u64, b: u64 },
}

/// Outcome of checking the four theorem premises on a digit map.
#[derive(Clone, Debug, Serialize)]
pub struct PremiseReport {
    pub ok: bool,
    pub f0_ok: bool,
    pub f1_ok: bool,
    pub gcd_b_ok: bool,
    /// f(b-1), the modulus every congruence below runs over.
    pub f_top: u64,
    /// Digits m with gcd(|f*(m) - m|, f(b-1)) = 1, ascending.
    pub m_star_candidates: Vec<u64>,
    pub failures: Vec<String>,
}

impl PremiseReport {
    /// Smallest admissible m*, if any.
    pub fn m_star(&self) -> Option<u64> {
        self.m_star_candidates.first().copied()
    }
}

pub fn check_premises(map: &DigitMap) -> PremiseReport {
    let b = map.base();
    let f_top = map.top_digit_value();
    let f0_ok = map.digit_value(0) == 0;
    let f1_ok = map.digit_value(1) == 1;
    let gcd_b_ok = nt::gcd(b, f_top) == 1;
    let m_star_candidates: Vec<u64> = (0..b)
        .filter(|&m| {
            let fm = map.digit_value(m);
            let diff = fm.abs_diff(m);
            // gcd(0, q) = q: fixed digits qualify only when f(b-1) = 1
            nt::gcd(diff, f_top) == 1
        })
        .collect();
    let mut failures = Vec::new();
    if !f0_ok {
        failures.push(format!("f*(0) = {}, expected 0", map.digit_value(0)));
    }
    if !f1_ok {
        failures.push(format!("f*(1) = {}, expected 1", map.digit_value(1)));
    }
    if !gcd_b_ok {
        failures.push(format!(
            "gcd(b, f(b-1)) = gcd({b}, {f_top}) = {} > 1",
            nt::gcd(b, f_top)
        ));
    }
    if m_star_candidates.is_empty() {
        failures.push(format!(
            "no digit m with gcd(|f*(m) - m|, {f_top}) = 1"
        ));
    }
    let ok = f0_ok && f1_ok && gcd_b_ok && !m_star_candidates.is_empty();
    PremiseReport {
        ok,
        f0_ok,
        f1_ok,
        gcd_b_ok,
        f_top,
        m_star_candidates,
        failures,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PanPrimeFact {
    pub p: u64,
    pub p_minus_1: u64,
    pub divides_e_minus_1: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PanReport {
    pub e: u64,
    pub b: u64,
    pub holds: bool,
    pub primes: Vec<PanPrimeFact>,
}

/// For every prime p | b-1, does p-1 fail to divide e-1? Vacuously true
/// when b-1 has no prime divisors.
pub fn pan_condition(e: u64, b: u64) -> PanReport {
    let primes: Vec<PanPrimeFact> = nt::factorize(b - 1)
        .into_iter()
        .map(|(p, _)| PanPrimeFact {
            p,
            p_minus_1: p - 1,
            divides_e_minus_1: (e - 1) % (p - 1) == 0,
        })
        .collect();
    let holds = primes.iter().all(|f| !f.divides_e_minus_1);
    PanReport { e, b, holds, primes }
}

#[derive(Clone, Debug, Serialize)]
pub struct GFactorStep {
    pub p: u64,
    pub alpha: u32,
    /// (b-1) / p^alpha
    pub cofactor: u64,
    pub generator: u64,
    pub g_i: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GCertificate {
    pub e: u64,
    pub b: u64,
    pub g: u64,
    pub steps: Vec<GFactorStep>,
    /// g^e mod p != g mod p for every prime p | b-1.
    pub per_prime_ok: bool,
    /// gcd(f(g) - g, f(b-1)) = 1 under the power map.
    pub gcd_ok: bool,
}

impl GCertificate {
    pub fn verified(&self) -> bool {
        self.per_prime_ok && self.gcd_ok
    }
}

/// Builds the digit g from the prime factorization of b-1: for each p_i,
/// g = generator of U(p_i) times the inverse of (b-1)/p_i^alpha_i mod p_i,
/// glued by CRT-style summation and reduced mod b-1.
pub fn construct_g(e: u64, b: u64) -> Result<GCertificate, HypothesesError> {
    if b < 3 {
        return Err(HypothesesError::BaseTooSmall(b));
    }
    let pan = pan_condition(e, b);
    if !pan.holds {
        return Err(HypothesesError::PanConditionFails { e, b });
    }
    let factors = nt::factorize(b - 1);
    let mut steps = Vec::new();
    let mut g: u64 = 0;
    for (p, alpha) in &factors {
        let cofactor = (b - 1) / p.pow(*alpha);
        let generator = nt::primitive_root(*p).unwrap();
        let inv = nt::mod_inverse(cofactor % p, *p).unwrap();
        let g_i = generator * inv % p;
        g = (g + cofactor
            .checked_mul(g_i)
            .ok_or(HypothesesError::Overflow { e, b })?)
            % (b - 1);
        steps.push(GFactorStep {
            p: *p,
            alpha: *alpha,
            cofactor,
            generator,
            g_i,
        });
    }
    // Certificate: g^e != g mod each p_i, and under the power map
    // gcd(f(g) - g, f(b-1)) = 1.
    let per_prime_ok = factors
        .iter()
        .all(|(p, _)| nt::mod_pow(g, e, *p) != g % p);
    let e32 = u32::try_from(e).map_err(|_| HypothesesError::Overflow { e, b })?;
    let f_g = g
        .checked_pow(e32)
        .ok_or(HypothesesError::Overflow { e, b })?;
    let f_top = (b - 1)
        .checked_pow(e32)
        .ok_or(HypothesesError::Overflow { e, b })?;
    let gcd_ok = nt::gcd(f_g.abs_diff(g), f_top) == 1;
    Ok(GCertificate {
        e,
        b,
        g,
        steps,
        per_prime_ok,
        gcd_ok,
    })
}
