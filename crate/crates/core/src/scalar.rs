//! Exact scalar arithmetic.
//!
//! Every computation in this crate is an identity check at zero tolerance, so
//! the only scalar type is the arbitrary-precision rational. Values are kept
//! in reduced form with positive denominator by the underlying library, which
//! makes structural equality semantic equality.

use num::bigint::BigInt;
use num::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, the sole scalar of the crate.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Fraction `n/d`. Panics when `d == 0`.
pub fn ratq(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^e` as a rational, for graded sign bookkeeping.
pub fn sign_pow(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Binomial coefficient as a rational; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = BigInt::one();
    let k = k.min(n - k);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rat::from_integer(acc)
}

/// Canonical text form: `p` for integers, `p/q` otherwise, with any sign on
/// the numerator.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical text form produced by [`fmt_rat`].
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Formats a coefficient-with-sign prefix for term lists: `+ 2`, `- 1/3`.
pub fn fmt_signed_coeff(r: &Rat) -> (bool, String) {
    (r.is_negative(), fmt_rat(&r.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_match_pascal() {
        for n in 0..12u64 {
            for k in 0..=n {
                let lhs = binomial(n + 1, k + 1);
                let rhs = binomial(n, k) + binomial(n, k + 1);
                assert_eq!(lhs, rhs, "Pascal at ({n},{k})");
            }
        }
        assert_eq!(binomial(6, 3), rat(20));
        assert_eq!(binomial(4, 7), rat(0));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["0", "5", "-7", "3/4", "-21/35", "10/2"] {
            let r = parse_rat(s).unwrap();
            let t = fmt_rat(&r);
            assert_eq!(parse_rat(&t).unwrap(), r);
        }
        assert_eq!(fmt_rat(&parse_rat("-21/35").unwrap()), "-3/5");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }

    #[test]
    fn sign_pow_alternates() {
        assert_eq!(sign_pow(0), rat(1));
        assert_eq!(sign_pow(3), rat(-1));
        assert_eq!(sign_pow(-1), rat(-1));
        assert_eq!(sign_pow(-4), rat(1));
    }
}
