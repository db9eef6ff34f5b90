//! Exact-rational helpers. All reported masses are `BigRational`s serialized
//! as `"num/den"` strings; floating point never enters an exact report.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Canonical `"num/den"` rendering, denominator always present.
pub fn rat_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn big_pow(base: u64, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

/// `1 / q^exp` as an exact rational.
pub fn q_pow_inv(q: u64, exp: usize) -> BigRational {
    BigRational::new(BigInt::one(), big_pow(q, exp))
}

pub fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub fn rat_zero() -> BigRational {
    BigRational::zero()
}

/// Lossless `f64` view for Monte Carlo comparisons only.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // good enough at desk scale: split into quotient and remainder
    let (q, rem) = num_integer::Integer::div_rem(n, d);
    let qf = q.to_string().parse::<f64>().unwrap_or(0.0);
    let remf = rem.to_string().parse::<f64>().unwrap_or(0.0);
    let df = d.to_string().parse::<f64>().unwrap_or(1.0);
    qf + remf / df
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let r = ratio(BigInt::from(4), BigInt::from(5));
        assert_eq!(rat_str(&r), "4/5");
        assert_eq!(parse_rat("4/5"), Some(r));
        assert_eq!(rat_str(&BigRational::new(4.into(), 4.into())), "1/1");
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn f64_view() {
        let r = ratio(BigInt::from(1), BigInt::from(1024));
        assert!((rat_to_f64(&r) - 0.0009765625).abs() < 1e-15);
    }
}
