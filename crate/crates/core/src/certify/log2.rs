//! Rigorous bounds on base-2 logarithms as exact rationals. Quantities such
//! as `C_8 = C_7^{(K+1)/2}|D|^K` are far too large to write down, so the
//! bound tables work with upper bounds on their logarithms instead.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Slack added to every floating-point logarithm, far above its error.
const MARGIN: f64 = 1e-9;

/// Below `2^FLOOR` everything is rounded up to `2^FLOOR`.
pub const FLOOR: i64 = -1000;

fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `(top 53 bits, shift)` with `c ∈ [top·2^shift, (top+1)·2^shift)`.
fn split(c: &BigUint) -> (u64, u64) {
    let bits = c.bits();
    let shift = bits.saturating_sub(53);
    ((c >> shift).to_u64().expect("53 bits"), shift)
}

fn is_power_of_two(c: &BigUint) -> Option<u64> {
    let tz = c.trailing_zeros()?;
    (c.bits() == tz + 1).then_some(tz)
}

/// `u ≥ log2 c` for `c ≥ 1`.
pub fn upper(c: &BigUint) -> BigRational {
    assert!(!c.is_zero(), "log2 of zero");
    if let Some(e) = is_power_of_two(c) {
        return int(e);
    }
    let (top, shift) = split(c);
    let top = if shift == 0 { top as f64 } else { (top + 1) as f64 };
    int(shift) + from_f64(top.log2() + MARGIN)
}

/// `l ≤ log2 c` for `c ≥ 1`.
pub fn lower(c: &BigUint) -> BigRational {
    assert!(!c.is_zero(), "log2 of zero");
    if let Some(e) = is_power_of_two(c) {
        return int(e);
    }
    let (top, shift) = split(c);
    let l = (top as f64).log2() - MARGIN;
    int(shift) + from_f64(l.max(0.0))
}

pub fn upper_usize(c: usize) -> BigRational {
    upper(&BigUint::from(c))
}

pub fn lower_usize(c: usize) -> BigRational {
    lower(&BigUint::from(c))
}

/// Upper bound on `log2 q` for a positive rational `q`.
pub fn upper_ratio(q: &BigRational) -> BigRational {
    let n = q.numer().to_biguint().expect("positive");
    let d = q.denom().to_biguint().expect("positive");
    upper(&n) - lower(&d)
}

/// Exponents above this are not materialised by [`pow2_upper`].
pub const CEILING: i64 = 1 << 20;

/// A rational `v ≥ 2^u`. Exponents below [`FLOOR`] give `2^FLOOR`; `None`
/// when `u` exceeds [`CEILING`].
pub fn pow2_upper(u: &BigRational) -> Option<BigRational> {
    let floor = int(FLOOR);
    if u <= &floor {
        return Some(pow2_int(FLOOR));
    }
    if u > &int(CEILING) {
        return None;
    }
    let whole = u.floor().to_integer().to_i64().expect("between FLOOR and CEILING");
    if u.is_integer() {
        return Some(pow2_int(whole));
    }
    let frac = u - int(whole);
    let f = frac.to_f64().expect("in [0,1)");
    Some(pow2_int(whole) * from_f64((f.exp2() * (1.0 + MARGIN)).min(2.0)))
}

/// A rational `v ≤ 2^u`, zero when `u` is below [`FLOOR`].
pub fn pow2_lower(u: &BigRational) -> BigRational {
    if u <= &int(FLOOR) {
        return BigRational::zero();
    }
    if u.is_integer() {
        return pow2_int(u.to_integer().to_i64().expect("bounded"));
    }
    let whole = u.floor().to_integer().to_i64().expect("bounded");
    let frac = u - int(whole);
    let f = frac.to_f64().expect("in [0,1)");
    pow2_int(whole) * from_f64((f.exp2() * (1.0 - MARGIN)).max(1.0))
}

pub fn pow2_int(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Upper bound on `log2 Σ_i c_i 2^{u_i}` from upper bounds `u_i` and
/// multiplicities `c_i`. `None` for an empty sum.
pub fn sum_upper(terms: &[(BigUint, BigRational)]) -> Option<BigRational> {
    let max = terms.iter().filter(|(c, _)| !c.is_zero()).map(|(_, u)| u).max()?.clone();
    let total: BigRational = terms
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, u)| BigRational::from_integer(BigInt::from(c.clone())) * pow2_upper(&(u - &max)).expect("non-positive exponent"))
        .sum();
    Some(max + upper_ratio(&total))
}

/// `⌈q⌉` for a rational.
pub fn ceil(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// `⌊log2 n⌋` for `n ≥ 1`.
pub fn floor_log2(n: &BigUint) -> u64 {
    n.bits() - 1
}

/// `n·q` for an integer multiplier.
pub fn scale(q: &BigRational, n: &BigUint) -> BigRational {
    q * BigRational::from_integer(BigInt::from(n.clone()))
}

pub fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

/// Smallest `n ≥ from` with `a + b·2^n ≤ target`, for `b < 0`, or `None`
/// when it lies beyond `limit`.
pub fn first_level_below(a: &BigRational, b: &BigRational, target: &BigRational, from: u32, limit: u32) -> Option<u32> {
    (from..=limit).find(|&n| a + b * pow2_int(n as i64) <= *target)
}

pub fn is_even(n: &BigUint) -> bool {
    n.is_even()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Pow;
    use proptest::prelude::*;

    #[test]
    fn exact_powers() {
        assert_eq!(upper(&BigUint::from(1024u32)), int(10));
        assert_eq!(lower(&BigUint::from(1u32)), int(0));
        assert_eq!(pow2_upper(&int(-3)), Some(BigRational::new(1.into(), 8.into())));
        assert!(pow2_upper(&int(CEILING + 1)).is_none());
    }

    #[test]
    fn huge_values() {
        let c = Pow::pow(BigUint::from(60u32), 210u32);
        let (lo, hi) = (lower(&c), upper(&c));
        let truth = 210.0 * 60f64.log2();
        assert!(lo.to_f64().unwrap() <= truth && truth <= hi.to_f64().unwrap());
        assert!((&hi - &lo).to_f64().unwrap() < 1e-6);
    }

    #[test]
    fn sums() {
        let s = sum_upper(&[(BigUint::from(3u32), int(0)), (BigUint::from(1u32), int(0))]).unwrap();
        assert_eq!(s, int(2));
        assert!(sum_upper(&[]).is_none());
    }

    proptest! {
        #[test]
        fn brackets_log2(n in 1u64..u64::MAX) {
            let c = BigUint::from(n);
            let t = (n as f64).log2();
            prop_assert!(lower(&c).to_f64().unwrap() <= t + 1e-12);
            prop_assert!(upper(&c).to_f64().unwrap() >= t - 1e-12);
        }

        #[test]
        fn pow2_brackets(num in -4000i64..4000, den in 1i64..100) {
            let u = BigRational::new(num.into(), den.into());
            let hi = pow2_upper(&u).unwrap();
            let lo = pow2_lower(&u);
            prop_assert!(lo <= hi);
            let f = (num as f64 / den as f64).exp2();
            if f.is_normal() && num / den > FLOOR {
                prop_assert!(hi.to_f64().unwrap() >= f * (1.0 - 1e-12));
                prop_assert!(lo.to_f64().unwrap() <= f * (1.0 + 1e-12));
            }
        }
    }
}
