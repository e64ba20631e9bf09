//! Non-negative magnitudes used as ball radii.
//!
//! A `Mag` is `man * 2^exp` with `man` in `[0.5, 1)`. Every operation rounds
//! upward unless its name says otherwise, so a `Mag` produced from other upper
//! bounds is again an upper bound. The wide exponent keeps radii meaningful far
//! below the `f64` range.

use std::cmp::Ordering;

use rug::float::Round;
use rug::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mag {
    man: f64,
    exp: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i64;
    if e == 0 {
        let (m, e2) = frexp(x * 2f64.powi(64));
        return (m, e2 - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e - 1022)
}

fn ldexp_small(x: f64, k: i64) -> f64 {
    debug_assert!((-1000..=1000).contains(&k));
    x * 2f64.powi(k as i32)
}

impl Mag {
    pub const fn zero() -> Self {
        Mag { man: 0.0, exp: 0 }
    }

    pub const fn inf() -> Self {
        Mag {
            man: f64::INFINITY,
            exp: 0,
        }
    }

    fn norm(man: f64, exp: i64) -> Self {
        if man == 0.0 {
            return Mag::zero();
        }
        if !man.is_finite() {
            return Mag::inf();
        }
        let (m, e) = frexp(man);
        Mag { man: m, exp: exp + e }
    }

    /// Exact `2^e`.
    pub fn pow2(e: i64) -> Self {
        Mag { man: 0.5, exp: e + 1 }
    }

    /// Upper bound for `|x|`; the conversion is exact for finite `x`.
    pub fn from_f64(x: f64) -> Self {
        if x.is_nan() {
            return Mag::inf();
        }
        Mag::norm(x.abs(), 0)
    }

    pub fn from_u64(n: u64) -> Self {
        // Round the conversion up when n exceeds 53 bits.
        let f = n as f64;
        if f as u128 >= n as u128 {
            Mag::from_f64(f)
        } else {
            Mag::from_f64(f.next_up())
        }
    }

    /// Upper bound for `|x|`.
    pub fn from_float(x: &Float) -> Self {
        if x.is_zero() {
            return Mag::zero();
        }
        if !x.is_finite() {
            return Mag::inf();
        }
        // Top 53 bits of the most significant limb, plus one unit: an upper
        // bound that needs no MPFR call.
        let exp = x.get_exp().expect("finite nonzero") as i64;
        let prec = x.prec() as usize;
        let limb_bits = 8 * std::mem::size_of::<gmp_mpfr_sys::gmp::limb_t>();
        let limbs = prec.div_ceil(limb_bits);
        let (top, rest_zero) = unsafe {
            let d = (*x.as_raw()).d.as_ptr();
            let top = (*d.add(limbs - 1) as u64) << (64 - limb_bits);
            (top, (0..limbs - 1).all(|i| *d.add(i) == 0))
        };
        let exact = rest_zero && top & 0x7ff == 0;
        let m = ((top >> 11) + u64::from(!exact)) as f64;
        Mag::norm(m, exp - 53)
    }

    /// Lower bound for `|x|`.
    pub fn from_float_lower(x: &Float) -> Self {
        if x.is_zero() || x.is_nan() {
            return Mag::zero();
        }
        if x.is_infinite() {
            return Mag::inf();
        }
        let (f, e) = x.as_abs().to_f64_exp_round(Round::Down);
        Mag::norm(f, e as i64)
    }

    pub fn from_integer(n: &rug::Integer) -> Self {
        Mag::from_float(&Float::with_val_round(64, n, Round::Up).0)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.man.is_finite()
    }

    /// Approximate value; saturates to `0` or `inf` outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() || !self.is_finite() {
            return self.man;
        }
        if self.exp > 1024 {
            f64::INFINITY
        } else if self.exp < -1100 {
            0.0
        } else if self.exp < -1000 {
            ldexp_small(ldexp_small(self.man, -1000), self.exp + 1000)
        } else {
            ldexp_small(self.man, self.exp)
        }
    }

    /// Upper bound as an `f64`; `f64::MIN_POSITIVE`-sized values round up.
    pub fn to_f64_up(&self) -> f64 {
        let v = self.to_f64();
        if v == 0.0 && !self.is_zero() {
            f64::from_bits(1)
        } else if self.is_zero() {
            0.0
        } else {
            v.next_up()
        }
    }

    /// Exact conversion to a float of at least 53 bits.
    pub fn to_float(&self, prec: u32) -> Float {
        let mut f = Float::with_val(prec.max(53), self.man);
        if self.is_finite() && !self.is_zero() {
            f <<= self.exp as i32;
        }
        f
    }

    /// Binary exponent `e` with `self < 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else if !self.is_finite() {
            Some(i64::MAX)
        } else {
            Some(self.exp)
        }
    }

    pub fn add(&self, other: &Mag) -> Mag {
        self.add_rounded(other, true)
    }

    fn add_rounded(&self, other: &Mag, up: bool) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        if !self.is_finite() || !other.is_finite() {
            return Mag::inf();
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let diff = hi.exp - lo.exp;
        if diff > 60 {
            let m = if up { hi.man.next_up() } else { hi.man };
            return Mag::norm(m, hi.exp);
        }
        let s = hi.man + ldexp_small(lo.man, -diff);
        let s = if up { s.next_up() } else { s.next_down() };
        Mag::norm(s, hi.exp)
    }

    /// Lower bound for `max(self - other, 0)`.
    pub fn sub_lower(&self, other: &Mag) -> Mag {
        if other.is_zero() {
            return *self;
        }
        if !other.is_finite() || self.le(other) {
            return Mag::zero();
        }
        if !self.is_finite() {
            return Mag::inf();
        }
        let diff = self.exp - other.exp;
        if diff > 60 {
            return Mag::norm(self.man.next_down(), self.exp);
        }
        let s = (self.man - ldexp_small(other.man, -diff)).next_down();
        if s <= 0.0 {
            Mag::zero()
        } else {
            Mag::norm(s, self.exp)
        }
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        if !self.is_finite() || !other.is_finite() {
            return Mag::inf();
        }
        Mag::norm((self.man * other.man).next_up(), self.exp + other.exp)
    }

    /// Product rounded downward.
    pub fn mul_lower(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        if !self.is_finite() || !other.is_finite() {
            return Mag::inf();
        }
        Mag::norm((self.man * other.man).next_down(), self.exp + other.exp)
    }

    /// `self / other`, where `other` should be a lower bound of the divisor.
    pub fn div(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        if other.is_zero() || !self.is_finite() {
            return Mag::inf();
        }
        if !other.is_finite() {
            return Mag::zero();
        }
        Mag::norm((self.man / other.man).next_up(), self.exp - other.exp)
    }

    pub fn mul_f64(&self, x: f64) -> Mag {
        self.mul(&Mag::from_f64(x))
    }

    pub fn mul_pow2(&self, e: i64) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return *self;
        }
        Mag { man: self.man, exp: self.exp + e }
    }

    pub fn pow(&self, n: u32) -> Mag {
        let mut result = Mag::from_f64(1.0);
        let mut base = *self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }

    pub fn sqrt(&self) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return *self;
        }
        let (m, e) = if self.exp % 2 == 0 {
            (self.man, self.exp)
        } else {
            (self.man * 2.0, self.exp - 1)
        };
        Mag::norm(m.sqrt().next_up(), e / 2)
    }

    /// Upper bound for `e^self - 1`.
    pub fn exp_m1(&self) -> Mag {
        if self.is_zero() {
            return Mag::zero();
        }
        if !self.is_finite() {
            return Mag::inf();
        }
        if self.exp < -20 {
            // x + x^2 suffices for x < 2^-20.
            return self.add(&self.mul(self));
        }
        let x = self.to_f64_up();
        if x < 600.0 {
            return Mag::from_f64(x.exp_m1().next_up().next_up());
        }
        // e^x < 2^(1.4427 x + 1)
        let bits = (x * std::f64::consts::LOG2_E).ceil() + 1.0;
        if bits > 1e15 {
            return Mag::inf();
        }
        Mag::pow2(bits as i64)
    }

    pub fn le(&self, other: &Mag) -> bool {
        self.partial_cmp(other) != Some(Ordering::Greater)
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.le(other) {
            *other
        } else {
            *self
        }
    }

    pub fn min(&self, other: &Mag) -> Mag {
        if self.le(other) {
            *self
        } else {
            *other
        }
    }

    /// Approximate base-2 logarithm, for diagnostics and step size choices.
    pub fn log2_approx(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else if !self.is_finite() {
            f64::INFINITY
        } else {
            self.man.log2() + self.exp as f64
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Some(Ordering::Equal),
            (true, false) => return Some(Ordering::Less),
            (false, true) => return Some(Ordering::Greater),
            _ => {}
        }
        match (self.is_finite(), other.is_finite()) {
            (false, false) => return Some(Ordering::Equal),
            (false, true) => return Some(Ordering::Greater),
            (true, false) => return Some(Ordering::Less),
            _ => {}
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => self.man.partial_cmp(&other.man),
            o => Some(o),
        }
    }
}

impl Default for Mag {
    fn default() -> Self {
        Mag::zero()
    }
}

impl std::fmt::Display for Mag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.is_finite() {
            return write!(f, "inf");
        }
        let v = self.to_f64();
        if v != 0.0 && v.is_finite() {
            write!(f, "{:.3e}", v)
        } else {
            write!(f, "{}*2^{}", self.man, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pow2_and_conversion() {
        assert_eq!(Mag::pow2(0).to_f64(), 1.0);
        assert_eq!(Mag::pow2(-3).to_f64(), 0.125);
        let tiny = Mag::pow2(-5000);
        assert!(!tiny.is_zero());
        assert_eq!(tiny.exponent(), Some(-4999));
        let f = tiny.to_float(64);
        assert_eq!(f.get_exp(), Some(-4999));
    }

    #[test]
    fn far_apart_sum_is_rounded_up() {
        let one = Mag::from_f64(1.0);
        let s = one.add(&Mag::pow2(-200));
        assert!(s.to_f64() > 1.0);
        assert!(Mag::pow2(-200).add(&Mag::pow2(-200)).to_f64() >= 2f64.powi(-199));
    }

    #[test]
    fn sub_lower_clamps() {
        let a = Mag::from_f64(1.0);
        let b = Mag::from_f64(2.0);
        assert!(a.sub_lower(&b).is_zero());
        assert!(b.sub_lower(&a).to_f64() <= 1.0);
    }

    #[test]
    fn exp_m1_large() {
        let m = Mag::from_f64(1000.0).exp_m1();
        assert!(m.log2_approx() > 1000.0 * std::f64::consts::LOG2_E);
        assert!(Mag::pow2(-40).exp_m1().to_f64() >= 2f64.powi(-40));
    }

    #[test]
    fn from_float_bounds() {
        let x = Float::with_val(200, 1) / 3u32;
        let up = Mag::from_float(&x).to_float(200);
        let down = Mag::from_float_lower(&x).to_float(200);
        assert!(up >= x && down <= x);
    }

    proptest! {
        #[test]
        fn ops_bound_exact_values(a in 1e-300f64..1e300, b in 1e-300f64..1e300) {
            let (ma, mb) = (Mag::from_f64(a), Mag::from_f64(b));
            let fa = Float::with_val(2200, a);
            let fb = Float::with_val(2200, b);
            prop_assert!(ma.add(&mb).to_float(64) >= Float::with_val(2200, &fa + &fb));
            prop_assert!(ma.mul(&mb).to_float(64) >= Float::with_val(2200, &fa * &fb));
            prop_assert!(ma.mul_lower(&mb).to_float(64) <= Float::with_val(2200, &fa * &fb));
            prop_assert!(ma.div(&mb).to_float(64) >= Float::with_val(2200, &fa / &fb));
            let lower = ma.sub_lower(&mb).to_float(64);
            prop_assert!(lower <= Float::with_val(2200, &fa - &fb).max(&Float::new(64)));
            prop_assert!(ma.sqrt().to_float(64) >= Float::with_val(2200, fa.sqrt_ref()));
        }

        #[test]
        fn from_float_is_tight_upper_bound(num in any::<i64>(), den in 1u64..u64::MAX, e in -500i32..500,
                                            prec in prop::sample::select(vec![24u32, 53, 64, 65, 128, 300])) {
            let x = Float::with_val(prec, Float::with_val(prec, num) / den) << e;
            let m = Mag::from_float(&x).to_float(400);
            let ax = Float::with_val(400, x.abs_ref());
            prop_assert!(m >= ax);
            prop_assert!(m <= Float::with_val(400, &ax * (1.0 + 2f64.powi(-51))));
        }
    }
}
