//! Real balls: an MPFR midpoint with a `Mag` radius.
//!
//! Operations return a ball that contains every result obtainable from points
//! of the input balls. Midpoint rounding error is folded into the radius as one
//! ulp of the rounded midpoint. Division by a ball containing zero and similar
//! domain failures produce an infinite radius rather than an error; callers
//! that certify results check the radius.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, AssignRound, NegAssign, SubAssignRound};
use rug::{Float, Integer, Rational};

use super::mag::Mag;

#[derive(Clone, Debug)]
pub struct Real {
    mid: Float,
    rad: Mag,
}

fn ulp_err(f: &Float, ord: Ordering) -> Mag {
    if ord == Ordering::Equal {
        return Mag::zero();
    }
    match f.get_exp() {
        Some(e) => Mag::pow2(e as i64 - f.prec() as i64),
        // Rounded to zero means underflow, which the exponent range makes
        // unreachable in practice; stay conservative anyway.
        None if f.is_zero() => Mag::pow2(-(1 << 30)),
        None => Mag::inf(),
    }
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Float> = std::cell::RefCell::new(Float::new(64));
}

/// Runs `f` on a per-thread scratch float of precision `prec`, avoiding an
/// allocation per fused operation.
fn with_scratch<R>(prec: u32, f: impl FnOnce(&mut Float) -> R) -> R {
    SCRATCH.with(|s| {
        let mut t = s.borrow_mut();
        if t.prec() != prec {
            t.set_prec(prec);
        }
        f(&mut t)
    })
}

pub(crate) fn rounded<T>(prec: u32, val: T) -> (Float, Mag)
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    let (f, ord) = Float::with_val_round(prec, val, Round::Nearest);
    let err = ulp_err(&f, ord);
    (f, err)
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real {
            mid: Float::new(prec),
            rad: Mag::zero(),
        }
    }

    pub fn one(prec: u32) -> Self {
        Real::from_i64(prec, 1)
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        let (mid, rad) = rounded(prec, n);
        Real { mid, rad }
    }

    pub fn from_f64(prec: u32, x: f64) -> Self {
        let (mid, rad) = rounded(prec, x);
        Real { mid, rad }
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        let (mid, rad) = rounded(prec, n);
        Real { mid, rad }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        let (mid, rad) = rounded(prec, q);
        Real { mid, rad }
    }

    /// Exact ball around an existing float, keeping its precision.
    pub fn from_float(mid: Float) -> Self {
        Real {
            mid,
            rad: Mag::zero(),
        }
    }

    pub fn with_rad(mid: Float, rad: Mag) -> Self {
        Real { mid, rad }
    }

    pub fn pi(prec: u32) -> Self {
        let (mid, rad) = rounded(prec, Constant::Pi);
        Real { mid, rad }
    }

    pub fn two_pi(prec: u32) -> Self {
        let mut p = Real::pi(prec);
        p.mid <<= 1;
        p.rad = p.rad.mul_pow2(1);
        p
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn add_error(&mut self, err: Mag) {
        self.rad = self.rad.add(&err);
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite() && self.mid.is_finite()
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        Mag::from_float(&self.mid).add(&self.rad)
    }

    /// Lower bound for `|x|` over the ball.
    pub fn abs_lower(&self) -> Mag {
        Mag::from_float_lower(&self.mid).sub_lower(&self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mid.is_sign_positive() && !self.mid.is_zero() && !self.contains_zero()
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        let d = Float::with_val(self.prec().max(x.prec()) + 64, &self.mid - x);
        Mag::from_float_lower(&d).le(&self.rad)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains_float(&Float::with_val(53, x))
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        let f = Float::with_val(self.prec() + 64, q);
        // The conversion error is below one ulp at the raised precision.
        let d = Float::with_val(self.prec() + 64, &self.mid - &f);
        let slack = ulp_err(&f, Ordering::Less);
        Mag::from_float_lower(&d).le(&self.rad.add(&slack))
    }

    pub fn overlaps(&self, other: &Real) -> bool {
        let d = Float::with_val(self.prec().max(other.prec()) + 64, &self.mid - &other.mid);
        Mag::from_float_lower(&d).le(&self.rad.add(&other.rad))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn set_prec(&mut self, prec: u32) {
        let ord = self.mid.set_prec_round(prec, Round::Nearest);
        let err = ulp_err(&self.mid, ord);
        self.rad = self.rad.add(&err);
    }

    pub fn neg(&self) -> Real {
        Real {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad,
        }
    }

    pub fn mul_int(&self, n: i64) -> Real {
        let (mid, err) = rounded(self.prec(), &self.mid * n);
        let rad = self.rad.mul(&Mag::from_u64(n.unsigned_abs())).add(&err);
        Real { mid, rad }
    }

    pub fn mul_integer(&self, n: &Integer) -> Real {
        let (mid, err) = rounded(self.prec(), &self.mid * n);
        let rad = self.rad.mul(&Mag::from_integer(n)).add(&err);
        Real { mid, rad }
    }

    pub fn div_int(&self, n: i64) -> Real {
        if n == 0 {
            return Real::with_rad(Float::new(self.prec()), Mag::inf());
        }
        let (mid, err) = rounded(self.prec(), &self.mid / n);
        let rad = self.rad.div(&Mag::from_u64(n.unsigned_abs())).add(&err);
        Real { mid, rad }
    }

    pub fn mul_pow2(&self, e: i32) -> Real {
        let mut mid = self.mid.clone();
        mid <<= e;
        Real {
            mid,
            rad: self.rad.mul_pow2(e as i64),
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Real {
        self * &Real::from_rational(self.prec(), q)
    }

    pub fn sqr(&self) -> Real {
        let (mid, err) = rounded(self.prec(), self.mid.square_ref());
        let a = Mag::from_float(&self.mid);
        // |x+e|^2 - x^2 <= 2|x|r + r^2
        let rad = a
            .mul(&self.rad)
            .mul_pow2(1)
            .add(&self.rad.mul(&self.rad))
            .add(&err);
        Real { mid, rad }
    }

    pub fn pow(&self, n: u32) -> Real {
        let mut result = Real::one(self.prec());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn pow_i(&self, n: i64) -> Real {
        let p = self.pow(n.unsigned_abs() as u32);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn recip(&self) -> Real {
        Real::one(self.prec()) / self
    }

    pub fn exp(&self) -> Real {
        let (mid, err) = rounded(self.prec(), self.mid.exp_ref());
        // |e^(x+t) - e^x| <= e^x (e^r - 1)
        let rad = Mag::from_float(&mid)
            .add(&err)
            .mul(&self.rad.exp_m1())
            .add(&err);
        Real { mid, rad }
    }

    /// Natural logarithm; the ball must be strictly positive.
    pub fn ln(&self) -> Real {
        if !self.is_positive() {
            return Real::with_rad(Float::new(self.prec()), Mag::inf());
        }
        let (mid, err) = rounded(self.prec(), self.mid.ln_ref());
        // |ln(x+t) - ln x| <= r / (x - r)
        let rad = self.rad.div(&self.abs_lower()).add(&err);
        Real { mid, rad }
    }

    pub fn sqrt(&self) -> Real {
        if self.mid.is_sign_negative() && !self.mid.is_zero() {
            return Real::with_rad(Float::new(self.prec()), Mag::inf());
        }
        let (mid, err) = rounded(self.prec(), self.mid.sqrt_ref());
        let lower = self.abs_lower();
        let rad = if lower.is_zero() {
            Mag::from_float(&mid).add(&self.rad.sqrt())
        } else {
            // |sqrt(x+t) - sqrt(x)| <= r / sqrt(x - r)
            self.rad.div(&lower.sqrt().mul_lower(&Mag::from_f64(1.0 - 1e-15)))
        };
        Real {
            mid,
            rad: rad.add(&err),
        }
    }

    pub fn sin_cos(&self) -> (Real, Real) {
        let prec = self.prec();
        let mut s = Float::with_val(prec, &self.mid);
        let mut c = Float::new(prec);
        let (os, oc) = s.sin_cos_round(&mut c, Round::Nearest);
        let es = ulp_err(&s, os);
        let ec = ulp_err(&c, oc);
        // Both functions are 1-Lipschitz.
        (
            Real {
                mid: s,
                rad: self.rad.add(&es),
            },
            Real {
                mid: c,
                rad: self.rad.add(&ec),
            },
        )
    }

    /// Union with another ball: a ball containing both.
    pub fn union(&self, other: &Real) -> Real {
        let prec = self.prec().max(other.prec());
        let (mid, err) = rounded(prec, &self.mid + &other.mid);
        let mid = Float::with_val(prec, mid >> 1);
        let da = Mag::from_float(&Float::with_val(prec + 64, &mid - &self.mid)).add(&self.rad);
        let db = Mag::from_float(&Float::with_val(prec + 64, &mid - &other.mid)).add(&other.rad);
        Real {
            mid,
            rad: da.max(&db).add(&err),
        }
    }

    /// `self += a * b` with a single midpoint rounding.
    pub fn add_mul(&mut self, a: &Real, b: &Real) {
        let prod_rad = Mag::from_float(&a.mid)
            .mul(&b.rad)
            .add(&Mag::from_float(&b.mid).mul(&a.rad))
            .add(&a.rad.mul(&b.rad));
        let ord = with_scratch(self.mid.prec(), |t| {
            let ord = t.assign_round(a.mid.mul_add_ref(&b.mid, &self.mid), Round::Nearest);
            std::mem::swap(t, &mut self.mid);
            ord
        });
        let err = ulp_err(&self.mid, ord);
        self.rad = self.rad.add(&prod_rad).add(&err);
    }

    /// `self -= a * b` with a single midpoint rounding.
    pub fn sub_mul(&mut self, a: &Real, b: &Real) {
        let prod_rad = Mag::from_float(&a.mid)
            .mul(&b.rad)
            .add(&Mag::from_float(&b.mid).mul(&a.rad))
            .add(&a.rad.mul(&b.rad));
        let ord = with_scratch(self.mid.prec(), |t| {
            let ord = t.assign_round(a.mid.mul_sub_ref(&b.mid, &self.mid), Round::Nearest);
            t.neg_assign();
            std::mem::swap(t, &mut self.mid);
            ord.reverse()
        });
        let err = ulp_err(&self.mid, ord);
        self.rad = self.rad.add(&prod_rad).add(&err);
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn mid_string(&self, digits: usize) -> String {
        format_float(&self.mid, digits)
    }
}

pub(crate) fn format_float(f: &Float, digits: usize) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    f.to_string_radix(10, Some(digits.max(1)))
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {}", format_float(&self.mid, 20), self.rad)
    }
}

impl PartialEq for Real {
    /// Structural equality of midpoint and radius; not a numerical comparison.
    fn eq(&self, other: &Self) -> bool {
        self.mid == other.mid && self.rad == other.rad
    }
}

impl Add<&Real> for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        let prec = self.prec().max(rhs.prec());
        let (mid, err) = rounded(prec, &self.mid + &rhs.mid);
        Real {
            mid,
            rad: self.rad.add(&rhs.rad).add(&err),
        }
    }
}

impl Sub<&Real> for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        let prec = self.prec().max(rhs.prec());
        let (mid, err) = rounded(prec, &self.mid - &rhs.mid);
        Real {
            mid,
            rad: self.rad.add(&rhs.rad).add(&err),
        }
    }
}

impl Mul<&Real> for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        let prec = self.prec().max(rhs.prec());
        let (mid, err) = rounded(prec, &self.mid * &rhs.mid);
        let rad = Mag::from_float(&self.mid)
            .mul(&rhs.rad)
            .add(&Mag::from_float(&rhs.mid).mul(&self.rad))
            .add(&self.rad.mul(&rhs.rad))
            .add(&err);
        Real { mid, rad }
    }
}

impl Div<&Real> for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        let prec = self.prec().max(rhs.prec());
        let lower = rhs.abs_lower();
        if lower.is_zero() {
            return Real::with_rad(Float::new(prec), Mag::inf());
        }
        let (mid, err) = rounded(prec, &self.mid / &rhs.mid);
        // |a/b - (a+s)/(b+t)| <= (|a| r_b + |b| r_a) / (|b| (|b| - r_b))
        let num = Mag::from_float(&self.mid)
            .mul(&rhs.rad)
            .add(&Mag::from_float(&rhs.mid).mul(&self.rad));
        let den = Mag::from_float_lower(&rhs.mid).mul_lower(&lower);
        Real {
            mid,
            rad: num.div(&den).add(&err),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::neg(self)
    }
}

impl AddAssign<&Real> for Real {
    fn add_assign(&mut self, rhs: &Real) {
        let ord = self.mid.add_assign_round(&rhs.mid, Round::Nearest);
        let err = ulp_err(&self.mid, ord);
        self.rad = self.rad.add(&rhs.rad).add(&err);
    }
}

impl SubAssign<&Real> for Real {
    fn sub_assign(&mut self, rhs: &Real) {
        let ord = self.mid.sub_assign_round(&rhs.mid, Round::Nearest);
        let err = ulp_err(&self.mid, ord);
        self.rad = self.rad.add(&rhs.rad).add(&err);
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                (&self).$m(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    #[test]
    fn pi_contains_reference() {
        let pi = Real::pi(P);
        let reference = Float::with_val(400, Constant::Pi);
        assert!(pi.contains_float(&reference));
        assert!(pi.rad().log2_approx() < -120.0);
    }

    #[test]
    fn division_by_zero_ball_is_unbounded() {
        let a = Real::one(P);
        let mut z = Real::zero(P);
        z.add_error(Mag::pow2(-10));
        assert!(!(&a / &z).is_finite());
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = Real::from_rational(P, &Rational::from((7, 3)));
        let y = x.exp().ln();
        assert!(y.overlaps(&x));
        assert!(y.rad().log2_approx() < -110.0);
    }

    #[test]
    fn sin_cos_identity() {
        let x = Real::from_f64(P, 0.7);
        let (s, c) = x.sin_cos();
        let one = &s.sqr() + &c.sqr();
        assert!(one.contains_f64(1.0));
    }

    #[test]
    fn rational_containment() {
        let q = Rational::from((1, 3));
        let x = Real::from_rational(P, &q);
        assert!(x.contains_rational(&q));
        assert!(!x.contains_rational(&Rational::from((1, 3 + 1))));
    }

    fn ball(mid: f64, rad_exp: i64) -> Real {
        let mut r = Real::from_f64(P, mid);
        r.add_error(Mag::pow2(rad_exp));
        r
    }

    proptest! {
        #[test]
        fn ops_contain_perturbed_results(
            a in -100.0f64..100.0, b in -100.0f64..100.0,
            ta in -1.0f64..1.0, tb in -1.0f64..1.0,
            ra in -40i64..-5, rb in -40i64..-5,
        ) {
            let x = ball(a, ra);
            let y = ball(b, rb);
            // Points inside the balls.
            let pa = Float::with_val(600, a) + Float::with_val(600, ta) * Mag::pow2(ra).to_float(600);
            let pb = Float::with_val(600, b) + Float::with_val(600, tb) * Mag::pow2(rb).to_float(600);
            prop_assert!((&x + &y).contains_float(&Float::with_val(600, &pa + &pb)));
            prop_assert!((&x - &y).contains_float(&Float::with_val(600, &pa - &pb)));
            prop_assert!((&x * &y).contains_float(&Float::with_val(600, &pa * &pb)));
            let q = &x / &y;
            if q.is_finite() {
                prop_assert!(q.contains_float(&Float::with_val(600, &pa / &pb)));
            }
            prop_assert!(x.sqr().contains_float(&Float::with_val(600, pa.square_ref())));
            let small = x.div_int(50);
            let ps = Float::with_val(600, &pa / 50);
            prop_assert!(small.exp().contains_float(&Float::with_val(600, ps.exp_ref())));
            let (s, c) = x.sin_cos();
            prop_assert!(s.contains_float(&Float::with_val(600, pa.sin_ref())));
            prop_assert!(c.contains_float(&Float::with_val(600, pa.cos_ref())));
            let mut acc = y.clone();
            acc.add_mul(&x, &y);
            prop_assert!(acc.contains_float(&Float::with_val(600, &pb + &pa * &pb)));
        }
    }
}
