//! Rectangular complex balls.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::{Integer, Rational};

use super::mag::Mag;
use super::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex::new(Real::zero(prec), Real::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Complex::new(Real::one(prec), Real::zero(prec))
    }

    pub fn i(prec: u32) -> Self {
        Complex::new(Real::zero(prec), Real::one(prec))
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.prec();
        Complex::new(re, Real::zero(prec))
    }

    pub fn from_i64(prec: u32, n: i64) -> Self {
        Complex::from_real(Real::from_i64(prec, n))
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        Complex::from_real(Real::from_rational(prec, q))
    }

    pub fn from_rationals(prec: u32, re: &Rational, im: &Rational) -> Self {
        Complex::new(Real::from_rational(prec, re), Real::from_rational(prec, im))
    }

    pub fn from_f64s(prec: u32, re: f64, im: f64) -> Self {
        Complex::new(Real::from_f64(prec, re), Real::from_f64(prec, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Upper bound for the distance from the midpoint to any point of the box.
    pub fn rad(&self) -> Mag {
        self.re.rad().add(&self.im.rad())
    }

    /// The midpoint as an exact ball.
    pub fn mid_ball(&self) -> Complex {
        Complex::new(
            Real::from_float(self.re.mid().clone()),
            Real::from_float(self.im.mid().clone()),
        )
    }

    pub fn add_error(&mut self, err: Mag) {
        self.re.add_error(err);
        self.im.add_error(err);
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn abs_upper(&self) -> Mag {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        a.mul(&a).add(&b.mul(&b)).sqrt()
    }

    pub fn abs_lower(&self) -> Mag {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        let s = a.mul_lower(&a).max(&b.mul_lower(&b));
        // sqrt of the larger square is a valid lower bound; shave one ulp.
        s.sqrt().mul_lower(&Mag::from_f64(1.0 - 1e-15))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains_f64(&self, re: f64, im: f64) -> bool {
        self.re.contains_f64(re) && self.im.contains_f64(im)
    }

    pub fn overlaps(&self, other: &Complex) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), self.im.neg())
    }

    pub fn neg(&self) -> Complex {
        Complex::new(self.re.neg(), self.im.neg())
    }

    /// Multiplication by `i^n`.
    pub fn mul_i_pow(&self, n: i64) -> Complex {
        match n.rem_euclid(4) {
            0 => self.clone(),
            1 => Complex::new(self.im.neg(), self.re.clone()),
            2 => self.neg(),
            _ => Complex::new(self.im.clone(), self.re.neg()),
        }
    }

    pub fn mul_real(&self, x: &Real) -> Complex {
        Complex::new(&self.re * x, &self.im * x)
    }

    pub fn div_real(&self, x: &Real) -> Complex {
        Complex::new(&self.re / x, &self.im / x)
    }

    pub fn mul_int(&self, n: i64) -> Complex {
        Complex::new(self.re.mul_int(n), self.im.mul_int(n))
    }

    pub fn mul_integer(&self, n: &Integer) -> Complex {
        Complex::new(self.re.mul_integer(n), self.im.mul_integer(n))
    }

    pub fn div_int(&self, n: i64) -> Complex {
        Complex::new(self.re.div_int(n), self.im.div_int(n))
    }

    pub fn mul_rational(&self, q: &Rational) -> Complex {
        let x = Real::from_rational(self.prec(), q);
        self.mul_real(&x)
    }

    pub fn sqr(&self) -> Complex {
        self * self
    }

    pub fn pow(&self, n: u32) -> Complex {
        let mut result = Complex::one(self.prec());
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

    pub fn pow_i(&self, n: i64) -> Complex {
        let p = self.pow(n.unsigned_abs() as u32);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn recip(&self) -> Complex {
        let n = &self.re.sqr() + &self.im.sqr();
        Complex::new(&self.re / &n, (&self.im / &n).neg())
    }

    pub fn exp(&self) -> Complex {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex::new(&m * &c, &m * &s)
    }

    /// `exp(2 pi i z)`.
    pub fn e(z: &Complex) -> Complex {
        let two_pi = Real::two_pi(z.prec());
        let w = Complex::new((&z.im * &two_pi).neg(), &z.re * &two_pi);
        w.exp()
    }

    /// `exp(2 pi i x)` for real `x`.
    pub fn e_real(x: &Real) -> Complex {
        let t = x * &Real::two_pi(x.prec());
        let (s, c) = t.sin_cos();
        Complex::new(c, s)
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Complex, b: &Complex) {
        self.re.add_mul(&a.re, &b.re);
        self.re.sub_mul(&a.im, &b.im);
        self.im.add_mul(&a.re, &b.im);
        self.im.add_mul(&a.im, &b.re);
    }

    /// `self += a * x` for real `x`.
    pub fn add_mul_real(&mut self, a: &Complex, x: &Real) {
        self.re.add_mul(&a.re, x);
        self.im.add_mul(&a.im, x);
    }

    pub fn to_f64s(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        let mut re = &self.re * &rhs.re;
        re.sub_mul(&self.im, &rhs.im);
        let mut im = &self.re * &rhs.im;
        im.add_mul(&self.im, &rhs.re);
        Complex::new(re, im)
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        self * &rhs.recip()
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::neg(self)
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Complex> for Complex {
    fn sub_assign(&mut self, rhs: &Complex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $m(self, rhs: &Complex) -> Complex {
                (&self).$m(rhs)
            }
        }
        impl $tr<Complex> for &Complex {
            type Output = Complex;
            fn $m(self, rhs: Complex) -> Complex {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);
