//! Truncated q-expansions with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::special::bernoulli;
use crate::error::{Error, Result};

/// `sum_{n < order} c(n) q^n`; coefficients at or beyond `order` are unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeries {
    #[serde(with = "crate::serde_util::rational_vec")]
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        QSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        QSeries::new(vec![Rational::new(); order])
    }

    pub fn one(order: usize) -> Self {
        let mut s = QSeries::zero(order);
        if order > 0 {
            s.coeffs[0] = Rational::from(1);
        }
        s
    }

    pub fn from_integers<I: IntoIterator<Item = Integer>>(it: I) -> Self {
        QSeries::new(it.into_iter().map(Rational::from).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs.get(n).ok_or(Error::BeyondTruncation {
            index: n,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> QSeries {
        QSeries::new(self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, x: &Rational) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| Rational::from(c * x)).collect())
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut result = QSeries::one(self.order());
        for _ in 0..e {
            result = &result * self;
        }
        result
    }

    /// Largest `|c(n)|` over the stored range, as an `f64`.
    pub fn max_abs_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let n = self.order().min(rhs.order());
        QSeries::new((0..n).map(|i| Rational::from(&self.coeffs[i] + &rhs.coeffs[i])).collect())
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let n = self.order().min(rhs.order());
        QSeries::new((0..n).map(|i| Rational::from(&self.coeffs[i] - &rhs.coeffs[i])).collect())
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::new(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += Rational::from(a * b);
                }
            }
        }
        QSeries::new(out)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

/// `sigma_e(n)` for `0 <= n < order` (with `sigma_e(0) = 0`), by a sieve.
pub fn divisor_sums(e: u32, order: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); order];
    for d in 1..order {
        let p = Integer::from(d).pow(e);
        let mut m = d;
        while m < order {
            out[m] += &p;
            m += d;
        }
    }
    out
}

/// Normalized Eisenstein series `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`.
pub fn eisenstein_q(k: u32, order: usize) -> Result<QSeries> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::invalid(format!(
            "Eisenstein series need an even weight >= 4, got {k}"
        )));
    }
    let factor = -Rational::from(2 * k) / bernoulli(k);
    let sig = divisor_sums(k - 1, order);
    let mut coeffs: Vec<Rational> = sig.into_iter().map(|s| Rational::from(s) * &factor).collect();
    if order > 0 {
        coeffs[0] = Rational::from(1);
    }
    Ok(QSeries::new(coeffs))
}

/// `Delta = (E_4^3 - E_6^2) / 1728`.
pub fn delta_q(order: usize) -> QSeries {
    let e4 = eisenstein_q(4, order).expect("weight 4 is valid");
    let e6 = eisenstein_q(6, order).expect("weight 6 is valid");
    let diff = &e4.pow(3) - &e6.pow(2);
    diff.scale(&Rational::from((1, 1728)))
}

/// `(dim M_k, dim S_k)` in level one.
pub fn dims(k: i64) -> Result<(usize, usize)> {
    if k % 2 != 0 {
        return Err(Error::invalid(format!("odd weight {k} has no level-one forms")));
    }
    if k < 0 {
        return Ok((0, 0));
    }
    if k == 0 {
        return Ok((1, 0));
    }
    let base = (k / 12) as usize;
    let m = if k % 12 == 2 { base } else { base + 1 };
    Ok((m, m.saturating_sub(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &QSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.numer().to_i64().unwrap()).collect()
    }

    #[test]
    fn eisenstein_examples() {
        assert_eq!(ints(&eisenstein_q(4, 3).unwrap()), vec![1, 240, 2160]);
        assert_eq!(ints(&eisenstein_q(6, 2).unwrap()), vec![1, -504]);
        for k in [4, 8, 12, 60] {
            assert_eq!(*eisenstein_q(k, 5).unwrap().coeff(0).unwrap(), 1);
        }
        assert!(eisenstein_q(2, 5).is_err());
        assert!(eisenstein_q(7, 5).is_err());
    }

    #[test]
    fn delta_matches_product_formula() {
        let order = 40;
        // q prod (1 - q^n)^24
        let mut prod = vec![Integer::new(); order];
        prod[1] = Integer::from(1);
        for n in 1..order {
            for _ in 0..24 {
                for m in (n..order).rev() {
                    let t = prod[m - n].clone();
                    prod[m] -= t;
                }
            }
        }
        let reference = QSeries::from_integers(prod);
        assert_eq!(delta_q(order), reference);
        let d = delta_q(6);
        assert_eq!(ints(&d), vec![0, 1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn truncation_rules() {
        let a = eisenstein_q(4, 10).unwrap();
        let b = eisenstein_q(6, 6).unwrap();
        assert_eq!((&a * &b).order(), 6);
        assert_eq!((&a + &b).order(), 6);
        assert!(matches!(
            b.coeff(6),
            Err(Error::BeyondTruncation { index: 6, order: 6 })
        ));
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(dims(50).unwrap(), (4, 3));
        assert_eq!(dims(14).unwrap(), (1, 0));
        assert_eq!(dims(24).unwrap(), (3, 2));
        assert_eq!(dims(12).unwrap(), (2, 1));
        assert_eq!(dims(2).unwrap(), (0, 0));
        assert_eq!(dims(0).unwrap(), (1, 0));
        assert!(dims(5).is_err());
    }
}
