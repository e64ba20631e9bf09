//! Exact combinatorial helpers and a few certified special functions.

use std::sync::{Mutex, OnceLock};

use rug::{Complete, Integer, Rational};

use super::mag::Mag;
use super::real::Real;
use crate::error::{Error, Result};

pub fn factorial(n: u32) -> Integer {
    Integer::factorial(n).complete()
}

/// `binom(n, k)`; out-of-range arguments are rejected rather than mapped to 0.
pub fn binomial(n: i64, k: i64) -> Result<Integer> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::invalid(format!("binomial({n}, {k}) is out of range")));
    }
    Ok(Integer::binomial_u(n as u32, k as u32).complete())
}

pub(crate) fn binom_u(n: u32, k: u32) -> Integer {
    Integer::binomial_u(n, k).complete()
}

fn bernoulli_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli(n: u32) -> Rational {
    if n >= 3 && n % 2 == 1 {
        return Rational::new();
    }
    let mut table = bernoulli_table().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n as usize {
        let m = table.len() as u32;
        let value = if m >= 3 && m % 2 == 1 {
            Rational::new()
        } else {
            // sum_{j=0}^{m} binom(m+1, j) B_j = 0
            let mut acc = Rational::new();
            for (j, b) in table.iter().enumerate() {
                if !b.is_zero() {
                    acc += Rational::from(binom_u(m + 1, j as u32) * b);
                }
            }
            -acc / Integer::from(m + 1)
        };
        table.push(value);
    }
    table[n as usize].clone()
}

/// `zeta(w) / pi^w` for even `w >= 2`.
pub fn zeta_even_over_pi_pow(w: u32) -> Result<Rational> {
    if w < 2 || w % 2 == 1 {
        return Err(Error::invalid(format!("zeta_even requires an even weight >= 2, got {w}")));
    }
    // zeta(w) = (-1)^(w/2+1) B_w (2 pi)^w / (2 w!)
    let mut r = bernoulli(w) * (Integer::from(1) << (w - 1)) / factorial(w);
    if (w / 2).is_multiple_of(2) {
        r = -r;
    }
    Ok(r)
}

/// Riemann zeta at a real ball `s` with `s > 1`, by Euler-Maclaurin summation.
pub fn zeta_real(s: &Real) -> Result<Real> {
    let one = Real::one(s.prec());
    let sm1 = s - &one;
    if !sm1.is_positive() {
        return Err(Error::invalid("zeta_real requires s > 1"));
    }
    let prec = s.prec();
    let m = (prec / 3).max(8);
    let n = m;

    let mut sum = Real::zero(prec);
    for k in 1..n {
        let ln = Real::from_i64(prec, k as i64).ln();
        sum += &(&ln * s).neg().exp();
    }
    let big_n = Real::from_i64(prec, n as i64);
    let ln_n = big_n.ln();
    let n_pow_neg_s = (&ln_n * s).neg().exp();
    let n_pow_1ms = &n_pow_neg_s * &big_n;
    sum += &(&n_pow_1ms / &sm1);
    sum += &n_pow_neg_s.mul_pow2(-1);

    // rising = s (s+1) ... (s+2k-2), npow = N^(-s-2k+1)
    let mut rising = s.clone();
    let n_sq_inv = (&big_n * &big_n).recip();
    let mut npow = &n_pow_neg_s / &big_n;
    let mut fact = Integer::from(2);
    for k in 1..=m {
        let coeff = bernoulli(2 * k) / &fact;
        sum += &(&rising * &npow).mul_rational(&coeff);
        // advance to k+1
        let a = s + &Real::from_i64(prec, 2 * k as i64 - 1);
        let b = s + &Real::from_i64(prec, 2 * k as i64);
        rising = &(&rising * &a) * &b;
        npow = &npow * &n_sq_inv;
        fact *= (2 * k + 1) * (2 * k + 2);
    }

    // |R| <= 4 / (2 pi)^(2M) * s(s+1)...(s+2M-2) * N^(1-s-2M), with the rising
    // product taken at the upper end of s and the power at the lower end.
    let s_up = s.abs_upper();
    let s_low = s.abs_lower();
    let mut rise = Mag::from_f64(1.0);
    for i in 0..(2 * m - 1) {
        rise = rise.mul(&s_up.add(&Mag::from_u64(i as u64)));
    }
    let two_pi_low = Mag::from_f64(std::f64::consts::TAU * (1.0 - 1e-15));
    let decay = Mag::from_f64(1.0).div(&two_pi_low.pow(2 * m));
    let exp = s_low.to_f64() - 1.0 + 2.0 * m as f64;
    let exp_low = exp.next_down();
    let n_pow = Mag::from_f64(1.0).div(&mag_pow_f64_lower(n as f64, exp_low));
    let rem = rise.mul(&decay).mul(&n_pow).mul_f64(4.0);
    sum.add_error(rem);
    Ok(sum)
}

/// Lower bound for `base^e` with `base >= 1`, `e >= 0`.
fn mag_pow_f64_lower(base: f64, e: f64) -> Mag {
    let log2 = (base.log2() * e) * (1.0 - 1e-12);
    let whole = log2.floor();
    let frac = log2 - whole;
    Mag::from_f64(frac.exp2() * (1.0 - 1e-12)).mul_lower(&Mag::pow2(whole as i64))
}

/// Upper incomplete gamma `Gamma(a, x)` for a positive integer `a`:
/// `(a-1)! e^{-x} sum_{m<a} x^m / m!`.
pub fn inc_gamma_upper_int(a: i64, x: &Real) -> Result<Real> {
    if a < 1 {
        return Err(Error::invalid(format!("inc_gamma_upper_int requires a >= 1, got {a}")));
    }
    let prec = x.prec();
    let mut term = Real::one(prec);
    let mut sum = Real::one(prec);
    for m in 1..a {
        term = (&term * x).div_int(m);
        sum += &term;
    }
    let f = Real::from_integer(prec, &factorial(a as u32 - 1));
    Ok(&(&f * &x.neg().exp()) * &sum)
}

/// Sound bound for `sum_{c >= C} c^{-s}` with `s > 1`, `C >= 1`.
pub fn zeta_tail_bound(s: f64, c: u64) -> Mag {
    assert!(s > 1.0 && c >= 1);
    // C^{-s} + C^{1-s} / (s - 1)
    let cm = Mag::from_u64(c);
    let cpow = mag_pow_f64_lower(c as f64, s);
    let first = Mag::from_f64(1.0).div(&cpow);
    let second = first.mul(&cm).div(&Mag::from_f64((s - 1.0) * (1.0 - 1e-15)));
    first.add(&second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    // Akiyama-Tanigawa algorithm; yields B_1 = +1/2, which is flipped below.
    fn bernoulli_oracle(n: usize) -> Rational {
        let mut a: Vec<Rational> = Vec::new();
        for m in 0..=n {
            a.push(Rational::from((1, m as u32 + 1)));
            for j in (1..=m).rev() {
                let diff = Rational::from(&a[j - 1] - &a[j]);
                a[j - 1] = diff * Integer::from(j);
            }
        }
        if n == 1 {
            -a[0].clone()
        } else {
            a[0].clone()
        }
    }

    #[test]
    fn bernoulli_matches_akiyama_tanigawa() {
        for n in 0..=40 {
            assert_eq!(bernoulli(n), bernoulli_oracle(n as usize), "B_{n}");
        }
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn binomial_rejects_out_of_range() {
        assert!(binomial(5, 6).is_err());
        assert!(binomial(5, -1).is_err());
        assert_eq!(binomial(10, 3).unwrap(), 120);
    }

    #[test]
    fn zeta_real_known_values() {
        let prec = 200;
        let two = Real::from_i64(prec, 2);
        let z2 = zeta_real(&two).unwrap();
        let pi = Float::with_val(400, rug::float::Constant::Pi);
        let expected = Float::with_val(400, pi.square_ref()) / 6u32;
        assert!(z2.contains_float(&expected));
        assert!(z2.rad().log2_approx() < -180.0);

        let half = Real::from_rational(prec, &Rational::from((11, 2)));
        let z = zeta_real(&half).unwrap();
        // Direct partial sum plus the integral tail bracket.
        let n = 200_000u32;
        let partial: f64 = (1..n).map(|k| (k as f64).powf(-5.5)).sum();
        let lo = partial + (n as f64).powf(-4.5) / 4.5;
        let hi = lo + (n as f64).powf(-5.5);
        assert!(z.to_f64() > lo - 1e-13 && z.to_f64() < hi + 1e-13);

        assert!(zeta_real(&Real::one(prec)).is_err());
    }

    #[test]
    fn zeta_even_matches_euler_maclaurin() {
        let prec = 160;
        for w in [2u32, 4, 10, 24] {
            let r = zeta_even_over_pi_pow(w).unwrap();
            let exact = Real::pi(prec).pow(w).mul_rational(&r);
            let em = zeta_real(&Real::from_i64(prec, w as i64)).unwrap();
            assert!(exact.overlaps(&em), "w={w}");
        }
    }

    #[test]
    fn inc_gamma_against_quadrature_free_identity() {
        // Gamma(a+1, x) = a Gamma(a, x) + x^a e^{-x}
        let prec = 128;
        let x = Real::from_rational(prec, &Rational::from((37, 5)));
        for a in 1..12 {
            let lhs = inc_gamma_upper_int(a + 1, &x).unwrap();
            let rhs = &inc_gamma_upper_int(a, &x).unwrap().mul_int(a)
                + &(&x.pow(a as u32) * &x.neg().exp());
            assert!(lhs.overlaps(&rhs));
        }
        let g1 = inc_gamma_upper_int(1, &x).unwrap();
        assert!(g1.overlaps(&x.neg().exp()));
        assert!(inc_gamma_upper_int(0, &x).is_err());
    }

    #[test]
    fn zeta_tail_dominates_partial_sums() {
        for (s, c) in [(2.5, 3u64), (15.0, 2), (4.0, 100)] {
            let bound = zeta_tail_bound(s, c).to_f64();
            let direct: f64 = (c..c + 100_000).map(|n| (n as f64).powf(-s)).sum();
            assert!(bound >= direct, "s={s} c={c}");
        }
    }
}
