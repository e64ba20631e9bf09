//! Certified point evaluation of q-series.

use rug::Rational;

use super::basis::ProductForm;
use super::qseries::{delta_q, eisenstein_q, QSeries};
use crate::arith::special::{bernoulli, inc_gamma_upper_int};
use crate::arith::{Complex, Mag, Real};
use crate::error::{Error, Result};

/// A proven coefficient bound `|c(n)| <= a * n^alpha` for `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBound {
    pub a: Mag,
    pub alpha: u32,
}

impl GrowthBound {
    pub fn new(a: Mag, alpha: u32) -> Self {
        GrowthBound { a, alpha }
    }

    /// `|sigma_{k-1}(n) 2k/B_k| <= (2k/|B_k|) zeta(k-1) n^{k-1}`, with
    /// `zeta(k-1) <= zeta(3) < 1.21`.
    pub fn eisenstein(k: u32) -> Self {
        let factor = Rational::from(2 * k) / bernoulli(k).abs();
        let a = Mag::from_float(&rug::Float::with_val_round(64, &factor, rug::float::Round::Up).0)
            .mul_f64(1.21);
        GrowthBound::new(a, k - 1)
    }

    /// Deligne: `|tau(n)| <= sigma_0(n) n^{11/2} <= 2 n^6`.
    pub fn delta() -> Self {
        GrowthBound::new(Mag::from_f64(2.0), 6)
    }
}

/// Upper bound for `sum_{n >= start} a n^alpha e^{-2 pi n y}` given a lower
/// bound `y_low > 0` for the imaginary part. Returns `None` when neither the
/// incomplete-gamma bound nor the ratio bound applies.
pub fn power_tail_bound(growth: &GrowthBound, y_low: &Mag, start: u64) -> Option<Mag> {
    if y_low.is_zero() || start == 0 {
        return None;
    }
    let prec = 64;
    let alpha = growth.alpha;
    let y = Real::from_float(y_low.to_float(prec));
    let x = &y * &Real::two_pi(prec);
    let qabs = x.neg().exp();
    let n = start as f64;
    let mut best: Option<Mag> = None;

    // Ratio bound: consecutive terms shrink by at most (1 + 1/N)^alpha |q|.
    let ratio = Real::from_f64(prec, 1.0 + 1.0 / n).pow(alpha);
    let rho = &ratio * &qabs;
    let one = Real::one(prec);
    let gap = &one - &rho;
    if gap.is_positive() {
        let lead = &Real::from_i64(prec, start as i64).pow(alpha) * &qabs.pow(start as u32);
        best = Some((&lead / &gap).abs_upper());
    }

    // Integral bound a Gamma(alpha+1, 2 pi (N-1) y) / (2 pi y)^{alpha+1}, valid
    // once the summand is decreasing from N - 1 on.
    let alpha_f = alpha as f64;
    let x_f = x.abs_lower().to_f64();
    if start >= 2 && (n - 1.0) * x_f >= alpha_f {
        let arg = x.mul_int(start as i64 - 1);
        if let Ok(g) = inc_gamma_upper_int(alpha as i64 + 1, &arg) {
            let b = (&g / &x.pow(alpha + 1)).abs_upper();
            best = Some(match best {
                Some(m) => m.min(&b),
                None => b,
            });
        }
    }
    best.map(|b| b.mul(&growth.a))
}

/// Lower bound for the imaginary part of `tau`, failing if it is not positive.
pub(crate) fn imag_lower(tau: &Complex) -> Result<Mag> {
    if !tau.im.is_positive() {
        return Err(Error::invalid("evaluation point must lie in the upper half plane"));
    }
    Ok(tau.im.abs_lower())
}

/// Evaluates `sum_{n < N} c(n) q^n` at `tau`, adding the tail bound implied by
/// `growth` for the omitted coefficients.
pub fn qseries_eval(s: &QSeries, tau: &Complex, growth: Option<&GrowthBound>) -> Result<Complex> {
    let prec = tau.prec();
    let growth = growth.ok_or_else(|| Error::invalid("a coefficient growth bound is required"))?;
    let y_low = imag_lower(tau)?;
    if s.is_zero() && growth.a.is_zero() {
        return Ok(Complex::zero(prec));
    }
    let mut acc = qseries_partial_sum(s, tau)?;
    if !growth.a.is_zero() {
        let tail = power_tail_bound(growth, &y_low, s.order() as u64).ok_or_else(|| {
            Error::TargetUnreachable {
                target: 0.0,
                reason: "truncation too short for a tail bound".into(),
            }
        })?;
        acc.add_error(tail);
    }
    Ok(acc)
}

/// `sum_{n < N} c(n) q^n` by Horner's rule, without any tail term.
pub fn qseries_partial_sum(s: &QSeries, tau: &Complex) -> Result<Complex> {
    let prec = tau.prec();
    imag_lower(tau)?;
    let q = Complex::e(tau);
    let mut acc = Complex::zero(prec);
    for c in s.coeffs().iter().rev() {
        acc = &acc * &q;
        if !c.is_zero() {
            acc.re += &Real::from_rational(prec, c);
        }
    }
    Ok(acc)
}

/// Smallest truncation `N` (searched by doubling then bisection) with tail
/// bound at most `target`.
pub fn choose_truncation(growth: &GrowthBound, y_low: &Mag, target: &Mag, max: u64) -> Result<u64> {
    let ok = |n: u64| power_tail_bound(growth, y_low, n).is_some_and(|b| b.le(target));
    let mut hi = 4u64;
    while !ok(hi) {
        hi *= 2;
        if hi > max {
            return Err(Error::TargetUnreachable {
                target: target.to_f64(),
                reason: format!("more than {max} q-series terms needed"),
            });
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

const MAX_TERMS: u64 = 1 << 16;

/// Certified `E_k(tau)` with tail at most `target`.
pub fn eval_eisenstein(k: u32, tau: &Complex, target: &Mag) -> Result<Complex> {
    let growth = GrowthBound::eisenstein(k);
    let n = choose_truncation(&growth, &imag_lower(tau)?, target, MAX_TERMS)?;
    qseries_eval(&eisenstein_q(k, n as usize)?, tau, Some(&growth))
}

/// Certified `Delta(tau)` with tail at most `target`.
pub fn eval_delta(tau: &Complex, target: &Mag) -> Result<Complex> {
    let growth = GrowthBound::delta();
    let n = choose_truncation(&growth, &imag_lower(tau)?, target, MAX_TERMS)?;
    qseries_eval(&delta_q(n as usize), tau, Some(&growth))
}

/// Certified value of a product `Delta^i E_4^a E_6^b`, each factor evaluated to
/// roughly working precision.
pub fn eval_product(p: &ProductForm, tau: &Complex) -> Result<Complex> {
    let prec = tau.prec();
    let fine = Mag::pow2(-(prec as i64));
    let mut acc = Complex::one(prec);
    if p.e4 > 0 {
        acc = &acc * &eval_eisenstein(4, tau, &fine)?.pow(p.e4);
    }
    if p.e6 > 0 {
        acc = &acc * &eval_eisenstein(6, tau, &fine)?.pow(p.e6);
    }
    if p.delta > 0 {
        // Delta is about |q|, so scale the tail target accordingly.
        let qabs = Complex::e(tau).abs_upper();
        let d = eval_delta(tau, &fine.mul(&qabs))?;
        acc = &acc * &d.pow(p.delta);
    }
    Ok(acc)
}
