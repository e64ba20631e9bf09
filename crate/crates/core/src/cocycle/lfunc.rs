//! Completed L-values of level-one cusp forms and period polynomials.

use rug::Rational;

use crate::arith::special::{binom_u, inc_gamma_upper_int};
use crate::arith::{Complex, Mag, Real};
use crate::error::{Error, Result};
use crate::modforms::{delta_q, power_tail_bound, GrowthBound, QSeries};
use crate::symd::PolyD;

/// `Lambda(f, s) = Gamma(s) (2 pi)^{-s} L(f, s)` for an integer `1 <= s <= k-1`,
/// summed as
/// `sum_n c(n) [(2 pi n)^{-s} Gamma(s, 2 pi n) + i^k (2 pi n)^{s-k} Gamma(k-s, 2 pi n)]`.
///
/// The tail beyond the supplied coefficients is bounded with Deligne's bound
/// `|c(n)| <= sigma_0(n) n^{(k-1)/2} <= 2 n^{k/2}`.
pub fn lambda_completed(f: &QSeries, k: u32, s: u32, prec: u32) -> Result<Complex> {
    if s < 1 || s + 1 > k {
        return Err(Error::invalid(format!("s = {s} outside 1..={}", k.saturating_sub(1))));
    }
    if !f.coeff(0)?.is_zero() {
        return Err(Error::invalid("lambda_completed needs a cusp form"));
    }
    let n_max = f.order() as u64;
    // The tail estimate below needs 2 pi N >= 2 (k - 2).
    if (n_max as f64) * std::f64::consts::PI < (k as f64 - 2.0) + 1e-9 {
        return Err(Error::precondition(format!(
            "need at least {} coefficients for weight {k}",
            ((k as f64 - 2.0) / std::f64::consts::PI).ceil()
        )));
    }
    let two_pi = Real::two_pi(prec);
    let mut first = Real::zero(prec);
    let mut second = Real::zero(prec);
    for (n, c) in f.coeffs().iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        let x = two_pi.mul_int(n as i64);
        let a = &inc_gamma_upper_int(s as i64, &x)? / &x.pow(s);
        let b = &inc_gamma_upper_int((k - s) as i64, &x)? / &x.pow(k - s);
        let cr = Real::from_rational(prec, c);
        first.add_mul(&cr, &a);
        second.add_mul(&cr, &b);
    }
    // i^k times the second series.
    let mut value = Complex::from_real(first);
    value += &Complex::from_real(second).mul_i_pow(k as i64);
    // Each term is at most |c(n)| e^{-2 pi n} 4 / (2 pi n) <= (4/pi) n^{k/2 - 1} e^{-2 pi n}.
    let growth = GrowthBound::new(Mag::from_f64(4.0 / std::f64::consts::PI).mul_f64(1.0 + 1e-12), k.div_ceil(2) - 1);
    let tail = power_tail_bound(&growth, &Mag::from_f64(1.0), n_max).ok_or_else(|| Error::TargetUnreachable {
        target: 0.0,
        reason: "no tail bound for the L-series".into(),
    })?;
    value.add_error(tail);
    Ok(value)
}

/// Number of q-coefficients that makes the L-series tail negligible at `prec`.
pub fn lambda_order(k: u32, prec: u32) -> usize {
    let by_prec = (prec as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI)).ceil() as usize;
    by_prec + k as usize + 8
}

/// Period polynomial `phi(S) = sum_j X^{k-2-j} (k-2)!/((k-2-j)! (2 pi i)^{j+1}) L(f, j+1)`,
/// computed as `binom(k-2, j) (-i)^{j+1} Lambda(f, j+1)`.
pub fn period_polynomial(f: &QSeries, k: u32, prec: u32) -> Result<PolyD<Complex>> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::invalid(format!("period polynomial needs even k >= 4, got {k}")));
    }
    let d = (k - 2) as usize;
    let mut coeffs = vec![Complex::zero(prec); d + 1];
    for j in 0..=d {
        let lam = lambda_completed(f, k, j as u32 + 1, prec)?;
        let b = Rational::from(binom_u(d as u32, j as u32));
        // (-i)^{j+1} = i^{3(j+1)}
        coeffs[d - j] = lam.mul_rational(&b).mul_i_pow(3 * (j as i64 + 1));
    }
    PolyD::new(coeffs)
}

/// Period polynomial of `Delta` at precision `prec`.
pub fn delta_period_polynomial(prec: u32) -> Result<PolyD<Complex>> {
    period_polynomial(&delta_q(lambda_order(12, prec)), 12, prec)
}
