//! Classical and `sym^d`-valued Eisenstein series: exact expansions, the
//! classical tail estimate and certified evaluation.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::arith::special::{binom_u, factorial, inc_gamma_upper_int, zeta_even_over_pi_pow};
use crate::arith::{Complex, Mag, Real};
use crate::error::{Error, Result};
use crate::modforms::{divisor_sums, imag_lower, qseries_partial_sum, QSeries};
use crate::symd::{PolyD, VVQSeries};

fn check_params(k: u32, d: usize, j: usize) -> Result<u32> {
    if d % 2 == 1 || k % 2 == 1 {
        return Err(Error::invalid(format!("k = {k} and d = {d} must both be even")));
    }
    if k as usize <= d + 2 {
        return Err(Error::invalid(format!("need k > d + 2, got k = {k}, d = {d}")));
    }
    if j > d {
        return Err(Error::invalid(format!("need 0 <= j <= d, got j = {j}, d = {d}")));
    }
    Ok(k + 2 * j as u32 - d as u32)
}

/// Rational part of the leading factor of component `r`:
/// `binom(d-j, r-j) (-2 pi i)^w / ((w + r - j - 1)! zeta(w))` with `w = k + 2j - d`.
fn component_factor(w: u32, d: usize, j: usize, r: usize) -> Result<Rational> {
    let z = zeta_even_over_pi_pow(w)?;
    // (-2 i)^w = (-4)^{w/2}
    let mut num = Integer::from(4).pow(w / 2);
    if (w / 2) % 2 == 1 {
        num = -num;
    }
    let b = binom_u((d - j) as u32, (r - j) as u32);
    let den = factorial(w + (r - j) as u32 - 1);
    Ok(Rational::from((num * b, den)) / z)
}

/// Fourier expansion of `E_k(.; d, j)`; component `r` is stored without its
/// factor `(-2 pi i)^{r - j}` (see [`VVQSeries`]), so all coefficients are
/// rational.
pub fn vv_eis_coeffs(k: u32, d: usize, j: usize, order: usize) -> Result<VVQSeries> {
    let w = check_params(k, d, j)?;
    let sig = divisor_sums(w - 1, order);
    let mut components = vec![QSeries::zero(order); d + 1];
    for (r, comp) in components.iter_mut().enumerate().skip(j) {
        let f = component_factor(w, d, j, r)?;
        let mut coeffs = vec![Rational::new(); order];
        for n in 1..order {
            let np = Integer::from(n).pow((r - j) as u32);
            coeffs[n] = Rational::from(&f * (np * &sig[n]));
        }
        if r == j && order > 0 {
            coeffs[0] = Rational::from(1);
        }
        *comp = QSeries::new(coeffs);
    }
    VVQSeries::new(d, j, components)
}

/// `b Gamma(a+b+1, 2 pi (N-1) y) / ((b-1) (2 pi y)^{a+b+1})`, an upper bound
/// for `|sum_{n >= N} n^a sigma_b(n) e(n tau)|` when `Im tau >= y_low` and
/// `N >= 1 + (a+b)/(2 pi y_low)`.
pub fn classical_eis_tail(a: u32, b: u32, n: u64, y_low: &Mag) -> Result<Mag> {
    if b <= 1 {
        return Err(Error::invalid(format!("classical_eis_tail needs b > 1, got {b}")));
    }
    if y_low.is_zero() || n == 0 {
        return Err(Error::invalid("classical_eis_tail needs y > 0 and N >= 1"));
    }
    let prec = 64;
    let y = Real::from_float(y_low.to_float(prec));
    let x = &y * &Real::two_pi(prec);
    let ab = (a + b) as i64;
    // (N - 1) 2 pi y >= a + b, checked on the lower end of the ball.
    if !(&x.mul_int(n as i64 - 1) - &Real::from_i64(prec, ab)).is_positive()
        && !x.mul_int(n as i64 - 1).contains_f64(ab as f64)
    {
        return Err(Error::precondition(format!(
            "N = {n} is below 1 + (a+b)/(2 pi y) for a = {a}, b = {b}, y = {}",
            y_low.to_f64()
        )));
    }
    let g = inc_gamma_upper_int(ab + 1, &x.mul_int(n as i64 - 1))?;
    let v = (&g.mul_int(b as i64) / &x.pow(a + b + 1)).div_int(b as i64 - 1);
    Ok(v.abs_upper())
}

/// Smallest `N` satisfying the tail precondition for exponent `a + b`.
fn min_truncation(ab: u32, y_low: &Mag) -> u64 {
    let x = y_low.to_f64() * std::f64::consts::TAU * (1.0 - 1e-12);
    (1.0 + ab as f64 / x).ceil() as u64 + 1
}

/// Upper bound for `|2 pi|^e`.
fn two_pi_pow_upper(e: u32) -> Mag {
    Real::two_pi(64).pow(e).abs_upper()
}

/// Value of `E_k(tau; d, j)` as coordinates `f_r` in the basis `(X - tau)^r`;
/// the truncation keeps each component's tail below `target / (d + 1)`.
pub fn eval_vv_eis(k: u32, d: usize, j: usize, tau: &Complex, target: &Mag) -> Result<PolyD<Complex>> {
    let w = check_params(k, d, j)?;
    let prec = tau.prec();
    let y_low = imag_lower(tau)?;
    let budget = target.div(&Mag::from_u64(d as u64 + 1));

    let factors: Vec<Rational> = (j..=d).map(|r| component_factor(w, d, j, r)).collect::<Result<_>>()?;
    let tail_at = |r: usize, n: u64| -> Result<Mag> {
        let fabs = Mag::from_float(&rug::Float::with_val(64, &factors[r - j]).abs())
            .mul_f64(1.0 + 1e-15);
        let t = classical_eis_tail((r - j) as u32, w - 1, n, &y_low)?;
        Ok(t.mul(&fabs).mul(&two_pi_pow_upper((r - j) as u32)))
    };
    let ok = |n: u64| -> bool { (j..=d).all(|r| tail_at(r, n).is_ok_and(|t| t.le(&budget))) };

    let mut hi = min_truncation(d as u32 - j as u32 + w - 1, &y_low).max(2);
    while !ok(hi) {
        hi *= 2;
        if hi > MAX_TERMS {
            return Err(Error::TargetUnreachable {
                target: target.to_f64(),
                reason: format!("more than {MAX_TERMS} terms needed"),
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
    let n = hi;

    let series = vv_eis_coeffs(k, d, j, n as usize)?;
    // (-2 pi i)^{r-j}
    let unit = Complex::new(Real::zero(prec), Real::two_pi(prec).neg());
    let mut out = vec![Complex::zero(prec); d + 1];
    let mut unit_pow = Complex::one(prec);
    for r in j..=d {
        let mut s = qseries_partial_sum(&series.components[r], tau)?;
        s.add_error(tail_at(r, n)?);
        out[r] = &s * &unit_pow;
        unit_pow = &unit_pow * &unit;
    }
    PolyD::new(out)
}

const MAX_TERMS: u64 = 1 << 16;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{eisenstein_q, eval_eisenstein};
    use crate::symd::{pi_low, GroupElement};

    const P: u32 = 192;

    #[test]
    fn classical_e4_is_recovered() {
        let f = vv_eis_coeffs(4, 0, 0, 12).unwrap();
        assert_eq!(f.components[0], eisenstein_q(4, 12).unwrap());
        assert_eq!(f.components[0].coeff(1).unwrap(), &Rational::from(240));
    }

    #[test]
    fn top_component_is_shifted_eisenstein() {
        let f = vv_eis_coeffs(14, 10, 10, 10).unwrap();
        for r in 0..10 {
            assert!(f.components[r].is_zero());
        }
        assert_eq!(f.components[10], eisenstein_q(24, 10).unwrap());
    }

    #[test]
    fn lowest_projection_is_classical() {
        for (k, d, j) in [(14u32, 10usize, 10usize), (16, 10, 8), (8, 2, 1), (12, 4, 2)] {
            let f = vv_eis_coeffs(k, d, j, 15).unwrap();
            let w = k + 2 * j as u32 - d as u32;
            assert_eq!(pi_low(&f, j).unwrap(), eisenstein_q(w, 15).unwrap());
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(vv_eis_coeffs(12, 10, 0, 5).is_err());
        assert!(vv_eis_coeffs(14, 9, 0, 5).is_err());
        assert!(vv_eis_coeffs(14, 10, 11, 5).is_err());
        assert!(classical_eis_tail(0, 3, 1, &Mag::from_f64(1.0)).is_err());
    }

    #[test]
    fn classical_tail_dominates_brute_force() {
        let y = 1.0;
        let bound = classical_eis_tail(0, 3, 20, &Mag::from_f64(y)).unwrap().to_f64();
        let sig = divisor_sums(3, 2000);
        let tail: f64 = (20..2000)
            .map(|n| sig[n].to_f64() * (-2.0 * std::f64::consts::PI * n as f64 * y).exp())
            .sum();
        assert!(tail <= bound && bound > 0.0);
        let b2 = classical_eis_tail(0, 3, 21, &Mag::from_f64(y)).unwrap().to_f64();
        assert!(b2 < bound);
    }

    #[test]
    fn scalar_case_matches_classical_evaluation() {
        let tau = Complex::from_f64s(P, 0.25, 0.9);
        let target = Mag::pow2(-150);
        let v = eval_vv_eis(6, 0, 0, &tau, &target).unwrap();
        let e = eval_eisenstein(6, &tau, &target).unwrap();
        assert!(v.coeff(0).overlaps(&e));
    }

    #[test]
    fn slash_invariance_under_s() {
        let tau = Complex::from_rationals(P, &Rational::from((1, 3)), &Rational::from(1));
        let s = GroupElement::s();
        let stau = tau.recip().neg();
        let target = Mag::pow2(-150);
        for (k, d, j) in [(14u32, 10usize, 10usize), (16, 10, 8), (8, 2, 1)] {
            let at_tau = PolyD::from_x_minus_tau_basis(eval_vv_eis(k, d, j, &tau, &target).unwrap().into_coeffs(), &tau).unwrap();
            let at_stau = PolyD::from_x_minus_tau_basis(eval_vv_eis(k, d, j, &stau, &target).unwrap().into_coeffs(), &stau).unwrap();
            // F|S(tau) = tau^{-k} sym(S^{-1}) F(S tau)
            let slashed = at_stau.sym_action_inv(&s).scale(&tau.pow_i(-(k as i64)));
            assert!(slashed.overlaps(&at_tau), "k={k} d={d} j={j}");
        }
    }

    #[test]
    fn constant_term_dominates_high_up() {
        let tau = Complex::from_f64s(P, 0.1, 10.0);
        let v = eval_vv_eis(14, 10, 4, &tau, &Mag::pow2(-120)).unwrap();
        assert!((&v.coeff(4).re - &Real::one(P)).abs_upper().to_f64() < 1e-20);
        assert!(v.coeff(7).abs_upper().to_f64() < 1e-15);
    }
}
