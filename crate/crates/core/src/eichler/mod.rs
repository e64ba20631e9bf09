//! Eichler integrals evaluated from their cusp expansion, and numerical
//! modular deficits.

use std::sync::RwLock;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::arith::special::factorial;
use crate::arith::{Complex, Mag, Real};
use crate::error::{Error, Result};
use crate::modforms::{choose_truncation, delta_q, imag_lower, qseries_eval, GrowthBound, QSeries};
use crate::symd::GroupElement;

/// `E(f)(tau) = int_tau^{i oo} f(z) (tau - z)^{k-2} dz
///            = -(k-2)!/(2 pi i)^{k-1} sum_n c(f; n) n^{1-k} e(n tau)`.
pub struct EichlerIntegral {
    weight: u32,
    growth: GrowthBound,
    source: fn(usize) -> QSeries,
    // c(f; n) n^{1-k}, extended on demand
    cache: RwLock<QSeries>,
}

impl std::fmt::Debug for EichlerIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EichlerIntegral").field("weight", &self.weight).finish()
    }
}

const MAX_TERMS: u64 = 1 << 14;

impl EichlerIntegral {
    /// `source(N)` must return the first `N` coefficients of a cusp form of
    /// weight `k` whose coefficients obey `growth`.
    pub fn new(weight: u32, growth: GrowthBound, source: fn(usize) -> QSeries) -> Result<Self> {
        if weight < 4 || weight % 2 == 1 {
            return Err(Error::invalid(format!("Eichler integrals need even weight >= 4, got {weight}")));
        }
        if growth.alpha + 1 > weight {
            return Err(Error::invalid("coefficient growth too fast for the Eichler series"));
        }
        Ok(EichlerIntegral {
            weight,
            growth,
            source,
            cache: RwLock::new(QSeries::zero(0)),
        })
    }

    /// The Eichler integral of `Delta`, with Deligne's bound for its tail.
    pub fn delta() -> Self {
        Self::new(12, GrowthBound::delta(), delta_q).expect("valid parameters")
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Growth of the scaled coefficients `c(n) n^{1-k}`.
    fn scaled_growth(&self) -> GrowthBound {
        GrowthBound::new(self.growth.a, 0)
    }

    fn scaled_coeffs(&self, order: usize) -> QSeries {
        {
            let c = self.cache.read().unwrap_or_else(|e| e.into_inner());
            if c.order() >= order {
                return c.truncate(order);
            }
        }
        let f = (self.source)(order.max(8));
        let km1 = self.weight - 1;
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    Rational::new()
                } else {
                    Rational::from(c / Integer::from(n).pow(km1))
                }
            })
            .collect();
        let s = QSeries::new(coeffs);
        let mut w = self.cache.write().unwrap_or_else(|e| e.into_inner());
        if s.order() > w.order() {
            *w = s.clone();
        }
        s.truncate(order)
    }

    /// `-(k-2)! / (2 pi i)^{k-1}`.
    fn prefactor(&self, prec: u32) -> Complex {
        let k = self.weight;
        let f = Real::from_integer(prec, &factorial(k - 2));
        let v = (&f / &Real::two_pi(prec).pow(k - 1)).neg();
        // 1/i^{k-1} = i^{-(k-1)}
        Complex::from_real(v).mul_i_pow(-(k as i64 - 1))
    }

    /// q-coefficients `0..order` of `E(f)`: `-(k-2)!/(2 pi i)^{k-1} c(f; n) n^{1-k}`.
    pub fn coefficients(&self, order: usize, prec: u32) -> Vec<Complex> {
        let pre = self.prefactor(prec);
        self.scaled_coeffs(order)
            .coeffs()
            .iter()
            .map(|c| if c.is_zero() { Complex::zero(prec) } else { pre.mul_rational(c) })
            .collect()
    }

    /// Certified `E(f)(tau)`; the series tail is at most `target` before the
    /// prefactor is applied.
    pub fn eval(&self, tau: &Complex, target: &Mag) -> Result<Complex> {
        let y_low = imag_lower(tau)?;
        let growth = self.scaled_growth();
        let n = choose_truncation(&growth, &y_low, target, MAX_TERMS)?;
        let s = qseries_eval(&self.scaled_coeffs(n as usize), tau, Some(&growth))?;
        Ok(&self.prefactor(tau.prec()) * &s)
    }
}

/// Certified `E(f)(tau)` for the Eichler integral `e`.
pub fn eichler_eval(e: &EichlerIntegral, tau: &Complex, target: &Mag) -> Result<Complex> {
    e.eval(tau, target)
}

/// `(g|_k gamma)(tau) - g(tau) = (c tau + d)^{-k} g(gamma tau) - g(tau)`.
///
/// For an Eichler integral `g` of a weight `k'` form and `k = 2 - k'` this is
/// the cocycle value `phi(gamma^{-1})` at `X = tau`.
pub fn deficit_eval<F>(g: F, gamma: &GroupElement, k: i64, tau: &Complex) -> Result<Complex>
where
    F: Fn(&Complex) -> Result<Complex>,
{
    imag_lower(tau)?;
    let (gt, j) = apply(gamma, tau);
    let slashed = &j.pow_i(-k) * &g(&gt)?;
    Ok(&slashed - &g(tau)?)
}

/// `(gamma tau, c tau + d)`.
pub fn apply(gamma: &GroupElement, tau: &Complex) -> (Complex, Complex) {
    let prec = tau.prec();
    let c = Complex::from_real(Real::from_integer(prec, gamma.c()));
    let d = Complex::from_real(Real::from_integer(prec, gamma.d()));
    let a = Complex::from_real(Real::from_integer(prec, gamma.a()));
    let b = Complex::from_real(Real::from_integer(prec, gamma.b()));
    let den = &(&c * tau) + &d;
    let num = &(&a * tau) + &b;
    (&num / &den, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::ParabolicCocycle;
    use crate::modforms::eval_eisenstein;
    use crate::symd::word_product;
    use crate::symd::Generator::{S, T, TInv};

    const P: u32 = 192;

    fn tol() -> Mag {
        Mag::pow2(-170)
    }

    #[test]
    fn leading_term_dominates() {
        let e = EichlerIntegral::delta();
        let tau = Complex::from_f64s(P, 0.2, 3.0);
        let v = e.eval(&tau, &tol()).unwrap();
        let lead = &e.prefactor(P) * &Complex::e(&tau);
        let diff = (&v - &lead).abs_upper().to_f64();
        let rel = diff / lead.abs_upper().to_f64();
        // second term is tau(2) 2^{-11} q relative to the first
        let expected = 24.0 / 2048.0 * (-2.0 * std::f64::consts::PI * 3.0f64).exp();
        assert!((rel / expected - 1.0).abs() < 1e-6);
        assert!(rel > 0.0);
    }

    #[test]
    fn coefficients_sum_to_value() {
        let e = EichlerIntegral::delta();
        let tau = Complex::from_f64s(P, -0.1, 2.0);
        let mut acc = Complex::zero(P);
        let q = Complex::e(&tau);
        for c in e.coefficients(30, P).iter().rev() {
            acc = &(&acc * &q) + c;
        }
        let v = e.eval(&tau, &tol()).unwrap();
        assert!((&acc - &v).abs_upper().to_f64() < 1e-40);
        assert!(e.coefficients(3, P)[0].rad().is_zero());
    }

    #[test]
    fn decays_high_up() {
        let e = EichlerIntegral::delta();
        let v = e.eval(&Complex::from_f64s(P, 0.0, 10.0), &tol()).unwrap();
        assert!(v.abs_upper().to_f64() < 1e-20);
    }

    #[test]
    fn nested_under_tighter_target() {
        let e = EichlerIntegral::delta();
        let tau = Complex::from_f64s(P, 0.5, 0.7);
        let a = e.eval(&tau, &Mag::pow2(-40)).unwrap();
        let b = e.eval(&tau, &Mag::pow2(-80)).unwrap();
        assert!(a.overlaps(&b));
        assert!(b.rad().le(&a.rad()));
    }

    #[test]
    fn deficit_of_identity_and_modular_forms() {
        let tau = Complex::from_f64s(P, 0.3, 1.1);
        let e = EichlerIntegral::delta();
        let id = GroupElement::identity();
        assert!(deficit_eval(|t| e.eval(t, &tol()), &id, -10, &tau).unwrap().contains_zero());
        let g = word_product(&[S, T, T, S, TInv]);
        let d = deficit_eval(|t| eval_eisenstein(4, t, &tol()), &g, 4, &tau).unwrap();
        assert!(d.contains_zero());
    }

    #[test]
    fn deficit_matches_cocycle() {
        let e = EichlerIntegral::delta();
        let phi = ParabolicCocycle::for_delta(P).unwrap();
        let i = Complex::from_f64s(P, 0.0, 1.0);
        let d = deficit_eval(|t| e.eval(t, &tol()), &GroupElement::s(), -10, &i).unwrap();
        assert!(d.overlaps(&phi.phi_s().eval(&i)));
        let words: [&[_]; 3] = [&[S, T, S], &[T, T, S, TInv, S], &[S, TInv, TInv, S, T, S]];
        let points = [(0.1, 1.3), (-0.4, 0.9), (0.45, 2.0)];
        for w in words {
            let g = word_product(w);
            for (x, y) in points {
                let tau = Complex::from_f64s(P, x, y);
                let d = deficit_eval(|t| e.eval(t, &tol()), &g, -10, &tau).unwrap();
                let c = phi.eval(&g.inverse()).eval(&tau);
                assert!(d.overlaps(&c), "{w:?} at {x}+{y}i");
                assert!(d.rad().to_f64() < 1e-40);
            }
        }
    }

    #[test]
    fn cauchy_riemann_residual() {
        let e = EichlerIntegral::delta();
        let h = 1e-5;
        let f = |x: f64, y: f64| e.eval(&Complex::from_f64s(P, x, y), &tol()).unwrap().to_f64s();
        let (px_re, px_im) = {
            let (a, b) = f(h, 1.0);
            let (c, d) = f(-h, 1.0);
            ((a - c) / (2.0 * h), (b - d) / (2.0 * h))
        };
        let (py_re, py_im) = {
            let (a, b) = f(0.0, 1.0 + h);
            let (c, d) = f(0.0, 1.0 - h);
            ((a - c) / (2.0 * h), (b - d) / (2.0 * h))
        };
        // u_x = v_y, u_y = -v_x
        let res = (px_re - py_im).abs() + (py_re + px_im).abs();
        assert!(res < 1e-10, "residual {res}");
    }
}
