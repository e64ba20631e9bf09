//! A priori bounds on cocycle values and additively twisted L-values.

use rug::Rational;

use crate::arith::special::{factorial, zeta_real};
use crate::arith::Real;
use crate::error::{Error, Result};

fn zeta_half(w: u32, prec: u32) -> Result<Real> {
    // zeta((w - 1)/2)
    zeta_real(&Real::from_rational(prec, &Rational::from((w as i64 - 1, 2))))
}

/// `c^{l-2} e^2 Gamma(l-1)^2 (2 pi)^{-l} zeta((l-1)/2)^2`, an upper bound for
/// `sum_j |phi(gamma^{-1})_j|` where `phi` is the cocycle of a weight-`l` Hecke
/// eigenform and `gamma` has bottom-left entry `c`.
pub fn cocycle_sum_bound(c: u64, l: u32, prec: u32) -> Result<Real> {
    if l <= 3 || c == 0 {
        return Err(Error::invalid(format!("cocycle_sum_bound needs l > 3 and c > 0, got l={l}, c={c}")));
    }
    let z = zeta_half(l, prec)?;
    let g = Real::from_integer(prec, &factorial(l - 2));
    let e2 = Real::from_i64(prec, 2).exp();
    let cpow = Real::from_i64(prec, c as i64).pow(l - 2);
    let v = &(&(&cpow * &e2) * &(&g * &g)) * &z.sqr();
    Ok(&v / &Real::two_pi(prec).pow(l))
}

/// `c^{k-2} Gamma(k-1) (2 pi)^{1-k} zeta((k-1)/2)^2`.
///
/// This bounds the completed value `|Gamma(s) (2 pi)^{-s} L(f, -d/c; s)|` for
/// `1 <= s <= k-1`; the uncompleted `L` is not bounded by it.
pub fn twisted_l_bound(c: u64, k: u32, prec: u32) -> Result<Real> {
    if k <= 3 || c == 0 {
        return Err(Error::invalid(format!("twisted_l_bound needs k > 3 and c > 0, got k={k}, c={c}")));
    }
    let z = zeta_half(k, prec)?;
    let g = Real::from_integer(prec, &factorial(k - 2));
    let cpow = Real::from_i64(prec, c as i64).pow(k - 2);
    let v = &(&cpow * &g) * &z.sqr();
    Ok(&v / &Real::two_pi(prec).pow(k - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{lambda_completed, lambda_order, ParabolicCocycle};
    use crate::modforms::delta_q;

    const P: u32 = 128;

    #[test]
    fn plug_in_values() {
        let z = zeta_real(&Real::from_rational(P, &Rational::from((11, 2)))).unwrap();
        let f10 = Real::from_integer(P, &factorial(10));
        let tp = Real::two_pi(P);
        let expected = &(&(&f10 * &f10) * &Real::from_i64(P, 2).exp()) * &z.sqr();
        let expected = &expected / &tp.pow(12);
        assert!(cocycle_sum_bound(1, 12, P).unwrap().overlaps(&expected));
        let tw = &(&f10 * &z.sqr()) / &tp.pow(11);
        assert!(twisted_l_bound(1, 12, P).unwrap().overlaps(&tw));
    }

    #[test]
    fn power_law_in_c() {
        let b1 = twisted_l_bound(1, 12, P).unwrap();
        let b3 = twisted_l_bound(3, 12, P).unwrap();
        assert!(b3.overlaps(&b1.mul_int(59049)));
        let mut prev = cocycle_sum_bound(1, 12, P).unwrap();
        for c in 2..10 {
            let next = cocycle_sum_bound(c, 12, P).unwrap();
            assert!((&next - &prev).is_positive());
            prev = next;
        }
        assert!(cocycle_sum_bound(1, 3, P).is_err());
        assert!(twisted_l_bound(0, 12, P).is_err());
    }

    #[test]
    fn cocycle_bound_is_twisted_bound_times_gamma_factor() {
        for (c, l) in [(1u64, 12u32), (4, 12), (3, 16)] {
            let tw = twisted_l_bound(c, l, P).unwrap();
            let factor = &(&Real::from_i64(P, 2).exp() * &Real::from_integer(P, &factorial(l - 2)))
                / &Real::two_pi(P);
            assert!((&tw * &factor).overlaps(&cocycle_sum_bound(c, l, P).unwrap()));
        }
    }

    #[test]
    fn twisted_bound_dominates_lambda_at_c_one() {
        let f = delta_q(lambda_order(12, P));
        let bound = twisted_l_bound(1, 12, P).unwrap().abs_lower();
        for s in 1..=11 {
            let lam = lambda_completed(&f, 12, s, P).unwrap();
            assert!(lam.abs_upper().le(&bound), "s={s}");
        }
    }

    #[test]
    fn cocycle_values_within_bound() {
        let phi = ParabolicCocycle::for_delta(P).unwrap();
        for c in 1..=5u64 {
            let bound = cocycle_sum_bound(c, 12, P).unwrap().abs_lower();
            for d in 0..c {
                if c > 1 && num_gcd(c, d) != 1 {
                    continue;
                }
                let v = phi.eval_rep_inverse(c, d);
                assert!(v.l1_upper().le(&bound), "c={c} d={d}");
            }
        }
    }

    fn num_gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            num_gcd(b, a % b)
        }
    }
}
