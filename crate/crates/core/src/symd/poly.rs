//! `PolyD`: polynomials of degree at most `d`, the value space of `sym^d`.

use rug::{Integer, Rational};

use super::group::GroupElement;
use crate::arith::special::binom_u;
use crate::arith::Complex;
use crate::error::{Error, Result};

/// Coefficient types usable in `PolyD`: exact rationals and complex balls.
pub trait Scalar: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_integer(&self, n: &Integer) -> Self;
    fn mul_rational(&self, q: &Rational) -> Self;
    fn neg(&self) -> Self {
        self.mul_integer(&Integer::from(-1))
    }
    fn add_assign(&mut self, other: &Self) {
        *self = Scalar::add(self, other);
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn mul_integer(&self, n: &Integer) -> Self {
        Rational::from(self * n)
    }
    fn mul_rational(&self, q: &Rational) -> Self {
        Rational::from(self * q)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
}

impl Scalar for Complex {
    fn zero_like(&self) -> Self {
        Complex::zero(self.prec())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn mul_integer(&self, n: &Integer) -> Self {
        match n.to_i64() {
            Some(m) => self.mul_int(m),
            None => Complex::mul_integer(self, n),
        }
    }
    fn mul_rational(&self, q: &Rational) -> Self {
        Complex::mul_rational(self, q)
    }
    fn neg(&self) -> Self {
        Complex::neg(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
}

/// `p_0 + p_1 X + ... + p_d X^d`; always stores exactly `d + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyD<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PolyD<T> {
    /// Builds a polynomial from its `d + 1` coefficients (`d = len - 1`).
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("PolyD needs at least one coefficient"));
        }
        Ok(PolyD { coeffs })
    }

    pub fn zero_from(template: &T, d: usize) -> Self {
        PolyD {
            coeffs: vec![template.zero_like(); d + 1],
        }
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &T {
        &self.coeffs[j]
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn add(&self, other: &PolyD<T>) -> Result<PolyD<T>> {
        check_same(self, other)?;
        Ok(PolyD {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &PolyD<T>) -> Result<PolyD<T>> {
        check_same(self, other)?;
        Ok(PolyD {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, x: &T) -> PolyD<T> {
        PolyD {
            coeffs: self.coeffs.iter().map(|a| a.mul(x)).collect(),
        }
    }

    pub fn neg(&self) -> PolyD<T> {
        PolyD {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// `p(X + s)` for an integer shift `s`, by repeated synthetic division.
    pub fn shift_int(&self, s: i64) -> PolyD<T> {
        if s == 0 {
            return self.clone();
        }
        let n = self.degree_bound();
        let s = Integer::from(s);
        let mut c = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n).rev() {
                let t = c[j + 1].mul_integer(&s);
                c[j].add_assign(&t);
            }
        }
        PolyD { coeffs: c }
    }

    /// `p(X + s)` for a scalar shift.
    pub fn shift(&self, s: &T) -> PolyD<T> {
        let n = self.degree_bound();
        let mut c = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n).rev() {
                let t = c[j + 1].mul(s);
                c[j].add_assign(&t);
            }
        }
        PolyD { coeffs: c }
    }

    /// `sym^d(S) p = (-X)^d p(-1/X)`; for even `d` this is also `S^{-1}`'s action.
    pub fn sym_s(&self) -> PolyD<T> {
        let d = self.degree_bound();
        let coeffs = (0..=d)
            .map(|m| {
                // coefficient of X^m is (-1)^m p_{d-m}
                let src = &self.coeffs[d - m];
                if m % 2 == 1 {
                    src.neg()
                } else {
                    src.clone()
                }
            })
            .collect();
        PolyD { coeffs }
    }

    /// `sym^d(T^m) p = p(X - m)`.
    pub fn sym_t_pow(&self, m: i64) -> PolyD<T> {
        self.shift_int(-m)
    }

    /// `sym^d(gamma^{-1}) p = (cX + d)^d p((aX + b)/(cX + d))`.
    pub fn sym_action_inv(&self, gamma: &GroupElement) -> PolyD<T> {
        let n = self.degree_bound();
        let num = [gamma.b().clone(), gamma.a().clone()];
        let den = [gamma.d().clone(), gamma.c().clone()];
        let num_pows = int_poly_powers(&num, n);
        let den_pows = int_poly_powers(&den, n);
        let mut out = vec![self.coeffs[0].zero_like(); n + 1];
        for (j, pj) in self.coeffs.iter().enumerate() {
            // p_j (aX+b)^j (cX+d)^{n-j}
            let prod = int_poly_mul(&num_pows[j], &den_pows[n - j]);
            for (m, coef) in prod.iter().enumerate() {
                if *coef != 0 {
                    let t = pj.mul_integer(coef);
                    out[m].add_assign(&t);
                }
            }
        }
        PolyD { coeffs: out }
    }

    /// `sym^d(gamma) p`.
    pub fn sym_action(&self, gamma: &GroupElement) -> PolyD<T> {
        self.sym_action_inv(&gamma.inverse())
    }

    /// Self-duality pairing `sum_i (-1)^{d-i} binom(d,i)^{-1} p_i q_{d-i}`.
    pub fn pair(&self, q: &PolyD<T>) -> Result<T> {
        check_same(self, q)?;
        let d = self.degree_bound();
        let w = pairing_weights(d);
        let mut acc = self.coeffs[0].zero_like();
        for i in 0..=d {
            let t = self.coeffs[i].mul(&q.coeffs[d - i]).mul_rational(&w[i]);
            acc.add_assign(&t);
        }
        Ok(acc)
    }

    /// `phi^vee(v) = <w, v>` for a cocycle value `w`.
    pub fn dual_apply(&self, v: &PolyD<T>) -> Result<T> {
        self.pair(v)
    }
}

fn check_same<T>(a: &PolyD<T>, b: &PolyD<T>) -> Result<()> {
    if a.coeffs.len() != b.coeffs.len() {
        return Err(Error::invalid(format!(
            "degree bounds differ: {} vs {}",
            a.coeffs.len() - 1,
            b.coeffs.len() - 1
        )));
    }
    Ok(())
}

fn int_poly_mul(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    out
}

/// Powers `0..=n` of the linear polynomial `l[0] + l[1] X`.
fn int_poly_powers(l: &[Integer; 2], n: usize) -> Vec<Vec<Integer>> {
    let mut out = vec![vec![Integer::from(1)]];
    for _ in 0..n {
        let next = int_poly_mul(out.last().unwrap(), l);
        out.push(next);
    }
    out
}

/// `(-1)^{d-i} / binom(d, i)` for `i = 0..=d`.
pub fn pairing_weights(d: usize) -> Vec<Rational> {
    (0..=d)
        .map(|i| {
            let w = Rational::from((Integer::from(1), binom_u(d as u32, i as u32)));
            if (d - i) % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect()
}

impl PolyD<Complex> {
    /// `(X - tau)^d`.
    pub fn x_minus_tau_pow(tau: &Complex, d: usize) -> PolyD<Complex> {
        let prec = tau.prec();
        let neg = tau.neg();
        let mut coeffs = vec![Complex::zero(prec); d + 1];
        let mut pw = Complex::one(prec);
        for j in (0..=d).rev() {
            coeffs[j] = pw.mul_integer(&binom_u(d as u32, j as u32));
            pw = &pw * &neg;
        }
        PolyD { coeffs }
    }

    /// Coefficients `f_r` with `p(X) = sum_r f_r (X - tau)^r`.
    pub fn to_x_minus_tau_basis(&self, tau: &Complex) -> Vec<Complex> {
        self.shift(tau).into_coeffs()
    }

    /// Inverse of [`to_x_minus_tau_basis`](Self::to_x_minus_tau_basis).
    pub fn from_x_minus_tau_basis(f: Vec<Complex>, tau: &Complex) -> Result<PolyD<Complex>> {
        Ok(PolyD::new(f)?.shift(&tau.neg()))
    }

    pub fn from_rational(p: &PolyD<Rational>, prec: u32) -> PolyD<Complex> {
        PolyD {
            coeffs: p.coeffs.iter().map(|c| Complex::from_rational(prec, c)).collect(),
        }
    }

    pub fn zero(prec: u32, d: usize) -> PolyD<Complex> {
        PolyD {
            coeffs: vec![Complex::zero(prec); d + 1],
        }
    }

    pub fn overlaps(&self, other: &PolyD<Complex>) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.overlaps(b))
    }

    pub fn contains_zero(&self) -> bool {
        self.coeffs.iter().all(Complex::contains_zero)
    }

    /// Upper bound for `sum_j |p_j|`.
    pub fn l1_upper(&self) -> crate::arith::Mag {
        self.coeffs
            .iter()
            .fold(crate::arith::Mag::zero(), |acc, c| acc.add(&c.abs_upper()))
    }
}

impl PolyD<Rational> {
    pub fn monomial(d: usize, j: usize) -> PolyD<Rational> {
        let mut coeffs = vec![Rational::new(); d + 1];
        coeffs[j] = Rational::from(1);
        PolyD { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::super::group::{word_product, Generator};
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn action_examples() {
        let x = PolyD::new(vec![q(0), q(1)]).unwrap();
        assert_eq!(x.sym_action(&GroupElement::identity()), x);
        // T^{-1} sends X to X + 1.
        assert_eq!(x.sym_action(&GroupElement::t_pow(-1)), PolyD::new(vec![q(1), q(1)]).unwrap());
        for j in 0..=2 {
            let p = PolyD::<Rational>::monomial(2, j);
            let img = p.sym_action(&GroupElement::s().inverse());
            let sign = if j % 2 == 1 { -1 } else { 1 };
            assert_eq!(img, PolyD::<Rational>::monomial(2, 2 - j).scale(&q(sign)));
            assert_eq!(p.sym_s(), img);
            assert_eq!(p.sym_s(), p.sym_action(&GroupElement::s()));
        }
        let p = PolyD::new(vec![q(3), q(-2), q(5), q(7)]).unwrap();
        assert_eq!(p.sym_t_pow(4), p.sym_action(&GroupElement::t_pow(4)));
    }

    #[test]
    fn pairing_examples() {
        let p = PolyD::<Rational>::monomial(2, 2);
        let q1 = PolyD::new(vec![q(1), q(-2), q(1)]).unwrap();
        assert_eq!(p.pair(&q1).unwrap(), 1);
        for d in [2usize, 5, 10] {
            for i in 0..=d {
                let v = PolyD::<Rational>::monomial(d, i)
                    .pair(&PolyD::<Rational>::monomial(d, d - i))
                    .unwrap();
                assert_eq!(v, pairing_weights(d)[i]);
            }
        }
        assert!(p.pair(&PolyD::<Rational>::monomial(3, 0)).is_err());
        let zero = PolyD::new(vec![q(0); 3]).unwrap();
        assert_eq!(zero.dual_apply(&q1).unwrap(), 0);
    }

    #[test]
    fn dual_apply_coordinates_d2() {
        // phi^vee = sum_i (-1)^{d-i} binom(d,i)^{-1} w_{d-i} (X^i)^vee
        let w = PolyD::new(vec![q(3), q(-5), q(11)]).unwrap();
        for i in 0..=2 {
            let v = PolyD::<Rational>::monomial(2, i);
            let direct = w.dual_apply(&v).unwrap();
            let formula = pairing_weights(2)[2 - i].clone() * &w.coeffs()[2 - i];
            assert_eq!(direct, formula);
        }
    }

    #[test]
    fn x_minus_tau_basis_round_trip() {
        let prec = 128;
        let tau = Complex::from_f64s(prec, 0.25, 1.5);
        let p = PolyD::new((0..6).map(|i| Complex::from_f64s(prec, i as f64, 1.0 - i as f64)).collect()).unwrap();
        let f = p.to_x_minus_tau_basis(&tau);
        let back = PolyD::from_x_minus_tau_basis(f, &tau).unwrap();
        assert!(back.overlaps(&p));
    }

    fn arb_word() -> impl Strategy<Value = Vec<Generator>> {
        prop::collection::vec(
            prop_oneof![Just(Generator::S), Just(Generator::T), Just(Generator::TInv)],
            0..12,
        )
    }

    fn arb_poly(d: usize) -> impl Strategy<Value = PolyD<Rational>> {
        prop::collection::vec(-50i64..50, d + 1)
            .prop_map(|v| PolyD::new(v.into_iter().map(Rational::from).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn representation_property(w1 in arb_word(), w2 in arb_word(), p in arb_poly(10), p2 in arb_poly(2)) {
            let g1 = word_product(&w1);
            let g2 = word_product(&w2);
            let g = &g1 * &g2;
            prop_assert_eq!(p.sym_action(&g), p.sym_action(&g2).sym_action(&g1));
            prop_assert_eq!(p2.sym_action(&g), p2.sym_action(&g2).sym_action(&g1));
        }

        #[test]
        fn pairing_invariance(w in arb_word(), p in arb_poly(10), q in arb_poly(10)) {
            let g = word_product(&w);
            prop_assert_eq!(p.sym_action(&g).pair(&q.sym_action(&g)).unwrap(), p.pair(&q).unwrap());
        }
    }
}
