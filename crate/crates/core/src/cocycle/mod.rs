//! Parabolic cocycles `phi` with values in `sym^d`, determined by `phi(S)` and
//! `phi(T) = 0` through `phi(g h) = sym^d(g) phi(h) + phi(g)`.

mod bounds;
mod lfunc;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::arith::Complex;
use crate::error::{Error, Result};
use crate::symd::{word_decompose, Generator, GroupElement, PolyD};

pub use bounds::{cocycle_sum_bound, twisted_l_bound};
pub use lfunc::{delta_period_polynomial, lambda_completed, lambda_order, period_polynomial};

/// Canonical entries of `(a b; c d)` with `c >= 1`, `0 <= d < c`,
/// `a = d^{-1} mod c` in `[0, c)` and `b = (ad - 1)/c`.
pub fn canonical_top_row(c: u64, d: u64) -> (i64, i64) {
    if c == 1 {
        return (0, -1);
    }
    let a = mod_inverse(d, c);
    let b = ((a as i128 * d as i128 - 1) / c as i128) as i64;
    (a as i64, b)
}

/// Inverse of `x` modulo `m` (`gcd(x, m) = 1`, `m >= 2`) in `[0, m)`.
pub fn mod_inverse(x: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, (x % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{x} is not invertible modulo {m}");
    t0.rem_euclid(m as i128) as u64
}

pub struct ParabolicCocycle {
    weight: u32,
    phi_s: PolyD<Complex>,
    eigenform: bool,
    memo_limit: u64,
    canonical: RwLock<HashMap<(u64, u64), Arc<PolyD<Complex>>>>,
    cache: RwLock<HashMap<GroupElement, Arc<PolyD<Complex>>>>,
}

impl std::fmt::Debug for ParabolicCocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicCocycle")
            .field("weight", &self.weight)
            .field("phi_s", &self.phi_s)
            .finish()
    }
}

impl ParabolicCocycle {
    /// Canonical-coset values with `c` up to this bound are memoized.
    pub const DEFAULT_MEMO_LIMIT: u64 = 256;

    /// Cocycle of a weight-`k` form with the given value at `S`
    /// (a polynomial of degree at most `k - 2`, with `k - 2` even).
    pub fn new(weight: u32, phi_s: PolyD<Complex>) -> Result<Self> {
        if weight < 2 || phi_s.degree_bound() + 2 != weight as usize {
            return Err(Error::invalid(format!(
                "phi(S) has degree bound {} but weight {weight} needs {}",
                phi_s.degree_bound(),
                weight as i64 - 2
            )));
        }
        if weight % 2 == 1 {
            return Err(Error::invalid("only even weights are supported"));
        }
        Ok(ParabolicCocycle {
            weight,
            phi_s,
            eigenform: false,
            memo_limit: Self::DEFAULT_MEMO_LIMIT,
            canonical: RwLock::new(HashMap::new()),
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// The zero cocycle for weight `k`.
    pub fn zero(weight: u32, prec: u32) -> Result<Self> {
        Self::new(weight, PolyD::zero(prec, weight.saturating_sub(2) as usize))
    }

    /// The cocycle of the Eichler integral of a normalized Hecke eigenform
    /// `f` of weight `k`. Only such cocycles come with the a priori value
    /// bound [`cocycle_sum_bound`] used for tail certification.
    pub fn from_eigenform(f: &crate::modforms::QSeries, k: u32, prec: u32) -> Result<Self> {
        let mut c = Self::new(k, period_polynomial(f, k, prec)?)?;
        c.eigenform = true;
        Ok(c)
    }

    /// The cocycle of the Eichler integral of `Delta`.
    pub fn for_delta(prec: u32) -> Result<Self> {
        let mut c = Self::new(12, delta_period_polynomial(prec)?)?;
        c.eigenform = true;
        Ok(c)
    }

    /// Whether [`cocycle_sum_bound`] applies to this cocycle.
    pub fn has_value_bound(&self) -> bool {
        self.eigenform || self.is_zero()
    }

    pub fn with_memo_limit(mut self, limit: u64) -> Self {
        self.memo_limit = limit;
        self
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn degree(&self) -> usize {
        self.phi_s.degree_bound()
    }

    pub fn prec(&self) -> u32 {
        self.phi_s.coeff(0).prec()
    }

    pub fn phi_s(&self) -> &PolyD<Complex> {
        &self.phi_s
    }

    pub fn is_zero(&self) -> bool {
        self.phi_s
            .coeffs()
            .iter()
            .all(|c| c.re.mid().is_zero() && c.im.mid().is_zero() && c.rad().is_zero())
    }

    fn zero_value(&self) -> PolyD<Complex> {
        PolyD::zero(self.prec(), self.degree())
    }

    /// `phi(w_1 ... w_n)`, folding the cocycle relation from the right.
    pub fn eval_word(&self, word: &[Generator]) -> PolyD<Complex> {
        // phi(S S w) = sym(-I) phi(w) + phi(-I) = phi(w) for even degree.
        let mut word = word;
        while word.len() >= 2 && word[0] == Generator::S && word[1] == Generator::S {
            word = &word[2..];
        }
        let mut acc = self.zero_value();
        let mut exact_zero = true;
        let mut i = word.len();
        while i > 0 {
            // Group runs of T^{+-1} into a single shift.
            let mut shift = 0i64;
            while i > 0 && word[i - 1] != Generator::S {
                shift += if word[i - 1] == Generator::T { 1 } else { -1 };
                i -= 1;
            }
            if shift != 0 && !exact_zero {
                acc = acc.sym_t_pow(shift);
            }
            if i > 0 {
                // word[i-1] == S
                acc = if exact_zero {
                    self.phi_s.clone()
                } else {
                    acc.sym_s().add(&self.phi_s).expect("same degree")
                };
                exact_zero = false;
                i -= 1;
            }
        }
        acc
    }

    /// `phi(gamma)` via [`word_decompose`]; results are cached per element.
    pub fn eval(&self, gamma: &GroupElement) -> PolyD<Complex> {
        if gamma.c() == &0 {
            return self.zero_value();
        }
        // phi(-g) = phi(g); normalize to c > 0 for the cache key.
        let key = if gamma.c() < &0 { gamma.neg() } else { gamma.clone() };
        if let Some(v) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return (**v).clone();
        }
        let value = self.eval_word(&word_decompose(&key));
        self.cache
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, Arc::new(value.clone()));
        value
    }

    /// `phi` at the canonical coset matrix with bottom row `(c, d)`.
    pub fn eval_canonical(&self, c: u64, d: u64) -> Arc<PolyD<Complex>> {
        assert!(c >= 1 && d < c.max(1) || c == 1);
        if c == 1 {
            return Arc::new(self.phi_s.clone());
        }
        if c <= self.memo_limit {
            if let Some(v) = self.canonical.read().unwrap_or_else(|e| e.into_inner()).get(&(c, d)) {
                return v.clone();
            }
        }
        let (a, b) = canonical_top_row(c, d);
        let (ci, di) = (c as i128, d as i128);
        let (a, b) = (a as i128, b as i128);
        // M = T^m S M' with M' = (c, d; mc - a, md - b) and |mc - a| <= c/2.
        let m: i128 = if 2 * a > ci { 1 } else { 0 };
        let (mut r, mut s) = (m * ci - a, m * di - b);
        let (mut top_a, _) = (ci, di);
        if r < 0 {
            // phi(-M') = phi(M')
            r = -r;
            s = -s;
            top_a = -top_a;
        }
        let c2 = r as u64;
        let d2 = s.rem_euclid(r) as u64;
        let (a2, _) = canonical_top_row(c2, d2);
        // -+M' = T^{m2} Mcan(c2, d2) T^{m'}
        let m2 = (top_a - a2 as i128) / r;
        debug_assert_eq!((top_a - a2 as i128) % r, 0);
        let inner = self.eval_canonical(c2, d2);
        let value = inner
            .sym_t_pow(m2 as i64)
            .sym_s()
            .add(&self.phi_s)
            .expect("same degree")
            .sym_t_pow(m as i64);
        let value = Arc::new(value);
        if c <= self.memo_limit {
            self.canonical
                .write()
                .unwrap_or_else(|e| e.into_inner())
                .insert((c, d), value.clone());
        }
        value
    }

    /// `phi(gamma^{-1})` for the canonical coset matrix `gamma` with bottom row
    /// `(c, d)`.
    pub fn eval_rep_inverse(&self, c: u64, d: u64) -> PolyD<Complex> {
        if c == 1 {
            return self.phi_s.clone();
        }
        let (a, _) = canonical_top_row(c, d);
        // -gamma^{-1} = (-d, b; c, -a) = T^m Mcan(c, -a mod c) T^{m'}
        let d2 = (-(a as i128)).rem_euclid(c as i128) as u64;
        let a2 = (-(d as i128)).rem_euclid(c as i128);
        let m = (-(d as i128) - a2) / c as i128;
        self.eval_canonical(c, d2).sym_t_pow(m as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symd::word_product;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn delta_cocycle() -> &'static ParabolicCocycle {
        static C: OnceLock<ParabolicCocycle> = OnceLock::new();
        C.get_or_init(|| ParabolicCocycle::for_delta(160).unwrap())
    }

    fn is_exact_zero(p: &PolyD<Complex>) -> bool {
        p.coeffs().iter().all(|c| c.re.mid().is_zero() && c.im.mid().is_zero() && c.rad().is_zero())
    }

    #[test]
    fn parabolic_values_vanish_exactly() {
        let phi = delta_cocycle();
        assert!(is_exact_zero(&phi.eval(&GroupElement::t())));
        assert!(is_exact_zero(&phi.eval(&GroupElement::t_pow(-7))));
        assert!(is_exact_zero(&phi.eval(&GroupElement::identity())));
        assert!(is_exact_zero(&phi.eval(&(&GroupElement::s() * &GroupElement::s()))));
        assert_eq!(phi.eval(&GroupElement::s()), *phi.phi_s());
    }

    #[test]
    fn inverse_relation() {
        let phi = delta_cocycle();
        let g = GroupElement::new(5, 2, 7, 3).unwrap();
        let sum = phi.eval(&g.inverse()).sym_action(&g).add(&phi.eval(&g)).unwrap();
        assert!(sum.contains_zero());
    }

    #[test]
    fn canonical_path_matches_word_fold() {
        let phi = delta_cocycle();
        for c in 1..40u64 {
            for d in 0..c {
                if gcd(c, d) != 1 {
                    continue;
                }
                let (a, b) = canonical_top_row(c, d);
                let g = GroupElement::new(a, b, c as i64, d as i64).unwrap();
                assert!(phi.eval_canonical(c, d).overlaps(&phi.eval(&g)), "c={c} d={d}");
                assert!(phi.eval_rep_inverse(c, d).overlaps(&phi.eval(&g.inverse())), "inverse c={c} d={d}");
            }
        }
    }

    #[test]
    fn mod_inverse_small() {
        assert_eq!(mod_inverse(3, 7), 5);
        assert_eq!(mod_inverse(1, 2), 1);
        assert_eq!(canonical_top_row(1, 0), (0, -1));
        assert_eq!(canonical_top_row(5, 2), (3, 1));
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn arb_word() -> impl Strategy<Value = Vec<Generator>> {
        prop::collection::vec(
            prop_oneof![Just(Generator::S), Just(Generator::T), Just(Generator::TInv)],
            0..=12,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]
        #[test]
        fn cocycle_relation(w1 in arb_word(), w2 in arb_word()) {
            let phi = delta_cocycle();
            let g1 = word_product(&w1);
            let g2 = word_product(&w2);
            let lhs = phi.eval(&(&g1 * &g2));
            let rhs = phi.eval(&g2).sym_action(&g1).add(&phi.eval(&g1)).unwrap();
            prop_assert!(lhs.overlaps(&rhs));
            prop_assert!(phi.eval_word(&w1).overlaps(&phi.eval(&g1)));
        }
    }
}
