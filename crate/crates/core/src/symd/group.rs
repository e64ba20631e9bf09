//! Elements of SL_2(Z) with arbitrary-size entries.

use std::fmt;
use std::ops::Mul;

use rug::Integer;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    a: Integer,
    b: Integer,
    c: Integer,
    d: Integer,
}

impl GroupElement {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>, d: impl Into<Integer>) -> Result<Self> {
        let g = GroupElement {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        let det = Integer::from(&g.a * &g.d) - Integer::from(&g.b * &g.c);
        if det != 1 {
            return Err(Error::invalid(format!("determinant of {g} is {det}, not 1")));
        }
        Ok(g)
    }

    fn raw(a: Integer, b: Integer, c: Integer, d: Integer) -> Self {
        GroupElement { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(1.into(), 0.into(), 0.into(), 1.into())
    }

    /// `S = (0 -1; 1 0)`.
    pub fn s() -> Self {
        Self::raw(0.into(), (-1).into(), 1.into(), 0.into())
    }

    /// `T = (1 1; 0 1)`.
    pub fn t() -> Self {
        Self::t_pow(1)
    }

    pub fn t_pow(m: i64) -> Self {
        Self::raw(1.into(), m.into(), 0.into(), 1.into())
    }

    pub fn minus_identity() -> Self {
        Self::raw((-1).into(), 0.into(), 0.into(), (-1).into())
    }

    pub fn a(&self) -> &Integer {
        &self.a
    }
    pub fn b(&self) -> &Integer {
        &self.b
    }
    pub fn c(&self) -> &Integer {
        &self.c
    }
    pub fn d(&self) -> &Integer {
        &self.d
    }

    pub fn inverse(&self) -> Self {
        Self::raw(self.d.clone(), Integer::from(-&self.b), Integer::from(-&self.c), self.a.clone())
    }

    pub fn neg(&self) -> Self {
        Self::raw(
            Integer::from(-&self.a),
            Integer::from(-&self.b),
            Integer::from(-&self.c),
            Integer::from(-&self.d),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 && self.b == 0 && self.c == 0 && self.d == 1
    }

    /// Entries as `i64`, if they fit.
    pub fn to_i64s(&self) -> Option<[i64; 4]> {
        Some([self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?, self.d.to_i64()?])
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, r: &GroupElement) -> GroupElement {
        let e = |x: &Integer, y: &Integer, z: &Integer, w: &Integer| Integer::from(x * y) + Integer::from(z * w);
        GroupElement::raw(
            e(&self.a, &r.a, &self.b, &r.c),
            e(&self.a, &r.b, &self.b, &r.d),
            e(&self.c, &r.a, &self.d, &r.c),
            e(&self.c, &r.b, &self.d, &r.d),
        )
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Generators appearing in words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    S,
    T,
    TInv,
}

impl Generator {
    pub fn matrix(self) -> GroupElement {
        match self {
            Generator::S => GroupElement::s(),
            Generator::T => GroupElement::t(),
            Generator::TInv => GroupElement::t_pow(-1),
        }
    }
}

/// Nearest integer to `n / d` (`d != 0`), ties rounded toward zero.
pub(crate) fn round_ties_to_zero(n: &Integer, d: &Integer) -> Integer {
    let (n, d) = if *d < 0 {
        (Integer::from(-n), Integer::from(-d))
    } else {
        (n.clone(), d.clone())
    };
    let (q, r) = n.div_rem_floor(d.clone());
    // n = q d + r with 0 <= r < d; compare 2r with d.
    let twice = Integer::from(&r * 2u32);
    match twice.cmp(&d) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1u32,
        // Exactly halfway between q and q+1: pick the one nearer zero.
        std::cmp::Ordering::Equal => {
            if q >= 0 {
                q
            } else {
                q + 1u32
            }
        }
    }
}

/// Writes `gamma` as a word in `S`, `T`, `T^{-1}` whose product is `gamma`.
pub fn word_decompose(gamma: &GroupElement) -> Vec<Generator> {
    // Peel factors off the right: M = M2 * S * T^m.
    let mut right: Vec<Generator> = Vec::new();
    let mut m = gamma.clone();
    while m.c != 0 {
        let shift = round_ties_to_zero(&m.d, &m.c);
        let k = shift.to_i64().expect("shift fits in i64 for reasonable inputs");
        // M1 = M T^{-k}
        let m1 = &m * &GroupElement::t_pow(-k);
        push_t_power(&mut right, k);
        right.push(Generator::S);
        // M2 = M1 S^{-1}
        m = &m1 * &GroupElement::s().inverse();
    }
    let mut left = Vec::new();
    let b = m.b.to_i64().expect("translation fits in i64");
    if m.a == 1 {
        push_t_power(&mut left, b);
    } else {
        // -T^{-b} = S^2 T^{-b}
        left.push(Generator::S);
        left.push(Generator::S);
        push_t_power(&mut left, -b);
    }
    right.reverse();
    left.extend(right);
    left
}

/// Appends `T^k`.
fn push_t_power(out: &mut Vec<Generator>, k: i64) {
    let g = if k >= 0 { Generator::T } else { Generator::TInv };
    for _ in 0..k.unsigned_abs() {
        out.push(g);
    }
}

pub fn word_product(word: &[Generator]) -> GroupElement {
    word.iter()
        .fold(GroupElement::identity(), |acc, g| &acc * &g.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_words() {
        assert_eq!(word_decompose(&GroupElement::t_pow(5)), vec![Generator::T; 5]);
        assert_eq!(word_decompose(&GroupElement::s()), vec![Generator::S]);
        assert!(word_decompose(&GroupElement::identity()).is_empty());
        let g = GroupElement::new(2, 1, 1, 1).unwrap();
        assert_eq!(word_product(&word_decompose(&g)), g);
        assert_eq!(word_product(&word_decompose(&GroupElement::minus_identity())), GroupElement::minus_identity());
    }

    #[test]
    fn determinant_is_checked() {
        assert!(GroupElement::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn ties_round_toward_zero() {
        let r = |n: i64, d: i64| round_ties_to_zero(&Integer::from(n), &Integer::from(d)).to_i64().unwrap();
        assert_eq!(r(1, 2), 0);
        assert_eq!(r(-1, 2), 0);
        assert_eq!(r(3, 2), 1);
        assert_eq!(r(-3, 2), -1);
        assert_eq!(r(7, 3), 2);
        assert_eq!(r(5, -3), -2);
    }

    fn arb_word() -> impl Strategy<Value = Vec<Generator>> {
        prop::collection::vec(
            prop_oneof![Just(Generator::S), Just(Generator::T), Just(Generator::TInv)],
            0..20,
        )
    }

    proptest! {
        #[test]
        fn decomposition_multiplies_back(word in arb_word()) {
            let g = word_product(&word);
            prop_assert_eq!(word_product(&word_decompose(&g)), g);
        }
    }
}
