//! Truncation bounds for the Fourier expansions of second order Eisenstein
//! series built from the cocycle of a normalized Hecke eigenform of weight `l`.

use rug::Rational;

use crate::arith::special::{factorial, inc_gamma_upper_int, zeta_real, zeta_tail_bound};
use crate::arith::{Mag, Real};
use crate::error::{Error, Result};

const P: u32 = 64;

/// `k + 2j - 2l + 3`, the decay exponent of the double-coset sum for type
/// `(1, sym^d)` once the `phi(c)` choices of `d` are counted.
pub fn triv_sym_exponent(k: u32, j: usize, l: u32) -> i64 {
    k as i64 + 2 * j as i64 - 2 * l as i64 + 3
}

fn check(k: u32, j: usize, l: u32) -> Result<i64> {
    if l <= 3 {
        return Err(Error::invalid(format!("eigenform weight l = {l} must exceed 3")));
    }
    if j + 2 > l as usize {
        return Err(Error::invalid(format!("j = {j} exceeds d = {}", l - 2)));
    }
    let s = triv_sym_exponent(k, j, l);
    if s <= 1 {
        return Err(Error::Divergent(format!(
            "need k > 2 + 2(d - j), i.e. k + 2j - 2l + 3 > 1; got {s} for k = {k}, j = {j}, l = {l}"
        )));
    }
    Ok(s)
}

/// `zeta((l-1)/2)^2 e^2 (l-2)!^2` as a ball.
fn eigen_constant(l: u32) -> Result<Real> {
    let z = zeta_real(&Real::from_rational(P, &Rational::from((l as i64 - 1, 2))))?;
    let g = Real::from_integer(P, &factorial(l - 2));
    Ok(&(&z.sqr() * &g.sqr()) * &Real::from_i64(P, 2).exp())
}

/// `2^j e^2 (l-2)!^2 (2 pi)^{k+j-l} / (k-1)! zeta((l-1)/2)^2`.
fn coeff_constant(k: u32, j: usize, l: u32) -> Result<Real> {
    let base = eigen_constant(l)?;
    let tp = Real::two_pi(P);
    let e = k as i64 + j as i64 - l as i64;
    let v = &base.mul_pow2(j as i32) * &tp.pow_i(e);
    Ok(&v / &Real::from_integer(P, &factorial(k - 1)))
}

/// The coefficient-tail estimate as displayed:
/// `(1_{C=1} + 1/((k+2j-2l+2) C^{k+2j-2l+3})) 2^j e^2 (l-2)!^2 (2 pi)^{k+j-l}
/// zeta((l-1)/2)^2 / (k-1)!`, to be multiplied by `n^{k+j-1}`.
///
/// For `C >= 2` this omits the count of residues `d mod c` and is not a valid
/// bound in general; certification uses [`coeff_tail_bound_certified`].
pub fn coeff_tail_bound(k: u32, j: usize, l: u32, c: u64) -> Result<Mag> {
    let s = check(k, j, l)?;
    if c == 0 {
        return Err(Error::invalid("C must be positive"));
    }
    let cr = Real::from_i64(P, c as i64);
    let mut f = cr.pow(s as u32).mul_int(s - 1).recip();
    if c == 1 {
        f += &Real::one(P);
    }
    Ok((&f * &coeff_constant(k, j, l)?).abs_upper())
}

/// Sound variant of [`coeff_tail_bound`]: the same constant times
/// `sum_{c >= C} c^{-(k+2j-2l+3)}`, which accounts for `phi(c) <= c`
/// representatives per `c`.
pub fn coeff_tail_bound_certified(k: u32, j: usize, l: u32, c: u64) -> Result<Mag> {
    let s = check(k, j, l)?;
    if c == 0 {
        return Err(Error::invalid("C must be positive"));
    }
    Ok(coeff_constant(k, j, l)?.abs_upper().mul(&zeta_tail_bound(s as f64, c)))
}

/// `(k+2j-2l+3)/(k+2j-2l+2) 2^j e^2 (l-2)!^2 / ((k-1)! (2 pi)^l) zeta((l-1)/2)^2
///  Gamma(k+j, 2 pi (N-1) y) / y^{k+j}`.
///
/// The integral comparison behind it needs `n^{k+j-1} e^{-2 pi n y}` to be
/// decreasing from `N - 1` on, so `N >= 1 + (k+j-1)/(2 pi y)` is required.
pub fn series_tail_bound(k: u32, j: usize, l: u32, n: u64, y_low: &Mag) -> Result<Mag> {
    let s = check(k, j, l)?;
    if y_low.is_zero() {
        return Err(Error::invalid("y must be positive"));
    }
    let y = Real::from_float(y_low.to_float(P));
    let x = &y * &Real::two_pi(P);
    let a = k as i64 + j as i64;
    let xn = x.mul_int(n as i64 - 1);
    if n < 2 || !(&xn - &Real::from_i64(P, a - 1)).is_positive() && !xn.contains_f64((a - 1) as f64) {
        return Err(Error::precondition(format!(
            "N = {n} is below 1 + (k+j-1)/(2 pi y) = {:.3}",
            1.0 + (a - 1) as f64 / x.to_f64()
        )));
    }
    let g = inc_gamma_upper_int(a, &xn)?;
    let base = eigen_constant(l)?.mul_pow2(j as i32);
    let v = &(&base * &g) / &(&Real::from_integer(P, &factorial(k - 1)) * &Real::two_pi(P).pow(l));
    let v = &v.mul_rational(&Rational::from((s, s - 1))) / &y.pow(a as u32);
    Ok(v.abs_upper())
}

/// Smallest `N` meeting the precondition of [`series_tail_bound`].
pub fn series_min_terms(k: u32, j: usize, y_low: &Mag) -> u64 {
    let x = y_low.to_f64() * std::f64::consts::TAU * (1.0 - 1e-12);
    ((k as f64 + j as f64 - 1.0) / x).ceil() as u64 + 2
}

/// Type `(sym^d, 1)`: the analogous estimate derived from the cocycle bound,
/// `e^2 Gamma(l-1)^2 (2 pi)^{-l} zeta((l-1)/2)^2 K_r(n) sum_{c >= C} c^{-(k-l+1)}`
/// with `K_r(n) = max_j sum_{i=r}^{j} (2 pi)^{k-j+i}/(k-j+i-1)! binom(i,r) binom(j,i) n^{k-j+i-1}`.
pub fn sym_triv_tail_bound(k: u32, l: u32, r: usize, n: u64, c: u64) -> Result<Mag> {
    let s = sym_triv_exponent(k, l)?;
    let d = l as usize - 2;
    let tp = Real::two_pi(P);
    let nr = Real::from_i64(P, n as i64);
    let mut kmax = Mag::zero();
    for j in r..=d {
        let mut acc = Real::zero(P);
        for i in r..=j {
            let e = k as usize - j + i;
            let b = Rational::from(crate::arith::special::binom_u(i as u32, r as u32))
                * Rational::from(crate::arith::special::binom_u(j as u32, i as u32));
            let t = &(&tp.pow(e as u32) * &nr.pow(e as u32 - 1)) / &Real::from_integer(P, &factorial(e as u32 - 1));
            acc += &t.mul_rational(&b);
        }
        kmax = kmax.max(&acc.abs_upper());
    }
    let base = (&eigen_constant(l)? / &tp.pow(l)).abs_upper();
    Ok(base.mul(&kmax).mul(&zeta_tail_bound(s as f64, c)))
}

/// `k - l + 1`, the decay exponent for type `(sym^d, 1)`.
pub fn sym_triv_exponent(k: u32, l: u32) -> Result<i64> {
    let s = k as i64 - l as i64 + 1;
    if l <= 3 || s <= 1 {
        return Err(Error::Divergent(format!(
            "type (sym^d, 1) needs k > l = d + 2; got k = {k}, l = {l}"
        )));
    }
    Ok(s)
}
