//! Generalized second order Eisenstein series of types `(1, sym^d)` and
//! `(sym^d, 1)`: double-coset representatives, Fourier coefficients as sums
//! over double cosets, and certified evaluation.

mod bounds;
mod kernel;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::arith::special::{binom_u, factorial};
use crate::arith::{Complex, Mag, Real};
use crate::cocycle::{canonical_top_row, ParabolicCocycle};
use crate::error::{Error, Result};
use crate::modforms::imag_lower;
use crate::par::map_indexed;
use kernel::RootSums;
use crate::symd::{GroupElement, PolyD};
use serde::{Deserialize, Serialize};

pub use bounds::{
    coeff_tail_bound, coeff_tail_bound_certified, series_min_terms, series_tail_bound, sym_triv_exponent,
    sym_triv_tail_bound, triv_sym_exponent,
};

/// Representative of a double coset `Gamma_inf \ gamma / Gamma_inf` with
/// `c >= 1`: bottom row `(c, d)` with `0 <= d < c`, `a = d^{-1} mod c` in
/// `[0, c)`, `b = (ad - 1)/c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DoubleCosetRep {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub d: u64,
}

impl DoubleCosetRep {
    pub fn new(c: u64, d: u64) -> Result<Self> {
        if c == 0 || d >= c || gcd(c, d) != 1 {
            return Err(Error::invalid(format!("({c}, {d}) is not a valid bottom row")));
        }
        let (a, b) = canonical_top_row(c, d);
        Ok(DoubleCosetRep { a, b, c, d })
    }

    pub fn matrix(&self) -> GroupElement {
        GroupElement::new(self.a, self.b, self.c as i64, self.d as i64).expect("determinant one")
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn residues(c: u64) -> impl Iterator<Item = u64> {
    (0..c).filter(move |&d| gcd(c, d) == 1)
}

/// All representatives with `1 <= c <= c_max`.
pub fn coset_reps(c_max: u64) -> Vec<DoubleCosetRep> {
    (1..=c_max)
        .flat_map(|c| residues(c).map(move |d| DoubleCosetRep::new(c, d).expect("coprime")))
        .collect()
}

/// `e(m / c)` for `m = 0..c`, with a common bound for the component radii.
fn roots_of_unity(c: u64, prec: u32) -> (Vec<Complex>, Mag) {
    let roots: Vec<Complex> = (0..c)
        .map(|m| Complex::e_real(&Real::from_rational(prec, &Rational::from((m, c)))))
        .collect();
    let rad = roots.iter().fold(Mag::zero(), |a, r| a.max(&r.re.rad()).max(&r.im.rad()));
    (roots, rad)
}

fn check_triv_sym(phi: &ParabolicCocycle, k: u32, j: usize) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::invalid(format!("k = {k} must be even")));
    }
    if j > phi.degree() {
        return Err(Error::invalid(format!("j = {j} exceeds d = {}", phi.degree())));
    }
    triv_sym_exponent(k, j, phi.weight())
        .gt(&1)
        .then_some(())
        .ok_or_else(|| {
            Error::Divergent(format!(
                "need k + 2j - 2l + 3 > 1 (k > 2 + 2(d - j)); got k = {k}, j = {j}, l = {}",
                phi.weight()
            ))
        })
}

/// Fourier expansion `sum_{1 <= n <= n_max} c(n) e(n tau)` of
/// `E_k^{[1]}(tau; phi^vee, j)` with the double-coset sum cut at `c_max`.
/// Each coefficient's radius includes the certified coefficient tail.
#[derive(Clone, Debug)]
pub struct TrivSymExpansion {
    pub k: u32,
    pub j: usize,
    pub l: u32,
    pub c_max: u64,
    /// Index `n`; entry 0 is an exact zero.
    pub coeffs: Vec<Complex>,
    zero_cocycle: bool,
}

impl TrivSymExpansion {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Certified value at `tau`: the partial sum plus the series tail bound.
    pub fn eval(&self, tau: &Complex) -> Result<Complex> {
        let y_low = imag_lower(tau)?;
        let prec = tau.prec();
        if self.zero_cocycle {
            return Ok(Complex::zero(prec));
        }
        // Horner on the midpoints; the coefficient radii are summed separately
        // against |q|^n, which avoids the rectangular blow-up of ball products.
        let q = Complex::e(tau);
        let qabs = q.abs_upper();
        let mut acc = Complex::zero(prec);
        let mut err = Mag::zero();
        let mut qn = Mag::from_f64(1.0);
        for c in &self.coeffs {
            err = err.add(&c.rad().mul(&qn));
            qn = qn.mul(&qabs);
        }
        for c in self.coeffs.iter().rev() {
            acc = &acc * &q;
            acc += &c.mid_ball();
        }
        acc.add_error(err);
        acc.add_error(series_tail_bound(self.k, self.j, self.l, self.coeffs.len() as u64, &y_low)?);
        Ok(acc)
    }
}

/// `(-1)^u / binom(d, u)` for `u = 0..=d`.
fn dual_weights(d: usize, prec: u32) -> Vec<Real> {
    (0..=d)
        .map(|u| {
            let x = Real::from_rational(prec, &Rational::from((1, binom_u(d as u32, u as u32))));
            if u % 2 == 1 {
                x.neg()
            } else {
                x
            }
        })
        .collect()
}

/// `v_m = phi^vee(w)((X + t)^m) = sum_u binom(m, u) t^{m-u} P_u` with
/// `P_u = (-1)^u w_{D-u} / binom(D, u)`, for `m = D-j..=D`. Uses the Pascal
/// recurrence `T_s[i] = t T_{s-1}[i] + T_{s-1}[i+1]`, where `T_s[0] = v_s`.
fn pairing_powers(w: &PolyD<Complex>, t: &Real, j: usize, weights: &[Real]) -> Vec<Complex> {
    let dd = weights.len() - 1;
    let mut tab: Vec<Complex> = (0..=dd).map(|u| w.coeff(dd - u).mul_real(&weights[u])).collect();
    let mut out = Vec::with_capacity(j + 1);
    if j == dd {
        out.push(tab[0].clone());
    }
    for s in 1..=dd {
        for i in 0..=dd - s {
            let mut next = tab[i + 1].clone();
            next.add_mul_real(&tab[i], t);
            tab[i] = next;
        }
        if s + j >= dd {
            out.push(tab[0].clone());
        }
    }
    out
}

/// `U_r(rho) = sum_{d mod c} e(rho d / c) phi^vee(gamma_d^{-1})((X + d/c)^{D-j+r})`
/// for `rho < min(c, n_max + 1)`; the value at `n` is `U_r(n mod c)`.
fn triv_sym_u(phi: &ParabolicCocycle, c: u64, j: usize, n_max: usize, weights: &[Real], prec: u32) -> Vec<Vec<Complex>> {
    let rho_count = (c as usize).min(n_max + 1);
    let (roots, e_rad) = roots_of_unity(c, prec);
    let mut sums = RootSums::new(j + 1, rho_count, prec);
    for d in residues(c) {
        let p = phi.eval_rep_inverse(c, d);
        let t = Real::from_rational(prec, &Rational::from((d, c)));
        let v = pairing_powers(&p, &t, j, weights);
        sums.push(&v, |rho| &roots[((rho as u64 * d) % c) as usize]);
    }
    sums.finish(&e_rad)
}

const CHUNK: u64 = 8;

/// Coefficients of `E_k^{[1]}(.; phi^vee, j)` for every `k` in `ks`, for
/// `n = 1..=n_max`, summing double cosets with `c <= c_max`.
pub fn triv_sym_expansions(
    phi: &ParabolicCocycle,
    ks: &[u32],
    j: usize,
    n_max: usize,
    c_max: u64,
    prec: u32,
) -> Result<Vec<TrivSymExpansion>> {
    for &k in ks {
        check_triv_sym(phi, k, j)?;
    }
    if c_max == 0 {
        return Err(Error::invalid("c_max must be positive"));
    }
    let dd = phi.degree();
    let l = phi.weight();
    let zero = phi.is_zero();
    if zero {
        return Ok(ks
            .iter()
            .map(|&k| TrivSymExpansion {
                k,
                j,
                l,
                c_max,
                coeffs: vec![Complex::zero(prec); n_max + 1],
                zero_cocycle: true,
            })
            .collect());
    }
    if !phi.has_value_bound() {
        return Err(Error::precondition("tail certification needs the cocycle of a Hecke eigenform"));
    }
    let weights = dual_weights(dd, prec);
    let exps: Vec<u32> = ks.iter().map(|&k| k + 2 * j as u32 - dd as u32).collect();

    // sums[ki][r][n] = sum_c c^{-(k+2j-D)} U_r(c, n)
    let chunks = c_max.div_ceil(CHUNK) as usize;
    let partials = map_indexed(chunks, |ci| {
        let mut s = vec![vec![vec![Complex::zero(prec); n_max + 1]; j + 1]; ks.len()];
        let lo = ci as u64 * CHUNK + 1;
        let hi = (lo + CHUNK - 1).min(c_max);
        for c in lo..=hi {
            let u = triv_sym_u(phi, c, j, n_max, &weights, prec);
            let cr = Real::from_i64(prec, c as i64);
            for (ki, &e) in exps.iter().enumerate() {
                let w = cr.pow(e).recip();
                for (r, ur) in u.iter().enumerate() {
                    for n in 1..=n_max {
                        s[ki][r][n].add_mul_real(&ur[n % c as usize], &w);
                    }
                }
            }
        }
        s
    });
    let mut sums = vec![vec![vec![Complex::zero(prec); n_max + 1]; j + 1]; ks.len()];
    for part in partials {
        for (ki, pk) in part.into_iter().enumerate() {
            for (r, pr) in pk.into_iter().enumerate() {
                for (n, x) in pr.into_iter().enumerate() {
                    sums[ki][r][n] += &x;
                }
            }
        }
    }

    let two_pi = Real::two_pi(prec);
    let mut out = Vec::with_capacity(ks.len());
    for (ki, &k) in ks.iter().enumerate() {
        let tail = coeff_tail_bound_certified(k, j, l, c_max + 1)?;
        let mut coeffs = vec![Complex::zero(prec); n_max + 1];
        for (n, cn) in coeffs.iter_mut().enumerate().skip(1) {
            let mut acc = Complex::zero(prec);
            for r in 0..=j {
                let e = k + r as u32;
                // (-1)^j binom(j, r) (2 pi i)^{k+r} / (k+r-1)! n^{k+r-1}
                let mut a = two_pi.pow(e).mul_integer(&binom_u(j as u32, r as u32));
                a = &a / &Real::from_integer(prec, &factorial(e - 1));
                a = a.mul_integer(&Integer::from(n).pow(e - 1));
                if j % 2 == 1 {
                    a = a.neg();
                }
                let term = sums[ki][r][n].mul_real(&a).mul_i_pow(e as i64);
                acc += &term;
            }
            let npow = Mag::from_u64(n as u64).pow(k + j as u32 - 1);
            acc.add_error(tail.mul(&npow));
            *cn = acc;
        }
        out.push(TrivSymExpansion {
            k,
            j,
            l,
            c_max,
            coeffs,
            zero_cocycle: false,
        });
    }
    Ok(out)
}

/// Single coefficient `c(n)` of `E_k^{[1]}(.; phi^vee, j)` with `c <= c_max`.
pub fn g2es_coeff_triv_sym(k: u32, phi: &ParabolicCocycle, j: usize, n: usize, c_max: u64, prec: u32) -> Result<Complex> {
    if n == 0 {
        return Ok(Complex::zero(prec));
    }
    let e = triv_sym_expansions(phi, &[k], j, n, c_max, prec)?;
    Ok(e[0].coeffs[n].clone())
}

/// The summand of `c(n)` contributed by a single double coset, computed from an
/// arbitrary matrix in it; used to test representative independence.
pub fn triv_sym_summand(phi: &ParabolicCocycle, gamma: &GroupElement, k: u32, j: usize, n: u64, prec: u32) -> Result<Complex> {
    check_triv_sym(phi, k, j)?;
    let [_, _, c, d] = gamma.to_i64s().ok_or_else(|| Error::invalid("matrix entries too large"))?;
    if c == 0 {
        return Err(Error::invalid("summand needs c != 0"));
    }
    let dd = phi.degree();
    let p = phi.eval(&gamma.inverse());
    let t = Real::from_rational(prec, &Rational::from((d, c)));
    let e_ = Complex::e_real(&Real::from_rational(prec, &Rational::from((n as i64 * d, c))));
    let cpow = Real::from_i64(prec, c).pow_i(-(k as i64 + 2 * j as i64 - dd as i64));
    let mut acc = Complex::zero(prec);
    for r in 0..=j {
        let m = dd - j + r;
        // (X + t)^m
        let mut q = vec![Complex::zero(prec); dd + 1];
        for (u, qu) in q.iter_mut().enumerate().take(m + 1) {
            *qu = Complex::from_real(t.pow((m - u) as u32).mul_integer(&binom_u(m as u32, u as u32)));
        }
        let v = p.dual_apply(&crate::symd::PolyD::new(q)?)?;
        let e = k + r as u32;
        let mut a = Real::two_pi(prec).pow(e).mul_integer(&binom_u(j as u32, r as u32));
        a = &a / &Real::from_integer(prec, &factorial(e - 1));
        a = a.mul_integer(&Integer::from(n).pow(e - 1));
        acc += &v.mul_real(&a).mul_i_pow(e as i64);
    }
    if j % 2 == 1 {
        acc = acc.neg();
    }
    Ok((&acc * &e_).mul_real(&cpow))
}

/// Coefficients `c(n)_r`, `n = 1..=n_max`, of `E_k^{[1]}(.; phi)` (type
/// `(sym^d, 1)`), summing double cosets with `c <= c_max`; radii include the
/// derived tail bound [`sym_triv_tail_bound`].
pub fn g2es_coeffs_sym_triv(phi: &ParabolicCocycle, k: u32, r: usize, n_max: usize, c_max: u64, prec: u32) -> Result<Vec<Complex>> {
    let dd = phi.degree();
    let l = phi.weight();
    if k % 2 == 1 {
        return Err(Error::invalid(format!("k = {k} must be even")));
    }
    sym_triv_exponent(k, l)?;
    if r > dd || phi.is_zero() {
        return Ok(vec![Complex::zero(prec); n_max + 1]);
    }
    if !phi.has_value_bound() {
        return Err(Error::precondition("tail certification needs the cocycle of a Hecke eigenform"));
    }
    // Y_s(c, d) = sum_{i=r}^{D-s} binom(i, r) binom(i+s, i) (-d/c)^{i-r} p_{i+s}
    let smax = dd - r;
    let chunks = c_max.div_ceil(CHUNK) as usize;
    let partials = map_indexed(chunks, |ci| {
        let mut acc = vec![vec![Complex::zero(prec); n_max + 1]; smax + 1];
        let lo = ci as u64 * CHUNK + 1;
        let hi = (lo + CHUNK - 1).min(c_max);
        for c in lo..=hi {
            let rho_count = (c as usize).min(n_max + 1);
            let (roots, e_rad) = roots_of_unity(c, prec);
            let mut u = RootSums::new(smax + 1, rho_count, prec);
            for d in residues(c) {
                let p = phi.eval_rep_inverse(c, d);
                let t = Real::from_rational(prec, &Rational::from((-(d as i64), c)));
                let y: Vec<Complex> = (0..=smax)
                    .map(|s| {
                        let mut y = Complex::zero(prec);
                        for i in r..=(dd - s) {
                            let b = binom_u(i as u32, r as u32) * binom_u((i + s) as u32, i as u32);
                            let f = t.pow((i - r) as u32).mul_integer(&b);
                            y.add_mul_real(p.coeff(i + s), &f);
                        }
                        y
                    })
                    .collect();
                u.push(&y, |rho| &roots[((rho as u64 * d) % c) as usize]);
            }
            let u = u.finish(&e_rad);
            let w = Real::from_i64(prec, c as i64).pow(k).recip();
            for (s, us) in u.iter().enumerate() {
                for n in 1..=n_max {
                    acc[s][n].add_mul_real(&us[n % c as usize], &w);
                }
            }
        }
        acc
    });
    let mut sums = vec![vec![Complex::zero(prec); n_max + 1]; smax + 1];
    for part in partials {
        for (s, ps) in part.into_iter().enumerate() {
            for (n, x) in ps.into_iter().enumerate() {
                sums[s][n] += &x;
            }
        }
    }
    let two_pi = Real::two_pi(prec);
    let mut out = vec![Complex::zero(prec); n_max + 1];
    for (n, cn) in out.iter_mut().enumerate().skip(1) {
        let mut acc = Complex::zero(prec);
        for (s, ss) in sums.iter().enumerate() {
            // (-2 pi i)^{k-s} / (k-s-1)! n^{k-s-1}
            let e = k - s as u32;
            let mut a = &two_pi.pow(e) / &Real::from_integer(prec, &factorial(e - 1));
            a = a.mul_integer(&Integer::from(n).pow(e - 1));
            acc += &ss[n].mul_real(&a).mul_i_pow(3 * e as i64);
        }
        acc.add_error(sym_triv_tail_bound(k, l, r, n as u64, c_max + 1)?);
        *cn = acc;
    }
    Ok(out)
}

/// Single coefficient `c(n)_r` of `E_k^{[1]}(.; phi)`.
pub fn g2es_coeff_sym_triv(k: u32, phi: &ParabolicCocycle, n: usize, r: usize, c_max: u64, prec: u32) -> Result<Complex> {
    if n == 0 {
        return Ok(Complex::zero(prec));
    }
    Ok(g2es_coeffs_sym_triv(phi, k, r, n, c_max, prec)?.swap_remove(n))
}

/// Largest double-coset cutoff accepted anywhere.
pub const MAX_C: u64 = 1 << 14;

/// Largest cutoff the planner picks on its own; the work grows like `C^2`
/// and this is a few minutes at 288 bits.
pub const MAX_AUTO_C: u64 = 1 << 11;

/// How far the double-coset sum is taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cutoff {
    /// Smallest `C` whose certified coefficient tail meets the target.
    #[default]
    Auto,
    /// A fixed `C`; the radius reports whatever tail remains.
    Fixed(u64),
}

/// Truncations `(n_max, c_max)` for evaluating each `(k, target)` in `reqs` at
/// points with imaginary part at least `y_low`. A quarter of each budget goes
/// to the series tail and an eighth to the coefficient tails: an error term
/// widens both the real and the imaginary part, so it costs twice its size in
/// the radius, and coefficient tails pass through that twice.
pub fn plan_triv_sym(reqs: &[(u32, Mag)], j: usize, l: u32, y_low: &Mag) -> Result<(usize, u64)> {
    let n_max = series_cutoff(reqs, j, l, y_low)? as u64;
    let mut c_max = 1u64;
    for (k, target) in reqs {
        let k = *k;
        let c = cutoff_for(k, j, l, n_max, y_low, &target.mul_f64(0.125)).ok_or_else(|| Error::TargetUnreachable {
            target: target.to_f64(),
            reason: format!("double-coset cutoff above {MAX_AUTO_C} needed for k = {k}"),
        })?;
        c_max = c_max.max(c);
    }
    Ok((n_max as usize, c_max))
}

/// Largest `n_max` over `reqs` so that each series tail is within a quarter
/// of its target.
fn series_cutoff(reqs: &[(u32, Mag)], j: usize, l: u32, y_low: &Mag) -> Result<usize> {
    let mut n_max = 0u64;
    for (k, target) in reqs {
        let budget = target.mul_f64(0.25);
        let mut n = series_min_terms(*k, j, y_low).max(2);
        while !series_tail_bound(*k, j, l, n, y_low)?.le(&budget) {
            n += (n / 8).max(1);
            if n > 1 << 16 {
                return Err(Error::TargetUnreachable {
                    target: target.to_f64(),
                    reason: "too many Fourier terms needed".into(),
                });
            }
        }
        n_max = n_max.max(n - 1);
    }
    Ok(n_max as usize)
}

/// Smallest `C <= MAX_AUTO_C` with coefficient tail times
/// `sum_{n <= n_max} n^{k+j-1} e^{-2 pi n y}` at most `budget`.
fn cutoff_for(k: u32, j: usize, l: u32, n_max: u64, y_low: &Mag, budget: &Mag) -> Option<u64> {
    let q = (-std::f64::consts::TAU * y_low.to_f64()).exp();
    let weight_sum = (1..=n_max).fold(Mag::zero(), |acc, n| {
        let t = Mag::from_u64(n).pow(k + j as u32 - 1).mul(&Mag::from_f64(q.powi(n as i32)).mul_f64(1.0 + 1e-12));
        acc.add(&t)
    });
    let ok = |c: u64| coeff_tail_bound_certified(k, j, l, c + 1).is_ok_and(|t| t.mul(&weight_sum).le(budget));
    let mut hi = 1u64;
    while !ok(hi) {
        if hi >= MAX_AUTO_C {
            return None;
        }
        hi = (hi * 2).min(MAX_AUTO_C);
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
    Some(hi)
}

/// Certified `E_k^{[1]}(tau; phi^vee, j)` to within `target`.
pub fn eval_g2es(k: u32, phi: &ParabolicCocycle, j: usize, tau: &Complex, target: &Mag) -> Result<Complex> {
    let mut v = eval_g2es_many(phi, j, tau, &[(k, *target)], Cutoff::Auto)?;
    Ok(v.remove(0))
}

/// `E_k^{[1]}(tau; phi^vee, j)` for several `(k, target)` at once, sharing the
/// double-coset sum. With [`Cutoff::Fixed`] only the Fourier truncation is
/// planned and the radii may exceed the targets.
pub fn eval_g2es_many(
    phi: &ParabolicCocycle,
    j: usize,
    tau: &Complex,
    reqs: &[(u32, Mag)],
    cutoff: Cutoff,
) -> Result<Vec<Complex>> {
    let ks: Vec<u32> = reqs.iter().map(|(k, _)| *k).collect();
    let targets = reqs.iter().map(|(_, t)| *t).collect();
    let mut v = eval_g2es_points(phi, j, &ks, &[(tau.clone(), targets)], cutoff)?;
    Ok(v.remove(0))
}

/// Like [`eval_g2es_many`] at several points; `points[i].1[m]` is the target
/// for weight `ks[m]` at `points[i].0`. The coefficients do not depend on the
/// point, so one expansion planned for the hardest request serves all.
pub fn eval_g2es_points(
    phi: &ParabolicCocycle,
    j: usize,
    ks: &[u32],
    points: &[(Complex, Vec<Mag>)],
    cutoff: Cutoff,
) -> Result<Vec<Vec<Complex>>> {
    for &k in ks {
        check_triv_sym(phi, k, j)?;
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let prec = points.iter().map(|(t, _)| t.prec()).max().unwrap_or(64);
    let mut n_max = 0;
    let mut c_max = 1;
    for (tau, targets) in points {
        if targets.len() != ks.len() {
            return Err(Error::invalid("one target per weight is required"));
        }
        let y_low = imag_lower(tau)?;
        let reqs: Vec<(u32, Mag)> = ks.iter().copied().zip(targets.iter().copied()).collect();
        let (n, c) = match cutoff {
            Cutoff::Auto => plan_triv_sym(&reqs, j, phi.weight(), &y_low)?,
            Cutoff::Fixed(c) => {
                if c == 0 || c > MAX_C {
                    return Err(Error::invalid(format!("cutoff C = {c} outside 1..={MAX_C}")));
                }
                (series_cutoff(&reqs, j, phi.weight(), &y_low)?, c)
            }
        };
        n_max = n_max.max(n);
        c_max = c_max.max(c);
    }
    if phi.is_zero() {
        return Ok(points.iter().map(|_| vec![Complex::zero(prec); ks.len()]).collect());
    }
    let e = triv_sym_expansions(phi, ks, j, n_max, c_max, prec)?;
    points
        .iter()
        .map(|(tau, _)| e.iter().map(|x| x.eval(tau)).collect())
        .collect()
}

#[cfg(test)]
mod tests;
