//! Midpoint accumulation of root-of-unity weighted sums with an a posteriori
//! radius, which avoids per-operation radius bookkeeping in the innermost loop.

use gmp_mpfr_sys::mpfr;
use rug::Float;

use crate::arith::{Complex, Mag, Real};

/// Accumulates `out[col][row] += e_row * v_col` over many pushes, where the
/// `e_row` are unit-modulus balls with radius at most `e_rad`.
pub(crate) struct RootSums {
    cols: usize,
    rows: usize,
    prec: u32,
    re: Vec<Float>,
    im: Vec<Float>,
    mag: Vec<Mag>,
    rad: Vec<Mag>,
    pushes: u64,
}

impl RootSums {
    pub(crate) fn new(cols: usize, rows: usize, prec: u32) -> Self {
        RootSums {
            cols,
            rows,
            prec,
            re: vec![Float::new(prec); cols * rows],
            im: vec![Float::new(prec); cols * rows],
            mag: vec![Mag::zero(); cols],
            rad: vec![Mag::zero(); cols],
            pushes: 0,
        }
    }

    /// Adds `root(row) * v[col]` to every entry.
    pub(crate) fn push<'a>(&mut self, v: &[Complex], root: impl Fn(usize) -> &'a Complex) {
        debug_assert_eq!(v.len(), self.cols);
        for (col, x) in v.iter().enumerate() {
            self.mag[col] = self.mag[col].add(&x.re.abs_upper()).add(&x.im.abs_upper());
            self.rad[col] = self.rad[col].add(&x.re.rad()).add(&x.im.rad());
        }
        self.pushes += 1;
        for row in 0..self.rows {
            let e = root(row);
            let (er, ei) = (e.re.mid().as_raw(), e.im.mid().as_raw());
            for (col, x) in v.iter().enumerate() {
                let (vr, vi) = (x.re.mid().as_raw(), x.im.mid().as_raw());
                let k = col * self.rows + row;
                let re = self.re[k].as_raw_mut();
                let im = self.im[k].as_raw_mut();
                // MPFR allows the output to alias the addend.
                unsafe {
                    mpfr::fma(re, er, vr, re, mpfr::rnd_t::RNDN);
                    mpfr::fms(re, ei, vi, re, mpfr::rnd_t::RNDN);
                    mpfr::neg(re, re, mpfr::rnd_t::RNDN);
                    mpfr::fma(im, er, vi, im, mpfr::rnd_t::RNDN);
                    mpfr::fma(im, ei, vr, im, mpfr::rnd_t::RNDN);
                }
            }
        }
    }

    /// The sums as balls, `[col][row]`. Per term the input radii contribute
    /// at most `(1 + e_rad) rad(v) + e_rad |v|`; each of the `2 pushes`
    /// roundings per component is at most `2^{1-p} (1 + e_rad) sum |v|`.
    pub(crate) fn finish(self, e_rad: &Mag) -> Vec<Vec<Complex>> {
        let one_plus = Mag::from_f64(1.0).add(e_rad);
        let rounding = Mag::from_u64(2 * self.pushes).mul(&Mag::pow2(1 - self.prec as i64));
        let mut re = self.re.into_iter();
        let mut im = self.im.into_iter();
        (0..self.cols)
            .map(|col| {
                let err = one_plus
                    .mul(&self.rad[col])
                    .add(&e_rad.mul(&self.mag[col]))
                    .add(&rounding.mul(&one_plus).mul(&self.mag[col]));
                (0..self.rows)
                    .map(|_| {
                        Complex::new(
                            Real::with_rad(re.next().unwrap(), err),
                            Real::with_rad(im.next().unwrap(), err),
                        )
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn matches_ball_arithmetic() {
        let prec = 128;
        let c = 13u64;
        let roots: Vec<Complex> = (0..c)
            .map(|m| Complex::e_real(&Real::from_rational(prec, &Rational::from((m, c)))))
            .collect();
        let e_rad = roots.iter().fold(Mag::zero(), |a, r| a.max(&r.re.rad()).max(&r.im.rad()));
        let mut sums = RootSums::new(2, 5, prec);
        let mut balls = vec![vec![Complex::zero(prec); 5]; 2];
        for d in 1..c {
            let mut v0 = Complex::from_rationals(prec, &Rational::from((d, 3)), &Rational::from((-7, d)));
            v0.add_error(Mag::pow2(-100));
            let v1 = Complex::from_f64s(prec, 1e6 / d as f64, 0.25);
            let v = [v0, v1];
            let root = |row: usize| &roots[(row as u64 * d % c) as usize];
            sums.push(&v, root);
            for (col, x) in v.iter().enumerate() {
                for (row, b) in balls[col].iter_mut().enumerate() {
                    b.add_mul(root(row), x);
                }
            }
        }
        let out = sums.finish(&e_rad);
        for col in 0..2 {
            for row in 0..5 {
                let (a, b) = (&out[col][row], &balls[col][row]);
                assert!(a.overlaps(b));
                let (dr, di) = (a - b).to_f64s();
                assert!(dr.abs() + di.abs() <= 1e-25 * (1.0 + b.abs_upper().to_f64()));
                assert!(a.rad().to_f64() <= 4.0 * b.rad().to_f64() + 1e-28);
            }
        }
    }
}
