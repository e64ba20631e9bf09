//! Small dense complex systems in ball arithmetic.

use crate::arith::{Complex, Real};
use crate::error::{Error, Result};

/// Solves `m x = b` by Gaussian elimination with partial pivoting on the
/// midpoint magnitudes; also returns `det m`.
pub fn solve_complex(m: &[Vec<Complex>], b: &[Complex]) -> Result<(Vec<Complex>, Complex)> {
    let n = m.len();
    if b.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("square system expected"));
    }
    if n == 0 {
        return Ok((Vec::new(), Complex::one(64)));
    }
    let prec = m[0][0].prec();
    let mut a: Vec<Vec<Complex>> = m.iter().zip(b).map(|(r, x)| {
        let mut row = r.clone();
        row.push(x.clone());
        row
    }).collect();
    let mut det = Complex::one(prec);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| mid_abs(&a[i][col]).total_cmp(&mid_abs(&a[j][col])))
            .expect("non-empty range");
        if a[piv][col].contains_zero() {
            return Err(Error::RankDeficient { rank: col, count: n });
        }
        if piv != col {
            a.swap(piv, col);
            det = det.neg();
        }
        det = &det * &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            let f = &a[r][col] * &inv;
            for c in col..=n {
                let t = &f * &a[col][c];
                a[r][c] -= &t;
            }
        }
    }
    let mut x = vec![Complex::zero(prec); n];
    for r in (0..n).rev() {
        let mut acc = a[r][n].clone();
        for c in r + 1..n {
            let t = &a[r][c] * &x[c];
            acc -= &t;
        }
        x[r] = &acc / &a[r][r];
    }
    Ok((x, det))
}

// log2 of the midpoint modulus, robust to tiny entries
fn mid_abs(z: &Complex) -> f64 {
    let m = z.mid_ball().abs_upper();
    if m.is_zero() {
        f64::NEG_INFINITY
    } else {
        m.log2_approx()
    }
}

/// `|det m'| / prod_j ||row_j(m')||` where `m'` is `m` with every column scaled
/// to unit Euclidean norm. Equals 1 for orthogonal rows and 0 for singular
/// matrices, and is invariant under rescaling a basis element.
pub fn condition_ratio(m: &[Vec<Complex>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let prec = m[0][0].prec();
    let norm = |v: &[Complex]| -> Real {
        let mut s = Real::zero(prec);
        for z in v {
            let w = z.mid_ball();
            s += &(&w.re.sqr() + &w.im.sqr());
        }
        s.sqrt()
    };
    let mut scaled: Vec<Vec<Complex>> = m.iter().map(|r| r.iter().map(Complex::mid_ball).collect()).collect();
    for c in 0..n {
        let col: Vec<Complex> = scaled.iter().map(|r| r[c].clone()).collect();
        let s = norm(&col);
        if !s.is_positive() {
            return 0.0;
        }
        for r in scaled.iter_mut() {
            r[c] = r[c].div_real(&s);
        }
    }
    let det = match solve_complex(&scaled, &vec![Complex::zero(prec); n]) {
        Ok((_, d)) => d,
        Err(_) => return 0.0,
    };
    let mut denom = Real::one(prec);
    for r in &scaled {
        denom = &denom * &norm(r);
    }
    let abs = det.mid_ball().abs_upper().to_f64();
    abs / denom.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn c(re: f64, im: f64) -> Complex {
        Complex::from_f64s(P, re, im)
    }

    #[test]
    fn solves_and_reports_determinant() {
        let m = vec![vec![c(0.0, 1.0), c(2.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 1.0)]];
        // det = i(1+i) - 2 = -3 + i
        let x_true = [c(1.0, -1.0), c(0.5, 2.0)];
        let b: Vec<Complex> = m
            .iter()
            .map(|r| &(&r[0] * &x_true[0]) + &(&r[1] * &x_true[1]))
            .collect();
        let (x, det) = solve_complex(&m, &b).unwrap();
        assert!(det.contains_f64(-3.0, 1.0));
        assert!(x[0].contains_f64(1.0, -1.0) && x[1].contains_f64(0.5, 2.0));
    }

    #[test]
    fn singular_is_rejected() {
        let m = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve_complex(&m, &[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert_eq!(condition_ratio(&m), 0.0);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let m = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        assert!((condition_ratio(&m) - 1.0).abs() < 1e-12);
        let s = vec![vec![c(1e-30, 0.0), c(0.3, 0.0)], vec![c(2e-30, 0.0), c(0.1, 0.0)]];
        let t = vec![vec![c(1.0, 0.0), c(0.3, 0.0)], vec![c(2.0, 0.0), c(0.1, 0.0)]];
        assert!((condition_ratio(&s) - condition_ratio(&t)).abs() < 1e-9);
    }
}
