//! Exact linear algebra over Q for expressing q-series in spans of others.

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::qseries::{dims, eisenstein_q, delta_q, QSeries};
use crate::error::{Error, Result};

/// Row-reduces `rows` in place (each row has `cols` unknown columns followed
/// by any number of extra columns) and returns the pivot columns.
fn row_reduce(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::from(1) / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= Rational::from(&f * y);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Exact coefficients `x` with `sum x_i generators_i = target` up to the common
/// truncation order.
pub fn solve_in_span(target: &QSeries, generators: &[QSeries]) -> Result<Vec<Rational>> {
    let m = generators.len();
    let order = generators
        .iter()
        .map(QSeries::order)
        .chain(std::iter::once(target.order()))
        .min()
        .unwrap_or(0);
    if order <= m {
        return Err(Error::precondition(format!(
            "truncation order {order} must exceed the number of generators {m}"
        )));
    }
    let mut rows: Vec<Vec<Rational>> = (0..order)
        .map(|n| {
            let mut row: Vec<Rational> = generators.iter().map(|g| g.coeffs()[n].clone()).collect();
            row.push(target.coeffs()[n].clone());
            row
        })
        .collect();
    let pivots = row_reduce(&mut rows, m);
    if pivots.len() < m {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            count: m,
        });
    }
    if rows[m..].iter().any(|row| !row[m].is_zero()) {
        return Err(Error::Inconsistent);
    }
    Ok(rows[..m].iter().map(|row| row[m].clone()).collect())
}

/// One term `coeff * E_left * E_right`; `left == 0` means the single factor
/// `E_right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductTerm {
    #[serde(with = "crate::serde_util::rational")]
    pub coeff: Rational,
    pub left: u32,
    pub right: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDecomposition {
    pub h: u32,
    pub terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    /// Expands the decomposition back into a q-series.
    pub fn expand(&self, order: usize) -> Result<QSeries> {
        let mut acc = QSeries::zero(order);
        for t in &self.terms {
            let right = eisenstein_q(t.right, order)?;
            let prod = if t.left == 0 {
                right
            } else {
                &eisenstein_q(t.left, order)? * &right
            };
            acc = &acc + &prod.scale(&t.coeff);
        }
        Ok(acc)
    }
}

/// Candidate (left, right) weights for products of weight `w`: `E_w`, then
/// `E_4 E_{w-4}`, `E_6 E_{w-6}`, ...
pub fn product_candidates(w: u32, count: usize) -> Vec<(u32, u32)> {
    let mut out = vec![(0, w)];
    let mut a = 4;
    while out.len() < count && a + 4 <= w {
        out.push((a, w - a));
        a += 2;
    }
    out
}

/// `Delta^h` as a combination of `E_{12h}` and products `E_a E_{12h-a}`.
pub fn decompose_delta_power(h: u32, order: usize) -> Result<ProductDecomposition> {
    if h == 0 {
        return Err(Error::invalid("decompose_delta_power needs h >= 1"));
    }
    let w = 12 * h;
    let (dim_m, _) = dims(w as i64)?;
    if order <= dim_m {
        return Err(Error::precondition(format!(
            "truncation order {order} must exceed dim M_{w} = {dim_m}"
        )));
    }
    let cands = product_candidates(w, dim_m);
    let mut gens = Vec::with_capacity(cands.len());
    for &(a, b) in &cands {
        let right = eisenstein_q(b, order)?;
        gens.push(if a == 0 {
            right
        } else {
            &eisenstein_q(a, order)? * &right
        });
    }
    let target = delta_q(order).pow(h);
    let coeffs = solve_in_span(&target, &gens)?;
    Ok(ProductDecomposition {
        h,
        terms: coeffs
            .into_iter()
            .zip(cands)
            .map(|(coeff, (left, right))| ProductTerm { coeff, left, right })
            .collect(),
    })
}

/// Default truncation order used for exact decompositions: comfortably above
/// `dim M_{12h}` so the system is overdetermined.
pub fn default_decomposition_order(h: u32) -> usize {
    dims(12 * h as i64).map(|(m, _)| m).unwrap_or(1) + 8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_solves() {
        let e4 = eisenstein_q(4, 8).unwrap();
        let e6 = eisenstein_q(6, 8).unwrap();
        let x = solve_in_span(&e4, &[e4.clone(), &e4 * &e6]).unwrap();
        assert_eq!(x, vec![Rational::from(1), Rational::new()]);
    }

    #[test]
    fn delta_in_weight_12_span() {
        let order = 10;
        let e12 = eisenstein_q(12, order).unwrap();
        let e4e8 = &eisenstein_q(4, order).unwrap() * &eisenstein_q(8, order).unwrap();
        let delta = delta_q(order);
        let x = solve_in_span(&delta, &[e12.clone(), e4e8.clone()]).unwrap();
        let back = &e12.scale(&x[0]) + &e4e8.scale(&x[1]);
        assert_eq!(back, delta);
    }

    #[test]
    fn distinct_failure_modes() {
        let order = 8;
        let delta = delta_q(order);
        let e12 = eisenstein_q(12, order).unwrap();
        // Wrong constant term against cuspidal generators.
        assert!(matches!(
            solve_in_span(&e12, std::slice::from_ref(&delta)),
            Err(Error::Inconsistent)
        ));
        assert!(matches!(
            solve_in_span(&delta, &[delta.clone(), delta.scale(&Rational::from(2))]),
            Err(Error::RankDeficient { rank: 1, count: 2 })
        ));
    }

    #[test]
    fn decompositions_multiply_back() {
        for h in [1u32, 2, 3, 5] {
            let order = default_decomposition_order(h);
            let dec = decompose_delta_power(h, order).unwrap();
            assert_eq!(dec.expand(order).unwrap(), delta_q(order).pow(h), "h={h}");
            let constant: Rational = dec.terms.iter().map(|t| t.coeff.clone()).sum();
            assert_eq!(constant, 0);
        }
        assert_eq!(decompose_delta_power(1, 6).unwrap().terms.len(), 2);
        assert!(decompose_delta_power(0, 6).is_err());
    }
}
