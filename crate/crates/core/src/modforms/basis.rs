//! Product bases `Delta^i E_4^a E_6^b` and the echelonized (Miller) basis of
//! cusp forms.

use rug::Rational;
use serde::{Deserialize, Serialize};

use super::qseries::{delta_q, dims, eisenstein_q, QSeries};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductForm {
    pub delta: u32,
    pub e4: u32,
    pub e6: u32,
}

impl ProductForm {
    pub fn weight(&self) -> u32 {
        12 * self.delta + 4 * self.e4 + 6 * self.e6
    }

    /// `Delta^delta E_4^a E_6^b` of weight `12 delta + w`, choosing `b <= 1`.
    pub fn with_delta_power(delta: u32, w: u32) -> Option<ProductForm> {
        match w % 4 {
            0 => Some(ProductForm { delta, e4: w / 4, e6: 0 }),
            2 if w >= 6 => Some(ProductForm {
                delta,
                e4: (w - 6) / 4,
                e6: 1,
            }),
            _ => None,
        }
    }

    pub fn qseries(&self, order: usize) -> QSeries {
        let e4 = eisenstein_q(4, order).expect("valid weight");
        let e6 = eisenstein_q(6, order).expect("valid weight");
        let d = delta_q(order);
        &(&d.pow(self.delta) * &e4.pow(self.e4)) * &e6.pow(self.e6)
    }
}

/// A basis of a space of forms given as rational combinations of products:
/// `element_i = sum_j transform[i][j] * products[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormBasis {
    pub weight: u32,
    pub products: Vec<ProductForm>,
    pub transform: Vec<Vec<Rational>>,
}

impl FormBasis {
    pub fn len(&self) -> usize {
        self.transform.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transform.is_empty()
    }

    pub fn qseries(&self, order: usize) -> Vec<QSeries> {
        let prods: Vec<QSeries> = self.products.iter().map(|p| p.qseries(order)).collect();
        self.transform
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&prods)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(QSeries::zero(order), |acc, (c, p)| &acc + &p.scale(c))
            })
            .collect()
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k % 2 == 1 {
        return Err(Error::invalid(format!("odd weight {k}")));
    }
    Ok(())
}

/// The cusp-form products `Delta^i E_4^a E_6^b`, `i = 1..dim S_k`, each with
/// leading term `q^i`.
pub fn cusp_products(k: u32) -> Result<Vec<ProductForm>> {
    check_weight(k)?;
    let (_, dim_s) = dims(k as i64)?;
    (1..=dim_s as u32)
        .map(|i| {
            ProductForm::with_delta_power(i, k - 12 * i)
                .ok_or_else(|| Error::invalid(format!("no product of weight {k} with Delta^{i}")))
        })
        .collect()
}

/// Echelonized basis `g_i = q^i + O(q^{dim S_k + 1})` of `S_k`, with its
/// expression in products.
pub fn miller_basis_forms(k: u32) -> Result<FormBasis> {
    let products = cusp_products(k)?;
    let dim = products.len();
    let series: Vec<QSeries> = products.iter().map(|p| p.qseries(dim + 1)).collect();
    let mut transform: Vec<Vec<Rational>> = vec![Vec::new(); dim];
    for i in (0..dim).rev() {
        let mut t = vec![Rational::new(); dim];
        t[i] = Rational::from(1);
        for n in i + 1..dim {
            let f = series[i].coeffs()[n + 1].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in t.iter_mut().zip(&transform[n]) {
                *x -= Rational::from(&f * y);
            }
        }
        transform[i] = t;
    }
    Ok(FormBasis {
        weight: k,
        products,
        transform,
    })
}

/// q-expansions of the echelonized basis of `S_k` to truncation `order`.
pub fn miller_basis(k: u32, order: usize) -> Result<Vec<QSeries>> {
    check_weight(k)?;
    let (dim_m, _) = dims(k as i64)?;
    if order <= dim_m {
        return Err(Error::precondition(format!(
            "truncation order {order} must exceed dim M_{k} = {dim_m}"
        )));
    }
    Ok(miller_basis_forms(k)?.qseries(order))
}

/// The basis `Delta^i E_4^2 E_6^m` (`i = 1..dim S_k`) of `S_k` when every member
/// exists, i.e. `k = 12 i + 8 + 6 m` is solvable for each `i`.
pub fn delta_e4sq_basis(k: u32) -> Result<FormBasis> {
    check_weight(k)?;
    let (_, dim_s) = dims(k as i64)?;
    let mut products = Vec::with_capacity(dim_s);
    for i in 1..=dim_s as u32 {
        let rest = (k as i64) - 12 * i as i64 - 8;
        if rest < 0 || rest % 6 != 0 {
            return Err(Error::invalid(format!(
                "weight {k} has no Delta^{i} E_4^2 E_6^m member"
            )));
        }
        products.push(ProductForm {
            delta: i,
            e4: 2,
            e6: (rest / 6) as u32,
        });
    }
    let transform = (0..dim_s)
        .map(|i| (0..dim_s).map(|j| Rational::from((i == j) as u32)).collect())
        .collect();
    Ok(FormBasis {
        weight: k,
        products,
        transform,
    })
}

/// Coordinates in `basis` (each element `q^i + ...`, unit upper triangular on
/// the first `dim` coefficients) of the cusp form whose coefficients of
/// `q^1..q^dim` are `a`. Works over any field-like scalar through closures.
pub fn triangular_coordinates<T: Clone>(
    basis: &[QSeries],
    a: &[T],
    sub_scaled: impl Fn(&T, &Rational, &T) -> T,
) -> Vec<T> {
    // a = sum_i d_i f_i  with  f_i[n] = 0 for n < i and f_i[i] = 1.
    let dim = a.len();
    let mut rest: Vec<T> = a.to_vec();
    let mut d = Vec::with_capacity(dim);
    for i in 0..dim {
        let di = rest[i].clone();
        for n in i + 1..dim {
            let f = &basis[i].coeffs()[n + 1];
            if !f.is_zero() {
                rest[n] = sub_scaled(&rest[n], f, &di);
            }
        }
        d.push(di);
    }
    d
}
