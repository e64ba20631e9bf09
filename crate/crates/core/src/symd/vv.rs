//! Vector-valued q-expansions in the basis `(X - tau)^r`.

use super::super::modforms::QSeries;
use crate::error::{Error, Result};

/// `sum_r (X - tau)^r (-2 pi i)^{r - unit_shift} sum_n c_r(n) q^n` with exact
/// rational `c_r(n)`.
///
/// Components with `r > unit_shift` of the sym^d Eisenstein series carry a
/// transcendental factor `(-2 pi i)^{r - j}`; it is kept symbolic so the stored
/// coefficients stay rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VVQSeries {
    pub d: usize,
    pub unit_shift: usize,
    pub components: Vec<QSeries>,
}

impl VVQSeries {
    pub fn new(d: usize, unit_shift: usize, components: Vec<QSeries>) -> Result<Self> {
        if components.len() != d + 1 {
            return Err(Error::invalid(format!(
                "expected {} components, got {}",
                d + 1,
                components.len()
            )));
        }
        let order = components[0].order();
        if components.iter().any(|c| c.order() != order) {
            return Err(Error::invalid("components must share one truncation order"));
        }
        Ok(VVQSeries {
            d,
            unit_shift,
            components,
        })
    }

    pub fn order(&self) -> usize {
        self.components[0].order()
    }
}

/// Lowest-component projection `sum_{r >= j} (X - tau)^r f_r -> f_j`.
pub fn pi_low(f: &VVQSeries, j: usize) -> Result<QSeries> {
    if j > f.d {
        return Err(Error::invalid(format!("j = {j} exceeds d = {}", f.d)));
    }
    if let Some(r) = (0..j).find(|&r| !f.components[r].is_zero()) {
        return Err(Error::precondition(format!(
            "component {r} below j = {j} does not vanish"
        )));
    }
    if f.unit_shift != j {
        return Err(Error::precondition(format!(
            "component {j} carries a factor (-2 pi i)^{}",
            j as i64 - f.unit_shift as i64
        )));
    }
    Ok(f.components[j].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::eisenstein_q;
    use rug::Rational;

    #[test]
    fn identity_on_classical() {
        let e4 = eisenstein_q(4, 6).unwrap();
        let f = VVQSeries::new(0, 0, vec![e4.clone()]).unwrap();
        assert_eq!(pi_low(&f, 0).unwrap(), e4);
    }

    #[test]
    fn nonzero_low_component_rejected() {
        let e4 = eisenstein_q(4, 6).unwrap();
        let f = VVQSeries::new(1, 1, vec![e4.clone(), e4.scale(&Rational::from(2))]).unwrap();
        assert!(pi_low(&f, 1).is_err());
        assert!(VVQSeries::new(1, 1, vec![e4]).is_err());
    }
}
