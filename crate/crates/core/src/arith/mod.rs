//! Certified ball arithmetic over MPFR plus exact rational helpers.

mod complex;
mod mag;
mod real;
pub mod special;

pub use complex::Complex;
pub use mag::Mag;
pub use real::Real;
pub use rug::{Integer, Rational};

use rug::ops::Pow;

/// Default working precision in bits, before guard bits.
pub const DEFAULT_PREC: u32 = 256;
/// Guard bits added on top of the requested precision.
pub const GUARD_BITS: u32 = 32;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Ok(q) = s.parse::<Rational>() {
        return Some(q);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: Integer = digits.parse().ok()?;
    let den = Integer::from(10).pow(frac_part.len() as u32);
    let q = Rational::from((num, den));
    Some(if neg { -q } else { q })
}

/// `"num/den"` rendering used in JSON output; integers print without a slash.
pub fn rational_to_string(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
