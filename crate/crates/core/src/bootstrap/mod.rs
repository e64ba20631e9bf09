//! Evaluatable representations of `Delta^h E(Delta)`: exact combinations of
//! `E_a E_{b-10}^{[1]}(.; phi^vee, 10)` plus a cusp form of weight `12h - 10`
//! fixed by a few point evaluations. A built representation can serve as the
//! point oracle for the next `h`.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::arith::{Complex, Mag};
use crate::cocycle::ParabolicCocycle;
use crate::eichler::EichlerIntegral;
use crate::error::{Error, Result};
use crate::g2es::{eval_g2es_points, Cutoff};
use crate::modforms::{
    decompose_delta_power, default_decomposition_order, delta_e4sq_basis, dims, eval_delta, eval_eisenstein,
    eval_product, imag_lower, miller_basis_forms, triangular_coordinates, FormBasis,
};
use crate::par::map_indexed;

mod solve;

pub use solve::{condition_ratio, solve_complex};

/// Index `j` of the generalized Eisenstein series, `d = 10` for `Delta`.
pub const J: usize = 10;

/// Point sets whose column-equilibrated Hadamard ratio falls below this are
/// rejected.
pub const CONDITION_THRESHOLD: f64 = 1e-3;

/// Refinement rounds for the point values before giving up on the target.
const MAX_PASSES: usize = 12;

/// `coeff * E_classical * E_{g2es_weight}^{[1]}(.; phi^vee, 10)`;
/// `classical == 0` stands for the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G2ESTerm {
    #[serde(with = "crate::serde_util::rational")]
    pub coeff: Rational,
    pub classical: u32,
    pub g2es_weight: u32,
}

/// A cusp form of weight `weight` through its q-coefficients `n = 0..=dim`,
/// which determine it; entry 0 is an exact zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspRemainder {
    pub weight: u32,
    #[serde(with = "crate::serde_util::complex_vec")]
    pub coefficients: Vec<Complex>,
}

impl CuspRemainder {
    pub fn zero(weight: u32, prec: u32) -> Result<Self> {
        let (_, dim) = dims(weight as i64)?;
        Ok(CuspRemainder {
            weight,
            coefficients: vec![Complex::zero(prec); dim + 1],
        })
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// True when every coefficient is an exact zero.
    pub fn is_zero(&self) -> bool {
        self.coefficients
            .iter()
            .all(|c| c.rad().is_zero() && c.re.mid().is_zero() && c.im.mid().is_zero())
    }

    /// Certified value at `tau` via the echelonized basis.
    pub fn eval(&self, tau: &Complex) -> Result<Complex> {
        imag_lower(tau)?;
        let prec = tau.prec();
        if self.dim() == 0 {
            return Ok(Complex::zero(prec));
        }
        let basis = miller_basis_forms(self.weight)?;
        let g = eval_basis(&basis, tau)?;
        let mut acc = Complex::zero(prec);
        for (a, gi) in self.coefficients[1..].iter().zip(&g) {
            acc.add_mul(a, gi);
        }
        Ok(acc)
    }

    /// q-coefficients `0..order`.
    pub fn qexp(&self, order: usize) -> Result<Vec<Complex>> {
        let prec = self.coefficients[0].prec();
        let mut out = vec![Complex::zero(prec); order];
        if self.dim() == 0 {
            return Ok(out);
        }
        let series = miller_basis_forms(self.weight)?.qseries(order.max(self.dim() + 1));
        for (a, g) in self.coefficients[1..].iter().zip(&series) {
            for (n, slot) in out.iter_mut().enumerate() {
                let c = &g.coeffs()[n];
                if !c.is_zero() {
                    *slot += &a.mul_rational(c);
                }
            }
        }
        Ok(out)
    }

    /// Coordinates in a basis whose members are `q^i + ...`, unit upper
    /// triangular on `q^1..q^dim`.
    pub fn coordinates_in(&self, basis: &FormBasis) -> Result<Vec<Complex>> {
        if basis.weight != self.weight || basis.len() != self.dim() {
            return Err(Error::invalid("basis does not span the remainder's space"));
        }
        let series = basis.qseries(self.dim() + 1);
        for (i, s) in series.iter().enumerate() {
            let lead_ok = s.coeffs()[..=i].iter().all(|c| c.is_zero()) && s.coeffs()[i + 1] == 1;
            if !lead_ok {
                return Err(Error::invalid("basis is not unit upper triangular"));
            }
        }
        Ok(triangular_coordinates(&series, &self.coefficients[1..], |r, f, d| r - &d.mul_rational(f)))
    }

    /// Coordinates in `Delta^i E_4^2 E_6^m`, when that basis exists.
    pub fn delta_e4sq_coordinates(&self) -> Result<Vec<Complex>> {
        self.coordinates_in(&delta_e4sq_basis(self.weight)?)
    }
}

/// `g_i(tau)` for each basis element.
fn eval_basis(basis: &FormBasis, tau: &Complex) -> Result<Vec<Complex>> {
    let prods: Vec<Complex> = basis.products.iter().map(|p| eval_product(p, tau)).collect::<Result<_>>()?;
    Ok(basis
        .transform
        .iter()
        .map(|row| {
            let mut acc = Complex::zero(tau.prec());
            for (c, p) in row.iter().zip(&prods) {
                if !c.is_zero() {
                    acc += &p.mul_rational(c);
                }
            }
            acc
        })
        .collect())
}

/// An exact point of the upper half plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPoint {
    #[serde(with = "crate::serde_util::rational")]
    pub re: Rational,
    #[serde(with = "crate::serde_util::rational")]
    pub im: Rational,
}

impl EvalPoint {
    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::from_rationals(prec, &self.re, &self.im)
    }
}

/// `tau_j = 1/j + (j + 1) i` for `j = 1..=count`.
pub fn evaluation_points(count: usize) -> Vec<EvalPoint> {
    (1..=count as i64)
        .map(|j| EvalPoint {
            re: Rational::from((1, j)),
            im: Rational::from(j + 1),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub points: Vec<EvalPoint>,
    /// `Delta^h E(Delta)(tau_j) + f_E(tau_j)`.
    #[serde(with = "crate::serde_util::complex_vec")]
    pub values: Vec<Complex>,
    /// Determinant of `(g_i(tau_j))` in the echelonized basis.
    #[serde(with = "crate::serde_util::complex")]
    pub determinant: Complex,
    pub condition_ratio: f64,
    /// Whether every remainder coordinate met the relative target.
    pub target_met: bool,
}

/// `Delta^h E(Delta) = remainder - sum_i terms_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2ESRepresentation {
    pub h: u32,
    pub terms: Vec<G2ESTerm>,
    pub remainder: CuspRemainder,
    /// Absent for `h = 2`, where nothing is solved.
    pub diagnostics: Option<SolveDiagnostics>,
}

impl G2ESRepresentation {
    pub fn target_met(&self) -> bool {
        self.diagnostics.as_ref().is_none_or(|d| d.target_met)
    }
}

/// The terms `c_i E_{a_i} E_{b_i - 10}^{[1]}` coming from `Delta^h = sum c_i E_{a_i} E_{b_i}`.
pub fn representation_terms(h: u32) -> Result<Vec<G2ESTerm>> {
    if h < 2 {
        return Err(Error::invalid(format!("representations need h >= 2, got {h}")));
    }
    let dec = decompose_delta_power(h, default_decomposition_order(h))?;
    Ok(dec
        .terms
        .into_iter()
        .map(|t| G2ESTerm {
            coeff: t.coeff,
            classical: t.left,
            g2es_weight: t.right - J as u32,
        })
        .collect())
}

/// Knobs shared by building and evaluating representations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Target for each remainder coordinate relative to its magnitude.
    pub rel_target: f64,
    pub cutoff: Cutoff,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            rel_target: 1e-3,
            cutoff: Cutoff::Auto,
        }
    }
}

/// A certified source of values `E(Delta)(tau)`.
pub trait PointOracle: Sync {
    /// One value per `(tau, target)`, each with radius about `target` or less.
    fn eval_many(&self, points: &[(Complex, Mag)]) -> Result<Vec<Complex>>;

    /// Cheap uncertified estimates (midpoints only), used to size targets.
    fn pilot(&self, points: &[(Complex, Mag)]) -> Result<Vec<Complex>> {
        Ok(self.eval_many(points)?.iter().map(Complex::mid_ball).collect())
    }
}

/// `E(Delta)` from its Fourier expansion.
#[derive(Debug)]
pub struct DirectOracle(EichlerIntegral);

impl DirectOracle {
    pub fn new() -> Self {
        DirectOracle(EichlerIntegral::delta())
    }
}

impl Default for DirectOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl PointOracle for DirectOracle {
    fn eval_many(&self, points: &[(Complex, Mag)]) -> Result<Vec<Complex>> {
        // the prefactor 10!/(2 pi)^11 is below 1e-2
        map_indexed(points.len(), |i| self.0.eval(&points[i].0, &points[i].1.mul_f64(64.0)))
            .into_iter()
            .collect()
    }
}

/// `E(Delta) = eval_representation(rep) / Delta^h`.
pub struct RepresentationOracle<'a> {
    pub rep: &'a G2ESRepresentation,
    pub phi: &'a ParabolicCocycle,
    pub cutoff: Cutoff,
}

impl PointOracle for RepresentationOracle<'_> {
    fn eval_many(&self, points: &[(Complex, Mag)]) -> Result<Vec<Complex>> {
        let h = self.rep.h;
        let dh: Vec<Complex> = points.iter().map(|(t, _)| delta_power(t, h)).collect::<Result<_>>()?;
        let scaled: Vec<(Complex, Mag)> = points
            .iter()
            .zip(&dh)
            .map(|((t, m), d)| (t.clone(), m.mul(&d.abs_lower())))
            .collect();
        let v = eval_representation_many(self.rep, self.phi, &scaled, self.cutoff)?;
        Ok(v.iter().zip(&dh).map(|(x, d)| x / d).collect())
    }

    fn pilot(&self, points: &[(Complex, Mag)]) -> Result<Vec<Complex>> {
        let quick = RepresentationOracle {
            cutoff: pilot_cutoff(self.cutoff),
            ..*self
        };
        Ok(quick.eval_many(points)?.iter().map(Complex::mid_ball).collect())
    }
}

/// Double-coset cutoff for pilot estimates.
const PILOT_C: u64 = 128;

fn pilot_cutoff(c: Cutoff) -> Cutoff {
    match c {
        Cutoff::Fixed(n) => Cutoff::Fixed(n.min(PILOT_C)),
        Cutoff::Auto => Cutoff::Fixed(PILOT_C),
    }
}

/// Certified `Delta(tau)^h`.
fn delta_power(tau: &Complex, h: u32) -> Result<Complex> {
    let fine = Mag::pow2(-(tau.prec() as i64)).mul(&Complex::e(tau).abs_upper());
    Ok(eval_delta(tau, &fine)?.pow(h))
}

/// `f_E(tau) = sum_i c_i E_{a_i}(tau) E_{b_i-10}^{[1]}(tau)` at each point, with
/// the target split evenly over the terms.
fn eisenstein_part(
    terms: &[G2ESTerm],
    phi: &ParabolicCocycle,
    points: &[(Complex, Mag)],
    cutoff: Cutoff,
) -> Result<Vec<Complex>> {
    let ks: Vec<u32> = terms.iter().map(|t| t.g2es_weight).collect();
    let share = 1.0 / terms.len() as f64;
    let mut classical = Vec::with_capacity(points.len());
    let mut reqs = Vec::with_capacity(points.len());
    for (tau, target) in points {
        let prec = tau.prec();
        let fine = Mag::pow2(-(prec as i64));
        let mut row = Vec::with_capacity(terms.len());
        let mut targets = Vec::with_capacity(terms.len());
        for t in terms {
            let c = Complex::from_rational(prec, &t.coeff);
            let e = if t.classical == 0 {
                c
            } else {
                &c * &eval_eisenstein(t.classical, tau, &fine)?
            };
            let scale = e.abs_upper().max(&Mag::pow2(-(prec as i64)));
            targets.push(target.mul_f64(share).div(&scale));
            row.push(e);
        }
        classical.push(row);
        reqs.push((tau.clone(), targets));
    }
    let g = eval_g2es_points(phi, J, &ks, &reqs, cutoff)?;
    Ok(classical
        .iter()
        .zip(&g)
        .map(|(cs, gs)| {
            let mut acc = Complex::zero(cs[0].prec());
            for (c, x) in cs.iter().zip(gs) {
                acc.add_mul(c, x);
            }
            acc
        })
        .collect())
}

/// Certified `Delta^h E(Delta)(tau)` from `rep`.
pub fn eval_representation(
    rep: &G2ESRepresentation,
    phi: &ParabolicCocycle,
    tau: &Complex,
    target: &Mag,
    cutoff: Cutoff,
) -> Result<Complex> {
    Ok(eval_representation_many(rep, phi, &[(tau.clone(), *target)], cutoff)?.remove(0))
}

/// [`eval_representation`] at several points sharing one double-coset sum.
pub fn eval_representation_many(
    rep: &G2ESRepresentation,
    phi: &ParabolicCocycle,
    points: &[(Complex, Mag)],
    cutoff: Cutoff,
) -> Result<Vec<Complex>> {
    let fe = eisenstein_part(&rep.terms, phi, points, cutoff)?;
    points
        .iter()
        .zip(fe)
        .map(|((tau, _), f)| Ok(&rep.remainder.eval(tau)? - &f))
        .collect()
}

/// The `h = 2` representation: `S_14 = 0`, so the remainder vanishes.
fn self_contained(h: u32, prec: u32) -> Result<G2ESRepresentation> {
    Ok(G2ESRepresentation {
        h,
        terms: representation_terms(h)?,
        remainder: CuspRemainder::zero(12 * h - J as u32, prec)?,
        diagnostics: None,
    })
}

/// `|M^{-1}|` entrywise (upper bounds), from solving against unit vectors.
fn inverse_abs(m: &[Vec<Complex>]) -> Result<Vec<Vec<Mag>>> {
    let n = m.len();
    let prec = m[0][0].prec();
    let mut out = vec![vec![Mag::zero(); n]; n];
    for j in 0..n {
        let mut e = vec![Complex::zero(prec); n];
        e[j] = Complex::one(prec);
        let (col, _) = solve_complex(m, &e)?;
        for (i, x) in col.iter().enumerate() {
            out[i][j] = x.abs_upper();
        }
    }
    Ok(out)
}

/// Basis-evaluation matrix `m[j][i] = f_i(tau_j)` of `S_weight` (Miller basis)
/// and its conditioning ratio; fails with IllConditioned below
/// [`CONDITION_THRESHOLD`].
pub fn conditioning(weight: u32, taus: &[Complex]) -> Result<(Vec<Vec<Complex>>, f64)> {
    let basis = miller_basis_forms(weight)?;
    if basis.len() != taus.len() {
        return Err(Error::invalid(format!(
            "S_{weight} has dimension {}, got {} points",
            basis.len(),
            taus.len()
        )));
    }
    let m: Vec<Vec<Complex>> = taus.iter().map(|t| eval_basis(&basis, t)).collect::<Result<_>>()?;
    let ratio = condition_ratio(&m);
    if !(ratio >= CONDITION_THRESHOLD) {
        return Err(Error::IllConditioned {
            ratio,
            threshold: CONDITION_THRESHOLD,
        });
    }
    Ok((m, ratio))
}

/// Builds the representation of `Delta^h E(Delta)`, solving for the cusp-form
/// remainder from `oracle` at [`evaluation_points`]. Point values are refined
/// until every remainder coordinate has radius below `rel_target` times its
/// magnitude; if that fails the result is returned with `target_met = false`.
pub fn build_representation(
    h: u32,
    oracle: &dyn PointOracle,
    phi: &ParabolicCocycle,
    config: &BootstrapConfig,
) -> Result<G2ESRepresentation> {
    if !(config.rel_target > 0.0 && config.rel_target < 1.0) {
        return Err(Error::invalid("relative target must lie in (0, 1)"));
    }
    let prec = phi.prec();
    let weight = 12 * h.max(1) - J as u32;
    let terms = representation_terms(h)?;
    let (_, dim) = dims(weight as i64)?;
    if dim == 0 {
        return self_contained(h, prec);
    }
    let points = evaluation_points(dim);
    let taus: Vec<Complex> = points.iter().map(|p| p.to_complex(prec)).collect();

    // gate first: it costs nothing compared to the evaluations
    let (m, ratio) = conditioning(weight, &taus)?;

    let dh: Vec<Complex> = taus.iter().map(|t| delta_power(t, h)).collect::<Result<_>>()?;
    let rel = Mag::from_f64(config.rel_target);
    // Oracle targets for a requested accuracy of Delta^h E(Delta) + f_E.
    let split = |targets: &[Mag]| -> (Vec<(Complex, Mag)>, Vec<(Complex, Mag)>) {
        let half: Vec<Mag> = targets.iter().map(|t| t.mul_f64(0.5)).collect();
        let oracle_pts = taus
            .iter()
            .zip(&half)
            .zip(&dh)
            .map(|((t, m), d)| (t.clone(), m.div(&d.abs_upper())))
            .collect();
        (oracle_pts, taus.iter().cloned().zip(half).collect())
    };
    let combine = |e: &[Complex], fe: &[Complex]| -> Vec<Complex> {
        dh.iter().zip(e).zip(fe).map(|((d, x), f)| &(d * x) + f).collect()
    };

    // The remainder coordinates a_i are what must be resolved; at the default
    // points a_1 contributes about 1e-5 of the first value, so a relative
    // target on the values alone is not enough. A pilot at a small fixed
    // cutoff estimates a and the sensitivity |M^{-1}|, which size the point
    // targets: t_j = min_i rel |a_i| / (2 dim |M^{-1}_ij|).
    let coeff_sum = terms.iter().fold(Mag::zero(), |acc, t| {
        acc.add(&Complex::from_rational(64, &t.coeff).abs_upper())
    });
    // c_i E_a E^{[1]} has first coefficient below 1e-2: a cap for the targets
    let loose: Vec<Mag> = taus
        .iter()
        .map(|t| Complex::e(t).abs_upper().mul(&coeff_sum).mul(&rel).mul_f64(1e-2))
        .collect();
    let fine: Vec<Mag> = loose.iter().map(|t| t.mul_pow2(-40)).collect();
    let (oracle_pts, fe_pts) = split(&fine);
    let e = oracle.pilot(&oracle_pts)?;
    let fe = eisenstein_part(&terms, phi, &fe_pts, pilot_cutoff(config.cutoff))?;
    let (a_pilot, _) = solve_complex(&m, &combine(&e, &fe))?;
    let sens = inverse_abs(&m)?;
    let mut targets: Vec<Mag> = (0..dim)
        .map(|j| {
            let mut t = loose[j];
            for (i, a) in a_pilot.iter().enumerate() {
                let want = a.mid_ball().abs_upper().mul(&rel).mul_f64(0.5 / dim as f64);
                if !want.is_zero() {
                    t = t.min(&want.div(&sens[i][j]));
                }
            }
            t
        })
        .collect();

    let resolved = |a: &[Complex]| a.iter().all(|x| x.rad().le(&x.abs_lower().mul(&rel)));
    let mut solved: Option<(Vec<Complex>, Vec<Complex>, Complex)> = None;
    // With a fixed cutoff the radii of f_E do not shrink with the target.
    let passes = if matches!(config.cutoff, Cutoff::Fixed(_)) { 1 } else { MAX_PASSES };
    for _ in 0..passes {
        let (oracle_pts, fe_pts) = split(&targets);
        let attempt = oracle
            .eval_many(&oracle_pts)
            .and_then(|e| Ok((e, eisenstein_part(&terms, phi, &fe_pts, config.cutoff)?)));
        let (e, fe) = match attempt {
            Ok(x) => x,
            Err(Error::TargetUnreachable { .. }) if solved.is_some() => break,
            Err(err) => return Err(err),
        };
        let v = combine(&e, &fe);
        let (a, det) = solve_complex(&m, &v)?;
        let done = resolved(&a);
        // shrink every target by the worst shortfall
        let mut factor = 0.25f64;
        for x in &a {
            let lower = x.abs_lower();
            if x.rad().le(&lower.mul(&rel)) {
                continue;
            }
            let f = if lower.is_zero() {
                1e-3
            } else {
                lower.mul(&rel).mul_f64(0.5).div(&x.rad()).to_f64()
            };
            factor = factor.min(f);
        }
        solved = Some((v, a, det));
        if done {
            break;
        }
        for t in targets.iter_mut() {
            *t = t.mul_f64(factor);
        }
    }
    let (values, a, det) = solved.expect("at least one pass ran");
    let met = resolved(&a);

    let mut coefficients = Vec::with_capacity(dim + 1);
    coefficients.push(Complex::zero(prec));
    coefficients.extend(a);
    Ok(G2ESRepresentation {
        h,
        terms,
        remainder: CuspRemainder { weight, coefficients },
        diagnostics: Some(SolveDiagnostics {
            points,
            values,
            determinant: det,
            condition_ratio: ratio,
            target_met: met,
        }),
    })
}

/// Builds each stage of `hs` in turn, the first (which must be 2) directly and
/// each later one from its predecessor. Stages that miss the target are kept
/// and flagged.
pub fn bootstrap_chain_lenient(hs: &[u32], phi: &ParabolicCocycle, config: &BootstrapConfig) -> Result<Vec<G2ESRepresentation>> {
    if hs.first() != Some(&2) {
        return Err(Error::precondition("a bootstrap chain starts at h = 2"));
    }
    if hs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("bootstrap chain must be strictly ascending"));
    }
    let mut out = vec![self_contained(2, phi.prec())?];
    for &h in &hs[1..] {
        let prev = out.last().expect("non-empty");
        let oracle = RepresentationOracle {
            rep: prev,
            phi,
            cutoff: config.cutoff,
        };
        let rep = build_representation(h, &oracle, phi, config)?;
        out.push(rep);
    }
    Ok(out)
}

/// [`bootstrap_chain_lenient`], failing if any stage missed the target.
pub fn bootstrap_chain(hs: &[u32], phi: &ParabolicCocycle, config: &BootstrapConfig) -> Result<Vec<G2ESRepresentation>> {
    let reps = bootstrap_chain_lenient(hs, phi, config)?;
    if let Some(bad) = reps.iter().find(|r| !r.target_met()) {
        return Err(Error::TargetUnreachable {
            target: config.rel_target,
            reason: format!("compounded radii of stage h = {} exceed the relative target", bad.h),
        });
    }
    Ok(reps)
}

/// `Delta(tau)^h E(Delta)(tau)` from the Fourier expansion of `E(Delta)`.
pub fn direct_delta_power_eichler(h: u32, tau: &Complex, target: &Mag) -> Result<Complex> {
    let dh = delta_power(tau, h)?;
    let e = DirectOracle::new().eval_many(&[(tau.clone(), target.div(&dh.abs_upper().max(&Mag::pow2(-4000))))])?;
    Ok(&dh * &e[0])
}
