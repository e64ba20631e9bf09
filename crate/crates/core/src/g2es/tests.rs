use std::sync::OnceLock;

use super::*;
use crate::eichler::deficit_eval;
use crate::eisenstein::eval_vv_eis;
use crate::symd::PolyD;

const P: u32 = 192;

fn delta() -> &'static ParabolicCocycle {
    static C: OnceLock<ParabolicCocycle> = OnceLock::new();
    C.get_or_init(|| ParabolicCocycle::for_delta(P).unwrap())
}

#[test]
fn coset_reps_small() {
    let reps = coset_reps(3);
    assert_eq!(reps.len(), 4);
    let m = reps[0].matrix();
    assert_eq!(m.to_i64s(), Some([0, -1, 1, 0]));
    for r in coset_reps(30) {
        // matrix() checks the determinant
        let m = r.matrix();
        assert_eq!(m.to_i64s().unwrap()[2], r.c as i64);
        assert!(r.a >= 0 && (r.a as u64) < r.c.max(1) || r.c == 1);
    }
    assert!(DoubleCosetRep::new(4, 2).is_err());
    assert!(DoubleCosetRep::new(3, 3).is_err());
}

#[test]
fn zero_cocycle_gives_exact_zero() {
    let phi = ParabolicCocycle::zero(12, P).unwrap();
    let e = triv_sym_expansions(&phi, &[14], 10, 5, 10, P).unwrap();
    for c in &e[0].coeffs {
        assert!(c.rad().is_zero() && c.contains_f64(0.0, 0.0));
    }
    let v = e[0].eval(&Complex::from_f64s(P, 0.1, 1.0)).unwrap();
    assert!(v.rad().is_zero() && v.contains_f64(0.0, 0.0));
    let s = g2es_coeffs_sym_triv(&phi, 14, 3, 4, 10, P).unwrap();
    assert!(s.iter().all(|c| c.rad().is_zero() && c.contains_f64(0.0, 0.0)));
    let t = Complex::from_f64s(P, 0.0, 1.0);
    assert!(eval_g2es(14, &phi, 10, &t, &Mag::pow2(-40)).unwrap().rad().is_zero());
}

#[test]
fn parameter_range() {
    let phi = delta();
    // k + 2j - 2l + 3 = 6 + 0 - 24 + 3 <= 1
    assert!(matches!(triv_sym_expansions(phi, &[6], 0, 3, 4, P), Err(Error::Divergent(_))));
    assert!(triv_sym_expansions(phi, &[13], 10, 3, 4, P).is_err());
    assert!(triv_sym_expansions(phi, &[14], 11, 3, 4, P).is_err());
    assert!(g2es_coeffs_sym_triv(phi, 12, 0, 3, 4, P).is_err());
    // r > d: empty sum
    let z = g2es_coeff_sym_triv(16, phi, 2, 11, 4, P).unwrap();
    assert!(z.rad().is_zero() && z.contains_f64(0.0, 0.0));
}

#[test]
fn summands_are_representative_independent() {
    let phi = delta();
    let t = |m: i64| GroupElement::t_pow(m);
    for (c, d) in [(1u64, 0u64), (2, 1), (5, 2), (7, 3), (12, 5)] {
        let g = DoubleCosetRep::new(c, d).unwrap().matrix();
        let base = triv_sym_summand(phi, &g, 14, 10, 3, P).unwrap();
        for m in -2..=2 {
            for m2 in -2..=2 {
                let h = &(&t(m) * &g) * &t(m2);
                let v = triv_sym_summand(phi, &h, 14, 10, 3, P).unwrap();
                assert!(v.overlaps(&base), "c={c} d={d} m={m} m'={m2}");
            }
        }
        // j < d uses fewer pairing terms
        let b2 = triv_sym_summand(phi, &g, 16, 8, 2, P).unwrap();
        let v2 = triv_sym_summand(phi, &(&t(1) * &(&g * &t(-2))), 16, 8, 2, P).unwrap();
        assert!(v2.overlaps(&b2));
    }
}

#[test]
fn batched_sum_matches_summands() {
    let phi = delta();
    let c_max = 9;
    let ks = [10u32, 14];
    let e = triv_sym_expansions(phi, &ks, 10, 4, c_max, P).unwrap();
    for (ex, &k) in e.iter().zip(&ks) {
        for n in 1..=4u64 {
            let mut acc = Complex::zero(P);
            for r in coset_reps(c_max) {
                acc += &triv_sym_summand(phi, &r.matrix(), k, 10, n, P).unwrap();
            }
            let got = &ex.coeffs[n as usize];
            let (dr, di) = (&acc - got).to_f64s();
            assert!(dr.hypot(di) < 1e-40 * (1.0 + acc.abs_upper().to_f64()), "k={k} n={n}");
            assert!(got.overlaps(&acc));
        }
    }
}

#[test]
fn doubling_cutoff_nests() {
    let phi = delta();
    let a = triv_sym_expansions(phi, &[14], 10, 5, 20, P).unwrap();
    let b = triv_sym_expansions(phi, &[14], 10, 5, 40, P).unwrap();
    for n in 1..=5 {
        assert!(a[0].coeffs[n].overlaps(&b[0].coeffs[n]));
        assert!(b[0].coeffs[n].rad().le(&a[0].coeffs[n].rad()));
    }
    let s1 = g2es_coeffs_sym_triv(phi, 16, 2, 3, 10, P).unwrap();
    let s2 = g2es_coeffs_sym_triv(phi, 16, 2, 3, 20, P).unwrap();
    for n in 1..=3 {
        assert!(s1[n].overlaps(&s2[n]));
    }
}

#[test]
fn first_coefficient_cancels_in_delta_squared_combination() {
    // The q^1 coefficient of Delta^2 E(Delta) vanishes and the classical
    // factors start with 1, so the weighted first coefficients must cancel.
    let phi = delta();
    let dec = crate::modforms::decompose_delta_power(2, 12).unwrap();
    let ks: Vec<u32> = dec.terms.iter().map(|t| t.right + t.left - 10).collect();
    let e = triv_sym_expansions(phi, &ks, 10, 1, 60, P).unwrap();
    let mut acc = Complex::zero(P);
    for (t, ex) in dec.terms.iter().zip(&e) {
        acc += &ex.coeffs[1].mul_rational(&t.coeff);
    }
    let (re, im) = acc.to_f64s();
    assert!(re.hypot(im) < 1e-15, "{acc}");
}

#[test]
fn deficit_matches_cocycle_pairing() {
    // E|_k(gamma - 1)(tau) = -phi^vee(gamma^{-1})(E_k(tau; d, j))
    let phi = delta();
    let (k, j) = (14u32, 10usize);
    let cases = [
        (GroupElement::s(), (1.0 / 3.0, 1.0)),
        (GroupElement::new(1, 0, 1, 1).unwrap(), (-0.9, 0.8)),
        (GroupElement::new(0, -1, 1, 1).unwrap(), (-0.4, 1.1)),
    ];
    let ex = triv_sym_expansions(phi, &[k], j, 40, 80, P).unwrap().remove(0);
    for (g, (x, y)) in cases {
        let tau = Complex::from_f64s(P, x, y);
        let lhs = deficit_eval(|t: &Complex| ex.eval(t), &g, k as i64, &tau).unwrap();
        let v = eval_vv_eis(k, 10, j, &tau, &Mag::pow2(-120)).unwrap();
        let v = PolyD::from_x_minus_tau_basis(v.into_coeffs(), &tau).unwrap();
        let rhs = phi.eval(&g.inverse()).dual_apply(&v).unwrap().neg();
        assert!(lhs.overlaps(&rhs), "{g:?}: {lhs} vs {rhs}");
        let mid = (&lhs - &rhs).abs_upper().to_f64() - lhs.rad().to_f64() - rhs.rad().to_f64();
        // The certified radius is dominated by the coefficient tail bound; the
        // midpoints agree far more closely.
        assert!(mid < 1e-15 * rhs.abs_upper().to_f64());
    }
}

#[test]
fn planner_respects_target_or_reports() {
    let phi = delta();
    let tau = Complex::from_f64s(P, 0.1, 1.5);
    let target = Mag::pow2(-20);
    match eval_g2es(14, phi, 10, &tau, &target) {
        Ok(v) => assert!(v.rad().le(&target.mul_f64(1.01)), "{} > {}", v.rad(), target),
        Err(e) => assert!(matches!(e, Error::TargetUnreachable { .. })),
    }
    // the series part alone is always satisfiable
    let (n, c) = plan_triv_sym(&[(14, Mag::pow2(-10))], 10, 12, &Mag::from_f64(1.5)).unwrap();
    assert!(n >= 1 && c >= 1);
}

