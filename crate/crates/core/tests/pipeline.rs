//! End-to-end checks across modules.

use eichler_core::arith::{Complex, Mag, DEFAULT_PREC, GUARD_BITS};
use eichler_core::bootstrap::{
    bootstrap_chain, build_representation, direct_delta_power_eichler, eval_representation, BootstrapConfig,
    DirectOracle,
};
use eichler_core::cocycle::ParabolicCocycle;
use eichler_core::g2es::{triv_sym_expansions, Cutoff};
use eichler_core::par::set_parallel;

const PREC: u32 = DEFAULT_PREC + GUARD_BITS;

// Both code paths must produce bit-identical balls. Kept in one test since
// the switch is process-wide.
#[test]
fn parallel_and_sequential_agree() {
    let phi = ParabolicCocycle::for_delta(PREC).unwrap();
    let run = |on: bool| {
        set_parallel(on);
        let e = triv_sym_expansions(&phi, &[14, 10, 8], 10, 6, 24, PREC).unwrap();
        let rep = build_representation(5, &DirectOracle::new(), &phi, &BootstrapConfig::default()).unwrap();
        (e.into_iter().flat_map(|x| x.coeffs).collect::<Vec<Complex>>(), rep)
    };
    let (seq_e, seq_rep) = run(false);
    let (par_e, par_rep) = run(true);
    assert_eq!(seq_e, par_e);
    for (a, b) in seq_e.iter().zip(&par_e) {
        assert_eq!(a.rad(), b.rad());
    }
    assert_eq!(seq_rep, par_rep);
}

#[test]
fn h2_representation_evaluates_away_from_the_build() {
    let phi = ParabolicCocycle::for_delta(PREC).unwrap();
    let rep = bootstrap_chain(&[2], &phi, &BootstrapConfig::default()).unwrap().remove(0);
    for (re, im) in [(-0.45, 0.9), (0.3, 1.7)] {
        let tau = Complex::from_f64s(PREC, re, im);
        let direct = direct_delta_power_eichler(2, &tau, &Mag::pow2(-200)).unwrap();
        let ours = eval_representation(&rep, &phi, &tau, &Mag::pow2(-200), Cutoff::Fixed(60)).unwrap();
        assert!(ours.overlaps(&direct), "tau = {re} + {im} i");
    }
}
