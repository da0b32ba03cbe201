use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use defcs::algebra::{telescope_g, StructurePolynomial};
use defcs::measures::{bg_measure_density, moment_sequence, verify_moments};
use defcs::presets::Preset;
use defcs::rational::{int, rat};
use defcs::realizations::{realize_multiphoton, realize_pair, realize_trilinear};
use defcs::repspace::LoweringModule;
use defcs::specialfn::{bessel_k, log_gamma};
use defcs::states::{annihilation_cs, eigen_residual, norm_hypergeometric, CutoffPolicy};
use defcs::{Error, Poly};

fn bg(phi: i64, dim: usize) -> LoweringModule {
    let g = telescope_g(&StructurePolynomial::su11()).unwrap();
    LoweringModule::from_casimir(&g, int(-phi), dim).unwrap()
}

#[test]
fn pair_sector_matches_two_mode_formula() {
    for q in [-3, 0, 2] {
        let t = realize_pair([30, 30], q).unwrap();
        let f = t.closure_fit().unwrap();
        assert_eq!(f, StructurePolynomial::su11());
        let vac = t.find_vacua();
        let physical: Vec<_> = vac.iter().filter(|v| v.state.is_some()).collect();
        assert_eq!(physical.len(), 1);
        assert_eq!(physical[0].n0, rat(q.abs() + 1, 2));
    }
}

#[test]
fn trilinear_roots_of_lowering_polynomial() {
    // odd charge: roots at -h0, h0 and h0 + 1 in the weight variable
    let h0 = rat(11, 2);
    let t = realize_trilinear([12, 12, 12], &h0, 1).unwrap();
    let mut roots: Vec<_> = t.find_vacua().into_iter().map(|v| v.n0).collect();
    roots.sort();
    assert_eq!(roots.len(), 3);
    assert!(t.conservation().ok());
}

#[test]
fn multiphoton_structure_degree() {
    for (m, n) in [(1, 2), (2, 2), (2, 3)] {
        let h0 = defcs::realizations::multiphoton_h0(m, n, 10 * m, 0);
        let top = 2 * (10 * m + 1);
        let t = realize_multiphoton(m, n, [m * top, n * top], &h0).unwrap();
        let f = t.closure_fit().unwrap();
        assert_eq!(f.degree() as i64, m + n - 1, "({m},{n})");
    }
}

#[test]
fn bg_norm_is_bessel_i() {
    // sum |a|^(2n) Gamma(-2phi) / (n! Gamma(n - 2phi)) = Gamma(-2phi) |a|^(1+2phi) I_(-2phi-1)(2|a|)
    let m = bg(-1, 2);
    let a: f64 = 1.7;
    let direct: f64 = (0..80)
        .map(|n| {
            let n = n as f64;
            (2.0 * n * a.ln() + log_gamma(2.0).unwrap() - log_gamma(n + 1.0).unwrap() - log_gamma(n + 2.0).unwrap()).exp()
        })
        .sum();
    let series = norm_hypergeometric(&m, Complex64::new(a, 0.0)).unwrap();
    assert!((series - direct).abs() < 1e-12 * direct);
}

#[test]
fn eigenstates_of_quadratic_preset() {
    let m = Preset::parse("quadratic").unwrap().module(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let alpha = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let st = annihilation_cs(&m, alpha, &CutoffPolicy::default()).unwrap();
        assert!(eigen_residual(&m, &st).unwrap() < 1e-12);
        assert!((st.norm_sq - 1.0).abs() < 1e-14);
    }
}

#[test]
fn corrected_measure_reproduces_factorials() {
    let m = bg(-2, 12);
    let seq = moment_sequence(&m, 6).unwrap();
    let check = verify_moments(|r| bg_measure_density(r, -2.0), &seq, 6, 1e-12).unwrap();
    assert!(check.max_rel_err < 1e-9, "{}", check.max_rel_err);
    assert!(bessel_k(0.5, 1.0).unwrap() > 0.0);
}

#[test]
fn finite_module_has_no_moments() {
    let g = telescope_g(&StructurePolynomial::su2()).unwrap();
    let m = LoweringModule::from_casimir(&g, int(-1), 8).unwrap();
    assert!(m.is_terminated());
    assert!(matches!(moment_sequence(&m, 4), Err(Error::PoleOnSpectrum { .. } | Error::NotExtendable { .. })));
}

#[test]
fn ladder_poly_module_matches_table() {
    let p = Poly::from_ints(&[0, 2, 3, 1]);
    let m = LoweringModule::from_ladder_poly(&p, int(1), 6).unwrap();
    for (k, s) in m.s().iter().enumerate() {
        assert_eq!(*s, p.eval(&int(k as i64)));
    }
}
