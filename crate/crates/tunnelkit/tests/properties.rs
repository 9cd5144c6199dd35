use proptest::prelude::*;

use tunnelkit::analysis::{exp_law_fit, fit_corrections};
use tunnelkit::instanton::{path_count, triangle_closed_forms, triangle_counts, PathSetting};
use tunnelkit::numerics::{
    band_reduce_givens, eigenvalues_bisection, golden_section, jacobi_dense, sturm_count,
};
use tunnelkit::planewave::{build_sector, sector_lowest};
use tunnelkit::potentials::{Boundary, PotentialSpec};
use tunnelkit::{BigReal, Precision, SymBandedMatrix, SymTridiagonalMatrix};

fn p() -> Precision {
    Precision::new(30).unwrap()
}

fn r(x: f64) -> BigReal {
    BigReal::from_f64(x, p())
}

fn close(a: &BigReal, b: &BigReal, tol: f64) -> bool {
    (a - b).abs().to_f64() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bisection_matches_jacobi(
        diag in prop::collection::vec(-3.0f64..3.0, 2..9),
        seed in prop::collection::vec(-1.5f64..1.5, 8),
    ) {
        let n = diag.len();
        let m = SymTridiagonalMatrix::new(diag.iter().map(|&x| r(x)).collect(), seed[..n - 1].iter().map(|&x| r(x)).collect()).unwrap();
        let tol = BigReal::parse("1e-22", p()).unwrap();
        let bis = eigenvalues_bisection(&m, 0, n - 1, &tol).unwrap();
        let (jac, _) = jacobi_dense(m.to_dense(), false).unwrap();
        for (a, b) in bis.iter().zip(&jac) {
            prop_assert!(close(a, b, 1e-20), "{} vs {}", a, b);
        }
    }

    #[test]
    fn sturm_count_is_monotone(
        diag in prop::collection::vec(-3.0f64..3.0, 3..8),
        off in prop::collection::vec(-1.0f64..1.0, 7),
        lambdas in prop::collection::vec(-6.0f64..6.0, 2),
    ) {
        let n = diag.len();
        let m = SymTridiagonalMatrix::new(diag.iter().map(|&x| r(x)).collect(), off[..n - 1].iter().map(|&x| r(x)).collect()).unwrap();
        let (lo, hi) = if lambdas[0] <= lambdas[1] { (lambdas[0], lambdas[1]) } else { (lambdas[1], lambdas[0]) };
        prop_assert!(sturm_count(&m, &r(lo)) <= sturm_count(&m, &r(hi)));
        prop_assert_eq!(sturm_count(&m, &r(100.0)), n);
    }

    #[test]
    fn givens_reduction_preserves_spectrum(
        n in 3usize..9,
        band in 2usize..4,
        entries in prop::collection::vec(-2.0f64..2.0, 40),
    ) {
        let band = band.min(n - 1);
        let mut m = SymBandedMatrix::zeros(n, band, p()).unwrap();
        let mut it = entries.iter().cycle();
        for i in 0..n {
            for d in 0..=band {
                if i + d < n {
                    m.set(i, i + d, r(*it.next().unwrap()));
                }
            }
        }
        let t = band_reduce_givens(&m);
        let tol = BigReal::parse("1e-22", p()).unwrap();
        let reduced = eigenvalues_bisection(&t, 0, n - 1, &tol).unwrap();
        let (dense, _) = jacobi_dense(m.to_dense(), false).unwrap();
        for (a, b) in reduced.iter().zip(&dense) {
            prop_assert!(close(a, b, 1e-20), "{} vs {}", a, b);
        }
    }

    #[test]
    fn fit_recovers_noiseless_polynomials(
        coeffs in prop::collection::vec(-5.0f64..5.0, 3),
        degree in 1usize..=3,
    ) {
        let prec = Precision::new(50).unwrap();
        let cs: Vec<BigReal> = coeffs[..degree].iter().map(|&c| BigReal::from_f64(c, prec)).collect();
        let pts: Vec<(BigReal, BigReal)> = ["0.004", "0.006", "0.009", "0.012", "0.017"]
            .iter()
            .map(|g| {
                let g = BigReal::parse(g, prec).unwrap();
                let y = cs.iter().enumerate().fold(BigReal::zero(prec), |acc, (i, c)| acc + c * g.powi(i as i64 + 1));
                (g, y)
            })
            .collect();
        let f = fit_corrections(&pts, degree).unwrap();
        for (a, b) in f.coefficients.iter().zip(&cs) {
            let scale = b.abs().to_f64().max(1.0);
            prop_assert!((a - b).abs().to_f64() <= 1e-25 * scale, "{} vs {}", a, b);
        }
    }

    #[test]
    fn exp_law_recovers_synthetic_data(c in 0.1f64..50.0, s in 0.05f64..1.0) {
        let prec = Precision::new(60).unwrap();
        let (cb, sb) = (BigReal::from_f64(c, prec), BigReal::from_f64(s, prec));
        let pts: Vec<(BigReal, BigReal)> = ["0.01", "0.014", "0.02", "0.03"]
            .iter()
            .map(|g| {
                let g = BigReal::parse(g, prec).unwrap();
                let y = &cb / g.sqrt() * (-(&sb / &g)).exp();
                (g, y)
            })
            .collect();
        let f = exp_law_fit(&pts).unwrap();
        prop_assert!(((&f.s - &sb) / &sb).abs().to_f64() < 1e-30);
        prop_assert!(((&f.c - &cb) / &cb).abs().to_f64() < 1e-28);
    }

    #[test]
    fn golden_section_finds_parabola_vertex(c in -0.9f64..0.9) {
        let (lo, hi) = (r(-1.0), r(1.0));
        let tol = BigReal::parse("1e-12", p()).unwrap();
        let cb = r(c);
        let (x, _, _) = golden_section(&lo, &hi, &tol, |x| (x - &cb).sqr());
        prop_assert!(close(&x, &cb, 1e-11));
    }

    #[test]
    fn ring_sectors_k_and_minus_k_are_degenerate(sectors in 3usize..9, g in 0.03f64..0.2) {
        let gb = BigReal::from_f64(g, p());
        for k in 1..sectors {
            let a = sector_lowest(&build_sector(sectors, k, &gb, 10).unwrap(), 1).unwrap().values.remove(0);
            let b = sector_lowest(&build_sector(sectors, sectors - k, &gb, 10).unwrap(), 1).unwrap().values.remove(0);
            // The mirrored sector lacks one boundary plane wave; its effect is far below this.
            prop_assert!(close(&a, &b, 1e-12), "k={}: {} vs {}", k, a, b);
        }
    }

    #[test]
    fn potentials_are_even(x in -3.0f64..3.0, delta in 0.0f64..0.3, g in 0.01f64..1.0) {
        let prec = p();
        let gb = BigReal::from_f64(g, prec);
        let specs = [
            PotentialSpec::AnharmonicQuartic { eps: BigReal::one(prec), g: gb.clone(), c: BigReal::zero(prec) },
            PotentialSpec::double_well(gb.clone()),
            PotentialSpec::triple_well(gb.clone(), BigReal::from_f64(delta, prec)),
            PotentialSpec::cosine(gb, Boundary::InfiniteLine),
        ];
        let xb = BigReal::from_f64(x, prec);
        for s in &specs {
            let a = s.eval(&xb, 0).unwrap();
            let b = s.eval(&(-xb.clone()), 0).unwrap();
            prop_assert!(close(&a, &b, 1e-25 * a.abs().to_f64().max(1.0)));
        }
    }

    #[test]
    fn triple_well_side_minima_are_pinned(delta in 0.0f64..0.3) {
        let prec = p();
        let spec = PotentialSpec::triple_well(BigReal::from_f64(0.01, prec), BigReal::from_f64(delta, prec));
        for x in [BigReal::one(prec), -BigReal::one(prec)] {
            prop_assert!(spec.eval(&x, 0).unwrap().abs().to_f64() < 1e-25);
            prop_assert!(spec.eval(&x, 1).unwrap().abs().to_f64() < 1e-25);
            prop_assert!((spec.eval(&x, 2).unwrap().to_f64() - 1.0).abs() < 1e-25);
        }
        let centre = spec.eval(&BigReal::zero(prec), 2).unwrap().to_f64();
        prop_assert!((centre - (1.0 + delta)).abs() < 1e-12);
    }

    #[test]
    fn decimal_text_round_trips(x in -1e6f64..1e6) {
        let v = r(x);
        let back = BigReal::parse(&v.to_sci(30), p()).unwrap();
        prop_assert!((&v - &back).abs() <= v.abs() * BigReal::parse("1e-29", p()).unwrap());
    }
}

#[test]
fn triangle_recursion_equals_closed_form_far_out() {
    for n in 0..=90 {
        assert_eq!(triangle_counts(n), triangle_closed_forms(n), "n = {n}");
    }
}

#[test]
fn line_counts_sum_to_all_walks() {
    for n in 0..=40u32 {
        let total = (-(n as i64)..=n as i64)
            .map(|d| path_count(PathSetting::InfiniteLine { displacement: d }, n))
            .fold(num_bigint::BigUint::from(0u32), |a, b| a + b);
        assert_eq!(total, num_bigint::BigUint::from(1u32) << n);
    }
}
