use num_complex::Complex64;
use proptest::prelude::*;

use tvhp_core::boson::{antinormal_order, normal_order, BosonMonomial, Letter, OperatorPoly, OperatorWord, Order};
use tvhp_core::fock::{
    apply_operator_poly, build_entangled_state, overlap_fock, psv_norm_squared, FockCutoff, SqueezeParam, TwoModeState,
    ENTANGLED_TAIL_TOL,
};
use tvhp_core::hermite::{
    hermite_coeffs, hermite_eval_conj, residual_genfunc_double, residual_genfunc_single, residual_laguerre_genfunc,
    tvhp_basis_expansion, BivariatePoly, GenParams,
};
use tvhp_core::quad::{integral_tvhp_forward, integral_tvhp_reciprocal};
use tvhp_core::GaussianRational;

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::A), Just(Letter::ADag), Just(Letter::B), Just(Letter::BDag)]
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter(), 0..=max_len)
}

fn small_rational() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| {
        GaussianRational::from_ratio(a, b) + GaussianRational::from_ratio(c, d) * GaussianRational::i()
    })
}

fn disc(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn monomial() -> impl Strategy<Value = BosonMonomial> {
    (0u32..=2, 0u32..=2, 0u32..=2, 0u32..=2).prop_map(|(p, q, r, s)| BosonMonomial::new(p, q, r, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ordering_round_trip(w in word(8)) {
        let word = OperatorWord::new(w);
        let normal = normal_order(&word);
        prop_assert_eq!(normal.to_antinormal().to_normal(), normal.clone());
        prop_assert_eq!(antinormal_order(&word).to_normal(), normal);
    }

    #[test]
    fn ordering_preserves_excess(w in word(8)) {
        let word = OperatorWord::new(w.clone());
        let count = |l: Letter| w.iter().filter(|&&x| x == l).count() as i64;
        let want = (count(Letter::ADag) - count(Letter::A), count(Letter::BDag) - count(Letter::B));
        for poly in [normal_order(&word), antinormal_order(&word)] {
            for (m, _) in poly.terms() {
                prop_assert_eq!(m.excess(), want);
            }
        }
    }

    #[test]
    fn reordering_is_linear(
        terms1 in prop::collection::vec((monomial(), small_rational()), 1..4),
        terms2 in prop::collection::vec((monomial(), small_rational()), 1..4),
        alpha in small_rational(),
        beta in small_rational(),
        w in word(5),
    ) {
        let build = |ts: &[(BosonMonomial, GaussianRational)]| {
            let mut p = OperatorPoly::zero(Order::Antinormal);
            for (m, c) in ts {
                p.add_term(*m, c.clone());
            }
            p
        };
        let (p, q) = (build(&terms1), build(&terms2));
        let combined = &p.scale(&alpha) + &q.scale(&beta);
        let separate = &p.to_normal().scale(&alpha) + &q.to_normal().scale(&beta);
        prop_assert_eq!(combined.to_normal(), separate);

        let mut scaled = OperatorWord::new(w.clone());
        scaled.coefficient = alpha.clone();
        prop_assert_eq!(normal_order(&scaled), normal_order(&OperatorWord::new(w)).scale(&alpha));
    }

    #[test]
    fn normal_form_matches_letter_products(w in word(8), a in 0u32..=2, b in 0u32..=2) {
        let cutoff = FockCutoff::new(10).unwrap();
        let len = w.len() as u32;
        prop_assume!(a + b + len <= 10);
        let state = TwoModeState::fock(cutoff, a, b);
        let direct = w.iter().rev().fold(state.clone(), |s, &l| s.apply_letter(l));
        let via_poly = apply_operator_poly(&normal_order(&OperatorWord::new(w)), &state).unwrap();
        prop_assert!(direct.sub(&via_poly).norm_sqr() < 1e-18 * direct.norm_sqr().max(1.0));
    }

    #[test]
    fn nonzero_polynomials_have_nonzero_matrices(
        terms in prop::collection::vec((monomial(), small_rational()), 1..5),
    ) {
        let mut p = OperatorPoly::zero(Order::Normal);
        for (m, c) in &terms {
            p.add_term(*m, c.clone());
        }
        prop_assume!(!p.is_zero());
        // Monomials reach word length 8 and need columns up to r + s = 4.
        let cutoff = FockCutoff::new(16).unwrap();
        let limit = 16 - p.max_word_len();
        let mut seen = false;
        for a in 0..=limit {
            for b in 0..=limit - a {
                let image = apply_operator_poly(&p, &TwoModeState::fock(cutoff, a, b)).unwrap();
                seen |= image.norm_sqr() > 1e-20;
            }
        }
        prop_assert!(seen);
    }

    #[test]
    fn conjugation_swaps_indices(m in 0u32..=10, n in 0u32..=10, xi in disc(2.5)) {
        let lhs = hermite_eval_conj(m, n, xi).conj();
        let rhs = hermite_eval_conj(n, m, xi);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn overlap_matches_inner_product(xi in disc(2.0), m in 0u32..=10, n in 0u32..=10) {
        let cutoff = FockCutoff::new(40).unwrap();
        let state = build_entangled_state(xi, cutoff, ENTANGLED_TAIL_TOL).unwrap();
        let ip = state.inner(&TwoModeState::fock(cutoff, m, n));
        prop_assert!((ip - overlap_fock(xi, m, n)).norm() < 1e-12);
    }

    #[test]
    fn entangled_amplitudes_recurrence(xi in disc(1.5)) {
        let n = 30;
        let s = build_entangled_state(xi, FockCutoff::new(n).unwrap(), ENTANGLED_TAIL_TOL).unwrap();
        for a in 0..=n - 2 {
            for b in 0..=n - 2 - a {
                let lhs = xi * s.amp(a, b);
                let mut rhs = s.amp(a + 1, b) * f64::from(a + 1).sqrt();
                if b > 0 {
                    rhs += s.amp(a, b - 1) * f64::from(b).sqrt();
                }
                prop_assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn single_genfunc_residual_shrinks(t in disc(1.0), tp in disc(1.0), xi in disc(1.0)) {
        let p = GenParams { t, t_prime: tp, ..Default::default() };
        let (u, v) = (xi, xi.conj());
        let r10 = residual_genfunc_single(&p, u, v, 10);
        let r20 = residual_genfunc_single(&p, u, v, 20);
        let r30 = residual_genfunc_single(&p, u, v, 30);
        let floor = 1e-13;
        prop_assert!(r20 <= r10 + floor && r30 <= r20 + floor);
        prop_assert!(r30 < 1e-10);
    }

    #[test]
    fn double_genfunc_residual_shrinks(s in disc(0.5), t in disc(0.5), x in disc(1.0), y in disc(1.0)) {
        let p = GenParams { t, s, ..Default::default() };
        let r = |m| residual_genfunc_double(&p, x, y, y.conj(), x.conj(), m).unwrap();
        prop_assert!(r(20) <= r(10) + 1e-13 && r(30) <= r(20) + 1e-13);
    }

    #[test]
    fn laguerre_genfunc_residual_shrinks(s in disc(0.5), x in disc(2.0)) {
        let r = |m| residual_laguerre_genfunc(s, x, m).unwrap();
        prop_assert!(r(30) <= r(15) + 1e-13 && r(60) <= r(30) + 1e-13);
    }

    #[test]
    fn mutual_transform_consistency(m in 0u32..=5, n in 0u32..=5, alpha in disc(2.0)) {
        // ξ^m ξ*^n = Σ c_{jk} H_{j,k}(ξ, ξ*); integrate both sides.
        let expansion = tvhp_basis_expansion(&BivariatePoly::monomial(m, n, GaussianRational::from_int(1)));
        let mut via_forward = Complex64::new(0.0, 0.0);
        for (&(j, k), c) in expansion.terms() {
            via_forward += c.to_complex64() * integral_tvhp_forward(j, k, alpha, 12).unwrap();
        }
        let direct = integral_tvhp_reciprocal(m, n, alpha, 12).unwrap();
        prop_assert!((via_forward - direct).norm() <= 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn psv_norm_converges_geometrically(m in 0u32..=3, tau in 0.1f64..0.5) {
        let sq = SqueezeParam::from_tau(tau).unwrap();
        let at = |n| psv_norm_squared(m, &sq, FockCutoff::new(n).unwrap()).map(|r| r.numeric);
        let (Ok(a), Ok(b), Ok(c)) = (at(40), at(41), at(42)) else {
            return Ok(());
        };
        prop_assert!(a <= b && b <= c);
        if b - a > 0.0 {
            let ratio = (c - b) / (b - a);
            // Increment ratio ((N+1)/(N+1-m))² τ² → τ².
            let want = (42.0 / (42.0 - f64::from(m))).powi(2) * tau * tau;
            prop_assert!((ratio - want).abs() < 1e-6 * want.max(1e-30) + 1e-12, "{ratio} vs {want}");
        }
    }
}

#[test]
fn hermite_symmetry_grading_and_recurrence() {
    let u = BivariatePoly::monomial(1, 0, GaussianRational::from_int(1));
    for m in 0..=8u32 {
        for n in 0..=8u32 {
            let h = hermite_coeffs(m, n);
            let swapped = hermite_coeffs(n, m);
            for (&(j, k), c) in h.terms() {
                assert_eq!(&swapped.coefficient(k, j), c);
                assert_eq!(j as i64 - k as i64, m as i64 - n as i64);
            }
            assert_eq!(h.len(), swapped.len());
            let mut rhs = &u * &h;
            if n > 0 {
                rhs = &rhs - &hermite_coeffs(m, n - 1).scale(&GaussianRational::from_int(n as i64));
            }
            assert_eq!(*hermite_coeffs(m + 1, n), rhs);
        }
    }
}
