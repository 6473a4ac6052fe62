//! Cross-checks the symbolic identities against plain matrix action on a
//! truncated Fock space. One side of each identity is applied letter by
//! letter, so the comparison does not go through the reordering engine.

use tvhp_core::boson::{
    check_identity_antinormal_single, check_identity_normal, check_identity_reciprocal, check_identity_single_mode,
    substitute_in_symbol, Letter, OperatorPoly, Order,
};
use tvhp_core::fock::{apply_operator_poly, FockCutoff, TwoModeState};
use tvhp_core::hermite::hermite_coeffs;
use tvhp_core::GaussianRational;

const N: u32 = 12;

fn cutoff() -> FockCutoff {
    FockCutoff::new(N).unwrap()
}

/// Applies a product of letter sums, rightmost factor first.
fn apply_factors(state: &TwoModeState, factors: &[&[Letter]]) -> TwoModeState {
    factors.iter().rev().fold(state.clone(), |s, sum| {
        sum.iter()
            .map(|&l| s.apply_letter(l))
            .reduce(|a, b| a.add(&b))
            .expect("non-empty letter sum")
    })
}

/// Basis states `|a, b⟩` with `a + b ≤ N - word_len`.
fn guarded_columns(word_len: u32) -> Vec<TwoModeState> {
    let limit = N - word_len;
    (0..=limit)
        .flat_map(|a| (0..=limit - a).map(move |b| (a, b)))
        .map(|(a, b)| TwoModeState::fock(cutoff(), a, b))
        .collect()
}

fn assert_close(x: &TwoModeState, y: &TwoModeState, what: &str) {
    let diff = x.sub(y).norm_sqr().sqrt();
    let scale = x.norm_sqr().sqrt().max(1.0);
    assert!(diff <= 1e-11 * scale, "{what}: {diff} vs scale {scale}");
}

const U: &[Letter] = &[Letter::A, Letter::BDag];
const V: &[Letter] = &[Letter::ADag, Letter::B];

#[test]
fn reciprocal_identity_on_states() {
    for m in 0..=4 {
        for n in 0..=4 {
            let check = check_identity_reciprocal(m, n);
            let mut factors = vec![U; m as usize];
            factors.extend(std::iter::repeat(V).take(n as usize));
            for col in guarded_columns(m + n) {
                let direct = apply_factors(&col, &factors);
                let symbolic = apply_operator_poly(&check.rhs, &col).unwrap();
                assert_close(&direct, &symbolic, &format!("reciprocal ({m},{n})"));
            }
        }
    }
}

#[test]
fn normal_identity_on_states() {
    for m in 0..=4 {
        for n in 0..=4 {
            let check = check_identity_normal(m, n);
            for col in guarded_columns(m + n) {
                // H_{m,n}(a+b†, a†+b) term by term; the two arguments commute.
                let mut direct = TwoModeState::zero(cutoff());
                for (&(j, k), c) in hermite_coeffs(m, n).terms() {
                    let mut factors = vec![U; j as usize];
                    factors.extend(std::iter::repeat(V).take(k as usize));
                    direct = direct.add(&apply_factors(&col, &factors).scale(c.to_complex64()));
                }
                let symbolic = apply_operator_poly(&check.rhs, &col).unwrap();
                assert_close(&direct, &symbolic, &format!("normal ({m},{n})"));
            }
        }
    }
}

#[test]
fn single_mode_identity_on_states() {
    for m in 0..=5 {
        for n in 0..=5 {
            let check = check_identity_single_mode(m, n);
            let mut factors: Vec<&[Letter]> = vec![&[Letter::A]; n as usize];
            factors.extend(std::iter::repeat(&[Letter::ADag][..]).take(m as usize));
            for col in guarded_columns(m + n) {
                let direct = apply_factors(&col, &factors);
                let symbolic = apply_operator_poly(&check.rhs, &col).unwrap();
                assert_close(&direct, &symbolic, &format!("single mode ({m},{n})"));
            }
        }
    }
}

#[test]
fn antinormal_symbol_acts_as_claimed() {
    for m in 0..=5 {
        for n in 0..=5 {
            // Antinormal symbol applied as written (annihilators act last).
            let u = OperatorPoly::letter(Order::Antinormal, Letter::ADag);
            let v = OperatorPoly::letter(Order::Antinormal, Letter::A);
            let symbol = substitute_in_symbol(&hermite_coeffs(m, n), &u, &v, Order::Antinormal);
            let mut factors: Vec<&[Letter]> = vec![&[Letter::ADag]; m as usize];
            factors.extend(std::iter::repeat(&[Letter::A][..]).take(n as usize));
            for col in guarded_columns(m + n) {
                let via_symbol = apply_operator_poly(&symbol, &col).unwrap();
                assert_close(&via_symbol, &apply_factors(&col, &factors), &format!("antinormal ({m},{n})"));
            }
            assert!(check_identity_antinormal_single(m, n).difference.is_zero());
        }
    }
}

#[test]
fn wrong_phase_is_visible_on_states() {
    let check = check_identity_reciprocal(2, 1);
    let wrong = check.rhs.scale(&GaussianRational::i());
    let col = TwoModeState::fock(cutoff(), 1, 1);
    let direct = apply_factors(&col, &[U, U, V]);
    let bad = apply_operator_poly(&wrong, &col).unwrap();
    assert!(direct.sub(&bad).norm_sqr() > 1e-3);
}
