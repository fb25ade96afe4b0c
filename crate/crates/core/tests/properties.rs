//! Randomized invariants, 1000 cases each from a fixed seed.

mod support;
use support::*;

fn run(prop: fn() -> Result<u32, String>) {
    assert_eq!(prop().unwrap(), PROPERTY_CASES);
}

#[test]
fn group_action_law() {
    run(prop_action_law);
}

#[test]
fn sign_multiplicativity() {
    run(prop_sign_multiplicative);
}

#[test]
fn sum_of_squared_dimensions() {
    run(prop_dimension_squares);
}

#[test]
fn tableau_count_formulas() {
    run(prop_tableau_counts);
}

#[test]
fn exact_float_agreement() {
    run(prop_exact_float_agreement);
}

#[test]
fn runner_is_deterministic() {
    use proptest::strategy::{Strategy, ValueTree};
    let draw = || {
        let mut r = runner();
        (0..20)
            .map(|_| perm_strategy(1, 8).new_tree(&mut r).unwrap().current())
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(), draw());
}
