mod common;

use common::*;
use proptest::prelude::*;
use xva_core::analytic::{bond_price, cds_upfront, trs_upfront};
use xva_core::claims::CallSpreadParams;
use xva_core::numgrid::Surface;
use xva_core::xva::{
    alpha_beta, source_f, FixedPointSettings, InitialGuess, PartyParams, PricingProblem, Side,
};

const TOL: f64 = 1e-5;

fn settings() -> FixedPointSettings {
    FixedPointSettings::with_tolerance(TOL)
}

fn value_at(p: &PricingProblem, side: Side, s: f64) -> f64 {
    let (v, _) = p.solve_with_provision(side, &settings()).unwrap();
    v.at_node(0.0, s).unwrap()
}

fn assert_contracting(errors: &[f64]) {
    for w in errors[1..].windows(2) {
        assert!(w[1] < w[0], "trace not decreasing: {errors:?}");
        assert!(w[1] / w[0] < 0.5, "weak contraction: {errors:?}");
    }
    let (last, head) = errors.split_last().unwrap();
    assert!(*last <= TOL);
    assert!(head.iter().all(|&e| e > TOL));
}

#[test]
fn error_traces_contract() {
    let (b, s) = bilateral_parties();
    let spread = call_spread_problem(0.01, b, s, coarse_grid());
    let forward = forward_problem(30.0, b, s);
    let cds = cds_problem(cir(), factor_grid(5.0));
    for p in [spread, forward, cds] {
        for side in [Side::Buyer, Side::Seller] {
            let (_, report) = p.solve_with_provision(side, &settings()).unwrap();
            assert!(report.converged);
            assert_contracting(&report.errors);
        }
    }
}

#[test]
fn initial_guess_does_not_matter() {
    let (b, s) = bilateral_parties();
    let p = call_spread_problem(0.5, b, s, coarse_grid());
    let (zero, _) = p.solve_with_provision(Side::Buyer, &settings()).unwrap();
    let flat = FixedPointSettings {
        initial: InitialGuess::FlatTerminal,
        ..settings()
    };
    let (from_payoff, _) = p.solve_with_provision(Side::Buyer, &flat).unwrap();
    assert!(zero.max_abs_diff(&from_payoff).unwrap() <= 2.0 * TOL);
}

#[test]
fn symmetric_scenarios_have_no_spread() {
    let scenarios = [
        // full collateral, equal collateral rates
        (party(0.05, 0.4, 1.0, 0.01), party(0.15, 0.4, 1.0, 0.01)),
        // no collateral, equal loss-weighted intensities
        (party(0.05, 0.4, 0.0, 0.01), party(0.075, 0.6, 0.0, 0.03)),
        // equal collateral ratio and rate, equal loss-weighted intensities
        (party(0.05, 0.4, 0.5, 0.01), party(0.075, 0.6, 0.5, 0.01)),
    ];
    for (b, s) in scenarios {
        let x = alpha_beta(&b, &s);
        assert!((x.alpha - x.beta).abs() < 1e-15);
        let p = call_spread_problem(0.01, b, s, coarse_grid());
        let quotes = p.bid_ask(&settings()).unwrap();
        assert!(quotes.spread.max_abs() <= 2.0 * TOL);
    }
}

#[test]
fn call_dominance_chain() {
    let b = party(0.05, 0.4, 0.0, 0.0);
    let s = party(0.10, 0.4, 0.0, 0.0);
    let x = alpha_beta(&b, &s);
    assert!(x.alpha >= 0.0 && x.beta >= 0.0);
    assert!(x.lambda_counterparties >= x.alpha.max(x.beta));
    let p = call_problem(call_grid(), b, s);
    let crf = p.solve_crf().unwrap();
    let slack = 2.0 * TOL;
    for side in [Side::Buyer, Side::Seller] {
        let (with, _) = p.solve_with_provision(side, &settings()).unwrap();
        let without = p.solve_without_provision(&crf, side).unwrap();
        for ((w, wo), c) in with.values().iter().zip(without.values()).zip(crf.values()) {
            assert!(*w <= wo + slack, "{side:?}: {w} > {wo}");
            assert!(*wo <= c + slack, "{side:?}: {wo} > {c}");
        }
    }
}

fn sweep(values: &[f64], make: impl Fn(f64) -> (PartyParams, PartyParams)) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let (b, s) = make(v);
            value_at(&call_spread_problem(0.01, b, s, coarse_grid()), Side::Buyer, 15.0)
        })
        .collect()
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + 2.0 * TOL)
}

fn nondecreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - 2.0 * TOL)
}

#[test]
fn monotone_in_counterparty_parameters() {
    let rates = [0.05, 0.10, 0.15, 0.20, 0.25];
    let v = sweep(&rates, |l2| (party(0.15, 0.4, 0.0, 0.01), party(l2, 0.4, 0.0, 0.01)));
    assert!(nonincreasing(&v), "lambda2 sweep {v:?}");
    let v = sweep(&rates, |l1| (party(l1, 0.4, 0.0, 0.01), party(0.15, 0.4, 0.0, 0.01)));
    assert!(nondecreasing(&v), "lambda1 sweep {v:?}");
    let v = sweep(&[0.0, 0.5, 1.0, 1.2], |d2| {
        (party(0.05, 0.4, 0.0, 0.01), party(0.15, 0.4, d2, 0.01))
    });
    assert!(nondecreasing(&v), "delta2 sweep {v:?}");
    let v = sweep(&[-0.05, -0.025, 0.0], |c1| {
        (party(0.05, 0.4, 1.0, c1), party(0.15, 0.4, 1.0, 0.01))
    });
    assert!(nondecreasing(&v), "c1 sweep {v:?}");
}

#[test]
fn unilateral_dominance() {
    let b = party(0.0, 0.4, 0.0, 0.01);
    let s = party(0.15, 0.4, 0.0, 0.01);
    let p = call_spread_problem(0.01, b, s, coarse_grid());
    let crf = p.solve_crf().unwrap();
    let q = p.bid_ask(&settings()).unwrap();
    let slack = 2.0 * TOL;
    for ((ask, bid), c) in q.ask.values().iter().zip(q.bid.values()).zip(crf.values()) {
        assert!(*ask >= c - slack && *c >= bid - slack);
    }
}

#[test]
fn bilateral_in_the_money_ordering() {
    let (b, s) = bilateral_parties();
    let p = call_spread_problem(0.01, b, s, coarse_grid());
    let crf = p.solve_crf().unwrap();
    let q = p.bid_ask(&settings()).unwrap();
    for spot in [14.0, 16.0, 18.0] {
        let (c, ask, bid) = (
            crf.at_node(0.0, spot).unwrap(),
            q.ask.at_node(0.0, spot).unwrap(),
            q.bid.at_node(0.0, spot).unwrap(),
        );
        assert!(c >= ask && ask >= bid, "s = {spot}: {c} {ask} {bid}");
    }
}

fn within_bound(p: &PricingProblem, surfaces: &[&Surface]) {
    let bound = p.sanity_bound();
    for s in surfaces {
        assert!(s.max_abs() <= bound);
    }
}

#[test]
fn surfaces_are_bounded() {
    let (b, s) = bilateral_parties();
    for p in [
        call_spread_problem(0.01, b, s, coarse_grid()),
        forward_problem(30.0, b, s),
        cds_problem(cir(), factor_grid(5.0)),
    ] {
        let crf = p.solve_crf().unwrap();
        let without = p.solve_without_provision(&crf, Side::Buyer).unwrap();
        let q = p.bid_ask(&settings()).unwrap();
        within_bound(&p, &[&crf, &without, &q.bid, &q.ask]);
    }
}

#[test]
fn affine_shapes() {
    let xs = [0.0, 0.02, 0.05, 0.08, 0.12, 0.2];
    for model in [cir(), ou()] {
        let bonds: Vec<f64> = xs
            .iter()
            .map(|&x| bond_price(&model, 0.0, x, 5.0, R).unwrap())
            .collect();
        assert!(bonds.iter().all(|&b| b > 0.0 && b <= 1.0));
        assert!(bonds.windows(2).all(|w| w[1] <= w[0]));
        let cds: Vec<f64> = xs
            .iter()
            .map(|&x| cds_upfront(&model, 0.0, x, 5.0, 0.01, R).unwrap())
            .collect();
        assert!(cds.windows(2).all(|w| w[1] >= w[0]), "{cds:?}");
        let k = bond_price(&model, 0.0, 0.08, 10.0, R).unwrap();
        let trs: Vec<f64> = [0.02, 0.05, 0.08, 0.12]
            .iter()
            .map(|&x| trs_upfront(&model, 0.0, x, 3.0, 10.0, 0.01, k, R).unwrap())
            .collect();
        assert!(trs.windows(2).all(|w| w[1] <= w[0]), "{trs:?}");
    }
}

#[test]
fn cds_upfront_changes_sign() {
    let m = cir();
    let lo = cds_upfront(&m, 0.0, 0.0, 5.0, 0.01, R).unwrap();
    let hi = cds_upfront(&m, 0.0, 0.2, 5.0, 0.01, R).unwrap();
    // protection is worth less than a 1% premium only for a nearly safe name
    let paying = cds_upfront(&m, 0.0, 0.0, 5.0, 0.05, R).unwrap();
    assert!(hi > 0.0 && paying < 0.0 && lo < hi);
    let free = cds_upfront(&m, 0.0, 0.05, 5.0, 0.0, R).unwrap();
    assert!(free > 0.0);
}

fn party_strategy() -> impl Strategy<Value = PartyParams> {
    (0.0..0.5f64, 0.0..1.0f64, 0.0..1.2f64, -0.05..0.05f64)
        .prop_map(|(l, loss, d, c)| PartyParams::new(l, loss, d, c).unwrap())
}

proptest! {
    #[test]
    fn source_is_lipschitz(b in party_strategy(), s in party_strategy(),
                           y1 in -10.0..10.0f64, y2 in -10.0..10.0f64, base in -1.0..1.0f64) {
        let x = alpha_beta(&b, &s);
        for side in [Side::Buyer, Side::Seller] {
            let d = (source_f(&x, base, y1, side) - source_f(&x, base, y2, side)).abs();
            prop_assert!(d <= x.lipschitz_bound * (y1 - y2).abs() + 1e-12);
        }
        prop_assert_eq!(source_f(&x, base, 0.0, Side::Buyer), base);
        prop_assert_eq!(source_f(&x, base, 0.0, Side::Seller), base);
    }

    #[test]
    fn symmetric_parties_give_equal_sources(
        d in 0.0..1.2f64, c in -0.05..0.05f64, l1 in 0.01..0.3f64,
        loss1 in 0.1..1.0f64, loss2 in 0.1..1.0f64, y in -5.0..5.0f64,
    ) {
        let l2 = loss1 * l1 / loss2;
        let b = PartyParams::new(l1, loss1, d, c).unwrap();
        let s = PartyParams::new(l2, loss2, d, c).unwrap();
        let x = alpha_beta(&b, &s);
        prop_assert!((x.alpha - x.beta).abs() < 1e-12);
        let gap = (source_f(&x, 0.1, y, Side::Buyer) - source_f(&x, 0.1, y, Side::Seller)).abs();
        prop_assert!(gap < 1e-11);
    }

    #[test]
    fn call_spread_payoff_is_bounded_and_monotone(
        eps in 0.001..3.0f64, m in 0.1..5.0f64, s1 in 0.0..30.0f64, s2 in 0.0..30.0f64,
    ) {
        let p = CallSpreadParams::symmetric(10.0, eps, m);
        let (a, b) = (p.payoff(s1.min(s2)), p.payoff(s1.max(s2)));
        prop_assert!(a <= b);
        prop_assert!((-m..=m).contains(&a) && (-m..=m).contains(&b));
    }
}
