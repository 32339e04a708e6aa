//! Acetylene P(9) line probed by a 33-tooth comb at Ω = 500 MHz.

use sqcomb::comb::CombConfig;
use sqcomb::hitran::LineList;
use sqcomb::inversion::{
    extract_quadratures, fit_trace, invert_trace, noise_floor, recover_estimate, sweep_grid,
    PhaseSweepTrace, SidebandOrder,
};
use sqcomb::lineshape::{sample_teeth, GasConditions, LineShape};
use sqcomb::montecarlo::{draw_powers, expected_trace, noisy_trace, MomentCheck};
use sqcomb::response::{
    classical_power, kappa, mean_power, snr_table, variance, LoPhase, Quadrature, ToothResponse,
};

const PAR: &str = include_str!("data/c2h2_p9.par");

struct Scenario {
    teeth: Vec<ToothResponse>,
    comb: CombConfig,
    line_centre: f64,
}

fn scenario(carrier_at_centre: bool) -> Scenario {
    let list = LineList::from_par_str(PAR).unwrap();
    let cond = GasConditions::default();
    let window = list.select_window(6533.0, 6536.0, 26).unwrap();
    let line = *window.nearest(6534.36).unwrap();
    let line_centre = LineShape::new(&line, &cond).unwrap().center;
    let mut comb = CombConfig::default();
    if carrier_at_centre {
        comb.carrier_nu = line_centre;
    }
    let teeth = sample_teeth(window.lines(), &cond, &comb).unwrap();
    Scenario {
        teeth,
        comb,
        line_centre,
    }
}

#[test]
fn weak_absorption_regime() {
    let s = scenario(false);
    assert_eq!(s.teeth.len(), 17);
    let min_eta = s
        .teeth
        .iter()
        .map(|t| t.eta_plus().min(t.eta_minus()))
        .fold(1.0, f64::min);
    assert!(min_eta > 0.998 && min_eta < 0.9995, "{min_eta}");
    let max_dphi = s
        .teeth
        .iter()
        .map(|t| t.delta_phi().abs())
        .fold(0.0, f64::max);
    assert!(max_dphi > 0.0 && max_dphi < 0.05, "{max_dphi}");
    let rows = snr_table(&s.teeth, &s.comb).unwrap();
    assert!(rows.iter().all(|r| !r.out_of_regime));
}

#[test]
fn quadratures_alternate_with_the_carrier_at_line_centre() {
    let s = scenario(true);
    let rows = snr_table(&s.teeth, &s.comb).unwrap();
    for row in &rows[1..=8] {
        let expected = if row.n % 2 == 0 {
            Quadrature::X
        } else {
            Quadrature::P
        };
        assert_eq!(row.quadrature, expected, "n = {}", row.n);
    }
    let grid = sweep_grid(32).unwrap();
    for tooth in &s.teeth[1..=8] {
        let trace = expected_trace(tooth, &s.comb, &grid).unwrap();
        let est = fit_trace(&trace)
            .unwrap()
            .quadratures(
                noise_floor(&s.comb, tooth.n, tooth.eta_plus() + tooth.eta_minus()).unwrap(),
            )
            .unwrap();
        if tooth.n % 2 == 0 {
            assert!(est.i_x > 1e3 * est.i_p, "n = {}: {est:?}", tooth.n);
        } else {
            assert!(est.i_p > 1e3 * est.i_x, "n = {}: {est:?}", tooth.n);
        }
    }
}

#[test]
fn dispersion_leaves_recovery_intact() {
    let s = scenario(false);
    let order = SidebandOrder::for_carrier(s.comb.carrier_nu, s.line_centre);
    for tooth in &s.teeth[1..] {
        let k = kappa(&s.comb, tooth.n).unwrap();
        let trace = PhaseSweepTrace::sample(tooth.n, 64, |a| {
            classical_power(tooth, k, LoPhase::new(a)?, tooth.delta_phi())
        })
        .unwrap();
        let r = recover_estimate(&extract_quadratures(&trace).unwrap(), k, tooth.n, order).unwrap();
        assert!(
            (r.sqrt_eta_plus - tooth.sqrt_eta_plus).abs() <= 1e-2,
            "n = {}",
            tooth.n
        );
        assert!(
            (r.sqrt_eta_minus - tooth.sqrt_eta_minus).abs() <= 1e-2,
            "n = {}",
            tooth.n
        );
    }
}

#[test]
fn sampled_moments_match_every_tooth() {
    let s = scenario(false);
    for tooth in &s.teeth {
        let batch = draw_powers(
            tooth,
            &s.comb,
            LoPhase::X,
            900 + u64::from(tooth.n),
            100_000,
        )
        .unwrap();
        let check = MomentCheck::from_batch(
            &batch,
            mean_power(tooth, &s.comb, LoPhase::X).unwrap(),
            variance(tooth, &s.comb).unwrap(),
        );
        assert!(check.passes(3.0), "n = {}: {check:?}", tooth.n);
    }
}

#[test]
fn noisy_sweeps_invert_for_two_seeds() {
    let s = scenario(false);
    let order = SidebandOrder::for_carrier(s.comb.carrier_nu, s.line_centre);
    let grid = sweep_grid(32).unwrap();
    for tooth in &s.teeth[1..=4] {
        let k = kappa(&s.comb, tooth.n).unwrap();
        let a = noisy_trace(tooth, &s.comb, &grid, 71, 100_000).unwrap();
        let b = noisy_trace(tooth, &s.comb, &grid, 72, 100_000).unwrap();
        assert_ne!(a, b);
        for trace in [a, b] {
            let r = invert_trace(&trace, &s.comb, k, order).unwrap();
            for (got, truth, se) in [
                (r.sqrt_eta_plus, tooth.sqrt_eta_plus, r.se_plus),
                (r.sqrt_eta_minus, tooth.sqrt_eta_minus, r.se_minus),
            ] {
                assert!(se > 0.0);
                assert!(
                    (got - truth).abs() <= 3.0 * se,
                    "n = {}: {got} vs {truth} ± {se}",
                    tooth.n
                );
            }
        }
    }
}
