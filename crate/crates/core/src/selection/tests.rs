use super::*;
use crate::test_support::{sat, scene, user};
use approx::assert_relative_eq;

const PW: f64 = -4.4;

#[test]
fn single_primary_is_chosen() {
    let sc = scene(&[(9, 50.0, 10.0, 550.0, PW)], &[(1, 60.0, 200.0, 610.0, PW)]);
    assert_eq!(select_primary(&sc), Ok(0));
    assert_eq!(select_secondary(&sc, 0, Strategy::GreedyMaxSnr, ProtectionThreshold::Unconstrained), Ok(0));
}

#[test]
fn higher_elevation_wins_primary() {
    let sc = scene(&[(0, 40.0, 0.0, 550.0, PW), (1, 80.0, 90.0, 550.0, PW)], &[]);
    assert_eq!(select_primary(&sc).map(|p| sc.primary_id(p)), Ok(1));
}

#[test]
fn empty_sets_are_outages() {
    let sc = scene(&[], &[(1, 60.0, 0.0, 610.0, PW)]);
    assert_eq!(select_primary(&sc), Err(Outage::NoPrimaryVisible));
    assert_eq!(absolute_inr_bounds(&sc), Err(Outage::NoPrimaryVisible));
    let sc = scene(&[(0, 60.0, 0.0, 550.0, PW)], &[]);
    assert_eq!(absolute_inr_bounds(&sc), Err(Outage::NoSecondaryVisible));
    assert_eq!(conditional_inr_bounds(&sc, 0), Err(Outage::NoSecondaryVisible));
    assert_eq!(
        select_secondary(&sc, 0, Strategy::ProtectiveMaxSinr, ProtectionThreshold::Db(-12.2)),
        Err(Outage::NoSecondaryVisible)
    );
    let out = evaluate(&sc, Strategy::GreedyMaxSnr, ProtectionThreshold::Db(0.0), 3.0);
    assert_eq!(out.outage, Some(Outage::NoSecondaryVisible));
    assert_eq!(out.primary_choice, Some(0));
}

#[test]
fn singleton_bounds_coincide() {
    let sc = scene(&[(0, 70.0, 0.0, 550.0, PW)], &[(1, 50.0, 30.0, 610.0, PW)]);
    let abs = absolute_inr_bounds(&sc).unwrap();
    assert_eq!(abs.max, abs.min);
    let cond = conditional_inr_bounds(&sc, 0).unwrap();
    assert_eq!(cond.max, cond.min);
    assert_eq!(cond.max, sc.inr_primary(0, 0));
}

#[test]
fn ties_break_to_lowest_id() {
    // identical geometry and power: exactly tied SNR
    let sc = scene(
        &[(7, 70.0, 10.0, 550.0, PW), (3, 70.0, 10.0, 550.0, PW)],
        &[(12, 60.0, 200.0, 610.0, PW), (4, 60.0, 200.0, 610.0, PW)],
    );
    assert_eq!(sc.snr_primary(0), sc.snr_primary(1));
    assert_eq!(sc.primary_id(select_primary(&sc).unwrap()), 3);
    for strategy in Strategy::ALL {
        let s = select_secondary(&sc, 1, strategy, ProtectionThreshold::Unconstrained).unwrap();
        assert_eq!(sc.secondary_id(s), 4, "{strategy}");
    }
}

#[test]
fn thresholds_bracket_feasibility() {
    let sc = scene(
        &[(0, 80.0, 0.0, 550.0, PW)],
        &[(1, 78.0, 10.0, 610.0, PW), (2, 45.0, 180.0, 610.0, PW), (3, 60.0, 90.0, 590.0, PW)],
    );
    assert_eq!(feasible_set(&sc, 0, ProtectionThreshold::Unconstrained).len(), 3);
    let cond = conditional_inr_bounds(&sc, 0).unwrap();
    assert!(feasible_set(&sc, 0, ProtectionThreshold::Db(cond.min_db() - 1.0)).is_empty());
    let out = evaluate(&sc, Strategy::ProtectiveMaxSnr, ProtectionThreshold::Db(cond.min_db() - 1.0), 3.0);
    assert_eq!(out.outage, Some(Outage::NoneFeasible));
    assert_eq!(out.feasible_count, 0);
}

#[test]
fn nearly_collinear_secondary_interferes_strongly() {
    // secondary almost behind the primary from the user's view
    let sc = scene(&[(0, 80.0, 0.0, 550.0, PW)], &[(1, 80.0, 0.3, 610.0, PW), (2, 45.0, 180.0, 610.0, PW)]);
    let strong = to_db(sc.inr_primary(0, 0));
    let weak = to_db(sc.inr_primary(0, 1));
    assert!(strong > 0.0, "{strong}");
    assert!(weak < -20.0, "{weak}");
    // protective selection refuses the collinear one even though it is the
    // best by SNR
    let s = select_secondary(&sc, 0, Strategy::ProtectiveMaxSnr, ProtectionThreshold::Db(-12.2)).unwrap();
    assert_eq!(sc.secondary_id(s), 2);
    assert_eq!(select_secondary(&sc, 0, Strategy::GreedyMaxSnr, ProtectionThreshold::Db(-12.2)), Ok(0));
}

#[test]
fn unconstrained_protective_equals_greedy() {
    let sc = scene(
        &[(0, 75.0, 0.0, 550.0, PW), (1, 50.0, 120.0, 540.0, PW)],
        &[(1, 70.0, 5.0, 610.0, PW), (2, 55.0, 180.0, 630.0, PW), (3, 65.0, 270.0, 590.0, PW)],
    );
    let p = select_primary(&sc).unwrap();
    let th = ProtectionThreshold::Unconstrained;
    assert_eq!(
        select_secondary(&sc, p, Strategy::ProtectiveMaxSinr, th),
        select_secondary(&sc, p, Strategy::GreedyMaxSinr, th)
    );
    assert_eq!(
        select_secondary(&sc, p, Strategy::ProtectiveMaxSnr, th),
        select_secondary(&sc, p, Strategy::GreedyMaxSnr, th)
    );
}

#[test]
fn useful_count_limits() {
    let sc = scene(
        &[(0, 75.0, 0.0, 550.0, PW)],
        &[(1, 85.0, 5.0, 610.0, PW), (2, 40.0, 180.0, 630.0, PW), (3, 36.0, 270.0, 590.0, PW)],
    );
    let th = ProtectionThreshold::Db(-12.2);
    let n = feasible_set(&sc, 0, th).len();
    assert_eq!(useful_count(&sc, 0, th, f64::INFINITY), n);
    assert!(useful_count(&sc, 0, ProtectionThreshold::Unconstrained, 0.0) <= 1);
}

#[test]
fn separation_cases() {
    let u = user(8);
    let a = *sat(u.pos(), (0, 60.0, 10.0, 550.0, PW)).pos();
    let b = *sat(u.pos(), (1, 45.0, 100.0, 550.0, PW)).pos();
    assert_eq!(angular_separation(u.pos(), &a, &a).unwrap(), 0.0);
    let anti = u.pos() - (a - u.pos());
    assert_relative_eq!(angular_separation(u.pos(), &a, &anti).unwrap(), 180.0, epsilon = 1e-9);
    // law of cosines on the triangle user-a-b
    let (da, db, dab) = ((a - u.pos()).norm(), (b - u.pos()).norm(), (a - b).norm());
    let oracle = ((da * da + db * db - dab * dab) / (2.0 * da * db)).acos().to_degrees();
    assert_relative_eq!(angular_separation(u.pos(), &a, &b).unwrap(), oracle, epsilon = 1e-9);
    assert!(angular_separation(u.pos(), u.pos(), &b).is_err());
}

#[test]
fn evaluate_fills_protective_record() {
    let sc = scene(
        &[(0, 80.0, 0.0, 550.0, PW), (1, 45.0, 200.0, 560.0, PW)],
        &[(5, 79.0, 3.0, 610.0, PW), (6, 55.0, 150.0, 630.0, PW), (8, 62.0, 300.0, 590.0, PW)],
    );
    let out = evaluate(&sc, Strategy::ProtectiveMaxSinr, ProtectionThreshold::Db(-12.2), 3.0);
    assert!(out.outage.is_none());
    assert!(out.inr_primary_db.unwrap() <= -12.2);
    assert!(out.sinr_secondary_db.unwrap() <= out.snr_secondary_db.unwrap());
    assert!(out.useful_count <= out.feasible_count);
    assert!(out.separation_deg.unwrap() > 0.0);
    assert!(out.secondary_elevation_deg.unwrap() >= 35.0);
}

#[test]
fn strategy_names_round_trip() {
    for s in Strategy::ALL {
        assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
    }
    assert!("max_throughput".parse::<Strategy>().is_err());
}
