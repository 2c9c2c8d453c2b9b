use std::sync::Arc;

use ekeland::codes::{ConstantCode, ContRef, HonestRef, PiecewiseLinearCode, PiecewiseLsc};
use ekeland::critical::*;
use ekeland::gadgets::{aca_sup_gadget, Tree, WklGadget};
use ekeland::rational::{abs, frac, int, pow2, Ext, Q};
use ekeland::space::{NetBounds, Point, Space};

fn real(q: Q) -> Point {
    Point::real(q)
}

fn pl(knots: &[(Q, Q)]) -> ContRef {
    Arc::new(PiecewiseLinearCode::new(Space::UnitInterval, knots.to_vec()).unwrap())
}

fn identity() -> Potential {
    Potential::Continuous(pl(&[(int(0), int(0)), (int(1), int(1))]))
}

fn tent() -> Potential {
    Potential::Continuous(pl(&[(int(0), frac(1, 3)), (frac(1, 3), int(0)), (int(1), frac(2, 3))]))
}

fn sup_c() -> Vec<Q> {
    (0..16).map(|n| frac(1, 2) - pow2(-n - 1)).collect()
}

fn aca_sup() -> Potential {
    Potential::Lsc(Arc::new(aca_sup_gadget(sup_c()).unwrap()))
}

fn params(eps: Q, k: u32) -> SearchParams {
    SearchParams::new(eps, k)
}

fn unit_net(k: u32) -> Vec<Point> {
    Space::UnitInterval.net(k, None, &NetBounds::default()).unwrap()
}

#[test]
fn identity_is_critical_at_zero_only() {
    let f = identity();
    let p = params(frac(1, 2), 8);
    let c = is_critical(&f, &real(int(0)), &p, &unit_net(8)).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
    assert!(c.recheck());
    let c = is_critical(&f, &real(int(1)), &p, &unit_net(8)).unwrap();
    assert_eq!(c.verdict, Verdict::Fail);
    assert_eq!(c.witness, Some(real(int(0))));
    assert!(c.recheck());
}

#[test]
fn sup_gadget_is_critical_at_its_sup() {
    let c = is_critical(&aca_sup(), &real(frac(1, 2)), &params(int(1), 8), &unit_net(8)).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
}

#[test]
fn unsupported_point_is_rejected() {
    let f = Potential::Lsc(Arc::new(
        PiecewiseLsc::new(Space::UnitInterval, vec![int(0), frac(1, 2), int(1)], vec![Ext::Fin(int(0)), Ext::Inf, Ext::Inf], vec![None, None])
            .unwrap(),
    ));
    let err = is_critical(&f, &real(int(1)), &params(int(1), 4), &unit_net(4)).unwrap_err();
    assert!(matches!(err, EkelandError::UnsupportedPoint(_)));
}

#[test]
fn tampered_certificate_fails_recheck() {
    let mut c = is_critical(&identity(), &real(int(1)), &params(frac(1, 2), 6), &unit_net(6)).unwrap();
    c.verdict = Verdict::Pass;
    assert!(!c.recheck());
    let json = c.to_json();
    let back: Certificate = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c);
}

#[test]
fn free_search_on_identity() {
    let out = fvp_search(&identity(), &params(frac(1, 2), 8), &NetSpec::default()).unwrap();
    assert!(out.x_star.as_real().unwrap() <= &pow2(-8));
    assert_eq!(out.certificate.verdict, Verdict::Pass);
    assert!(out.state.check_q_schedule());
    assert!(out.state.check_telescoping(&Space::UnitInterval, &frac(1, 2)));
}

#[test]
fn free_search_on_tent() {
    let out = fvp_search(&tent(), &params(frac(1, 2), 8), &NetSpec::default()).unwrap();
    let x = out.x_star.as_real().unwrap().clone();
    assert!(abs(&(x - frac(1, 3))) <= pow2(-8));
    assert!(out.certificate.passed());
    assert!(out.state.check_telescoping(&Space::UnitInterval, &frac(1, 2)));
}

#[test]
fn seeded_order_still_certifies() {
    let mut p = params(frac(1, 2), 7);
    p.seed_order = Some(7);
    let out = fvp_search(&tent(), &p, &NetSpec::default()).unwrap();
    assert!(out.certificate.passed());
    let again = fvp_search(&tent(), &p, &NetSpec::default()).unwrap();
    assert_eq!(out.state, again.state);
}

#[test]
fn empty_support_is_rejected() {
    let f = Potential::Lsc(Arc::new(
        PiecewiseLsc::new(Space::UnitInterval, vec![int(0), int(1)], vec![Ext::Inf, Ext::Inf], vec![None]).unwrap(),
    ));
    assert_eq!(fvp_search(&f, &params(int(1), 4), &NetSpec::default()).unwrap_err(), EkelandError::EmptySupport);
}

#[test]
fn compact_minimum_of_parabola() {
    let knots: Vec<(Q, Q)> = (0..=16).map(|i| {
        let x = frac(i, 16);
        let y = &x * (int(1) - &x);
        (x, y)
    }).collect();
    let f = pl(&knots);
    let (x, b) = fvp_min_compact(&f, &params(int(1), 8), &NetBounds::default()).unwrap();
    assert!(x == real(int(0)) || x == real(int(1)));
    assert!(b.contains(&int(0)));
    for eps in [int(2), int(1), frac(1, 2), frac(1, 4)] {
        let c = is_critical(&Potential::Continuous(f.clone()), &x, &params(eps, 8), &unit_net(8)).unwrap();
        assert!(c.passed());
    }
}

#[test]
fn compact_minimum_of_constant() {
    let f: ContRef = Arc::new(ConstantCode { space: Space::UnitInterval, value: frac(3, 7) });
    let (_, b) = fvp_min_compact(&f, &params(int(1), 4), &NetBounds::default()).unwrap();
    assert_eq!((b.lo, b.hi), (frac(3, 7), frac(3, 7)));
}

#[test]
fn compact_minimum_of_tree_gadget() {
    let tree = Tree::binary(&["0", "1", "00", "01", "10", "010", "011", "0110"], 6).unwrap();
    let g = WklGadget::new(tree).unwrap();
    let brute = g.leaves().iter().map(|l| l.value.clone()).min().unwrap();
    let f: ContRef = Arc::new(g.cantor_code());
    let (_, b) = fvp_min_compact(&f, &params(int(1), 14), &NetBounds::default()).unwrap();
    assert_eq!(b.hi, brute);
    assert_eq!(brute, g.best_leaf().value);
}

#[test]
fn noncompact_minimum_is_unsupported() {
    let f: ContRef = Arc::new(ConstantCode { space: Space::Baire, value: int(1) });
    assert!(matches!(fvp_min_compact(&f, &params(int(1), 4), &NetBounds::baire(2, 4)), Err(EkelandError::Unsupported(_))));
}

#[test]
fn localized_search_on_identity() {
    let out = lvp_search(&identity(), &real(int(1)), &params(frac(1, 2), 7), &NetSpec::default()).unwrap();
    assert!(out.x_star.as_real().unwrap() <= &pow2(-6));
    assert!(out.certificate.passed());
    let loc = out.certificate.localization.clone().unwrap();
    assert!(loc.holds);
}

#[test]
fn localized_search_from_minimizer() {
    let out = lvp_search(&identity(), &real(int(0)), &params(frac(1, 2), 7), &NetSpec::default()).unwrap();
    assert_eq!(out.x_star, real(int(0)));
    assert!(out.certificate.passed());
}

#[test]
fn localized_search_on_sup_gadget() {
    let out = lvp_search(&aca_sup(), &real(int(0)), &params(int(1), 7), &NetSpec::default()).unwrap();
    let x = out.x_star.as_real().unwrap().clone();
    assert!(abs(&(x - frac(1, 2))) <= pow2(-6));
    assert!(out.certificate.passed());
}

#[test]
fn bound_reduce_caps_values() {
    let f = bound_reduce(&identity(), &real(frac(1, 2)), 32).unwrap();
    for y in unit_net(6) {
        let e = f.eval(&y, 32).unwrap();
        let x = y.as_real().unwrap();
        let want = if x < &frac(1, 2) { x.clone() } else { frac(1, 2) };
        assert_eq!(e.hi, Some(want.clone()));
        assert_eq!(e.lo, Ext::Fin(want));
    }
}

#[test]
fn scale_reduce_matches_criticality() {
    let eps = frac(1, 2);
    let f = identity();
    let g = scale_reduce(&f, &eps).unwrap();
    assert_eq!(g.eval(&real(frac(1, 4)), 16).unwrap().hi, Some(frac(1, 2)));
    let net = unit_net(6);
    let mut p = params(eps.clone(), 6);
    p.slack = Some(int(0));
    let mut p1 = params(int(1), 6);
    p1.slack = Some(int(0));
    for x in &net {
        let a = is_critical(&f, x, &p, &net).unwrap().verdict;
        let b = is_critical(&g, x, &p1, &net).unwrap().verdict;
        assert_eq!(a, b, "at {x}");
    }
    assert!(scale_reduce(&f, &int(0)).is_err());
}

#[test]
fn verify_round_trip() {
    let f = tent();
    let c = is_critical(&f, &real(frac(85, 256)), &params(frac(1, 2), 8), &unit_net(9)).unwrap();
    let v = verify(&c, &f).unwrap();
    assert_eq!(v.verdict, c.verdict);
    let other = identity();
    let v = verify(&c, &other).unwrap();
    assert_eq!(v.verdict, Verdict::Fail);
}

#[test]
fn honest_potential_search() {
    let f: HonestRef = Arc::new(aca_sup_gadget(sup_c()).unwrap());
    let out = fvp_search(&Potential::Lsc(f), &params(int(1), 8), &NetSpec::default()).unwrap();
    assert_eq!(out.x_star, real(frac(1, 2)));
    assert!(out.certificate.passed());
}
