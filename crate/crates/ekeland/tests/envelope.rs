use std::sync::Arc;

use ekeland::codes::{ConstantCode, ConstantLsc, ContRef, DistanceKernel, HonestRef, Modulus, PiecewiseLinearCode, PiecewiseLsc};
use ekeland::critical::{fvp_search, EkelandError, NetSpec, Potential, SearchParams};
use ekeland::envelope::*;
use ekeland::gadgets::AcaSup;
use ekeland::rational::{abs, frac, int, min_q, pow2, Bracket, Ext, Q};
use ekeland::space::{NetBounds, Point, Space};
use proptest::prelude::*;

fn real(q: Q) -> Point {
    Point::real(q)
}

fn step() -> PiecewiseLsc {
    PiecewiseLsc::new(
        Space::UnitInterval,
        vec![int(0), frac(1, 2), int(1)],
        vec![Ext::Fin(int(1)), Ext::Fin(int(0)), Ext::Fin(int(0))],
        vec![Some((int(1), int(1))), Some((int(0), int(0)))],
    )
    .unwrap()
}

fn sup_gadget() -> AcaSup {
    AcaSup::new((0..16).map(|n| frac(1, 2) - pow2(-n - 1)).collect()).unwrap()
}

fn query(f: HonestRef, alpha: Q, x: Q, k: u32) -> Bracket {
    envelope_value(&EnvelopeQuery { f, alpha, x: real(x), resolution: k, region: None, bounds: NetBounds::default() }).unwrap()
}

/// `min_y f(y) + α|x - y|` over the `2^-k` grid.
fn grid_envelope(f: impl Fn(&Q) -> Ext, alpha: &Q, x: &Q, k: u32) -> Q {
    let n = 1i64 << k;
    (0..=n)
        .filter_map(|i| {
            let y = frac(i, n);
            f(&y).fin().map(|v| v + alpha * abs(&(x - &y)))
        })
        .min()
        .unwrap()
}

#[test]
fn constant_envelope_is_exact() {
    let f: HonestRef = Arc::new(ConstantLsc { space: Space::UnitInterval, value: frac(2, 3) });
    for x in [int(0), frac(1, 3), int(1)] {
        let b = query(f.clone(), int(5), x, 6);
        assert_eq!((b.lo, b.hi), (frac(2, 3), frac(2, 3)));
    }
}

#[test]
fn step_envelope_at_zero() {
    let code = step();
    let oracle = grid_envelope(|y| code.value(y), &int(1), &int(0), 10);
    assert_eq!(oracle, frac(1, 2));
    let b = query(Arc::new(step()), int(1), int(0), 8);
    assert!(b.contains(&frac(1, 2)));
    assert!(b.width() <= pow2(-8) * int(2));
}

#[test]
fn sup_gadget_envelope_at_zero() {
    let g = sup_gadget();
    let oracle = grid_envelope(|y| Ext::Fin(g.value(y)), &int(1), &int(0), 10);
    let b = query(Arc::new(g.code()), int(1), int(0), 8);
    assert!(b.lo <= oracle && oracle - &b.hi <= pow2(-10));
    assert!(abs(&(b.mid() - int(1))) <= pow2(-7));
}

#[test]
fn empty_support_has_no_envelope() {
    let f: HonestRef = Arc::new(
        PiecewiseLsc::new(Space::UnitInterval, vec![int(0), int(1)], vec![Ext::Inf, Ext::Inf], vec![None]).unwrap(),
    );
    let q = EnvelopeQuery { f, alpha: int(1), x: real(int(0)), resolution: 4, region: None, bounds: NetBounds::default() };
    assert_eq!(envelope_value(&q).unwrap_err(), EkelandError::EmptySupport);
}

#[test]
fn nonpositive_alpha_is_rejected() {
    let f: HonestRef = Arc::new(step());
    let q = EnvelopeQuery { f, alpha: int(0), x: real(int(0)), resolution: 4, region: None, bounds: NetBounds::default() };
    assert!(matches!(envelope_value(&q), Err(EkelandError::Parameter(_))));
}

#[test]
fn cantor_envelope_with_region() {
    let f: HonestRef = Arc::new(ConstantLsc { space: Space::Cantor, value: int(1) });
    let region = ekeland::space::Ball::new(Point::seq(vec![1]), frac(3, 4));
    let q = EnvelopeQuery { f, alpha: int(1), x: Point::seq(vec![0]), resolution: 5, region: Some(region), bounds: NetBounds::default() };
    let b = envelope_value(&q).unwrap();
    assert!(b.contains(&int(1)));
}

#[test]
fn distance_kernel_matches_envelope() {
    let k = 6;
    let h: ContRef = Arc::new(DistanceKernel::new(Space::UnitInterval, int(1)).unwrap());
    let f: HonestRef = Arc::new(step());
    for x in [int(0), frac(1, 4), frac(3, 4)] {
        let a = inf_conv(&h, &f, &real(x.clone()), k, &NetBounds::default()).unwrap();
        let b = query(f.clone(), int(1), x, k);
        assert!(abs(&(&a.lo - &b.lo)) <= pow2(1 - k as i64));
        assert!(abs(&(&a.hi - &b.hi)) <= pow2(1 - k as i64));
    }
}

#[test]
fn zero_kernel_gives_minimum() {
    let space = Space::product(vec![Space::UnitInterval, Space::UnitInterval]).unwrap();
    let h: ContRef = Arc::new(ConstantCode { space, value: int(0) });
    let g = sup_gadget();
    let oracle = (0..=1024).map(|i| g.value(&frac(i, 1024))).min().unwrap();
    let b = inf_conv(&h, &(Arc::new(g.code()) as HonestRef), &real(int(0)), 8, &NetBounds::default()).unwrap();
    assert!(b.lo <= oracle && b.hi >= frac(1, 2) - pow2(-15));
    assert!(b.width() <= pow2(-7));
}

#[test]
fn single_support_point_gives_distance() {
    let h: ContRef = Arc::new(DistanceKernel::new(Space::UnitInterval, int(1)).unwrap());
    let f: HonestRef = Arc::new(
        PiecewiseLsc::new(Space::UnitInterval, vec![int(0), int(1)], vec![Ext::Fin(int(0)), Ext::Inf], vec![None]).unwrap(),
    );
    for i in 0..=8 {
        let x = frac(i, 8);
        let b = inf_conv(&h, &f, &real(x.clone()), 7, &NetBounds::default()).unwrap();
        assert!(b.contains(&x), "{b} at {x}");
        assert!(b.width() <= pow2(-6));
    }
}

#[test]
fn modulus_is_inherited() {
    let lip = |a: Q| envelope_modulus(&Modulus::lipschitz(&a));
    assert_eq!(lip(int(1)).at(5), 5);
    assert_eq!(lip(int(2)).at(5), 6);
    assert_eq!(lip(frac(1, 2)).at(5), 4);
    assert_eq!(lip(frac(1, 2)).at(0), 0);
}

fn params(eps: Q, k: u32) -> SearchParams {
    SearchParams::new(eps, k)
}

fn unit_net(k: u32) -> Vec<Point> {
    Space::UnitInterval.net(k, None, &NetBounds::default()).unwrap()
}

#[test]
fn transfer_for_tent() {
    let tent: ContRef = Arc::new(
        PiecewiseLinearCode::new(Space::UnitInterval, vec![(int(0), frac(1, 3)), (frac(1, 3), int(0)), (int(1), frac(2, 3))])
            .unwrap(),
    );
    let f: HonestRef = Arc::new(ekeland::codes::honest_promote_compact(Arc::new(ekeland::codes::cont_to_lsc(tent)), 12).unwrap());
    let x = real(frac(1, 3));
    let r = transfer_critical(&f, &frac(1, 2), &int(2), &x, &unit_net(8), &pow2(-6), &params(frac(1, 2), 8), &NetBounds::default()).unwrap();
    assert!(r.values_agree, "{:?}", r.envelope);
    assert!(r.passed);
}

#[test]
fn transfer_for_sup_gadget() {
    let f: HonestRef = Arc::new(sup_gadget().code());
    let x = real(frac(1, 2));
    let r = transfer_critical(&f, &int(1), &int(2), &x, &unit_net(8), &pow2(-6), &params(int(1), 8), &NetBounds::default()).unwrap();
    assert!(r.passed);
}

#[test]
fn transfer_needs_larger_beta() {
    let f: HonestRef = Arc::new(step());
    let r = transfer_critical(&f, &int(1), &int(1), &real(int(1)), &unit_net(4), &int(0), &params(int(1), 4), &NetBounds::default());
    assert!(matches!(r, Err(EkelandError::Parameter(_))));
}

#[test]
fn search_on_envelope_then_transfer() {
    let f: HonestRef = Arc::new(sup_gadget().code());
    let table = EnvelopeTable::new(f.clone(), int(2), 7, None, &NetBounds::default()).unwrap();
    let env = Potential::Continuous(Arc::new(EnvelopeCode::new(table)));
    let out = fvp_search(&env, &params(int(1), 7), &NetSpec::default()).unwrap();
    assert!(out.certificate.passed());
    let x = out.x_star.as_real().unwrap().clone();
    assert!(abs(&(&x - frac(1, 2))) <= pow2(-6), "{x}");
    let r = transfer_critical(&f, &int(1), &int(2), &out.x_star, &unit_net(8), &pow2(-5), &params(int(1), 8), &NetBounds::default()).unwrap();
    assert!(r.passed, "{} {} {:?} {:?}", x, r.f_upper, r.envelope, r.critical.witness);
}

fn random_lsc() -> impl Strategy<Value = PiecewiseLsc> {
    prop::collection::vec(0i64..16, 5).prop_map(|vs| {
        let knots: Vec<Q> = (0..5).map(|i| frac(i, 4)).collect();
        let cells: Vec<Option<(Q, Q)>> = vs.windows(2).map(|w| Some((frac(w[0], 8), frac(w[1], 8)))).collect();
        let knot_values = (0..5)
            .map(|i| {
                let mut v = frac(vs[i], 8);
                if i > 0 {
                    v = min_q(&v, &cells[i - 1].as_ref().unwrap().1);
                }
                Ext::Fin(v)
            })
            .collect();
        PiecewiseLsc::new(Space::UnitInterval, knots, knot_values, cells).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn envelope_invariants(code in random_lsc(), a in 1i64..8) {
        let k = 5;
        let slack = pow2(-(k as i64)) * int(4) * int(8);
        let f: HonestRef = Arc::new(code.clone());
        let alpha = frac(a, 2);
        let t1 = EnvelopeTable::new(f.clone(), alpha.clone(), k, None, &NetBounds::default()).unwrap();
        let t2 = EnvelopeTable::new(f.clone(), &alpha + int(1), k, None, &NetBounds::default()).unwrap();
        let pts: Vec<Q> = (0..=8).map(|i| frac(i, 8)).collect();
        let vals: Vec<Bracket> = pts.iter().map(|x| t1.value(&real(x.clone())).unwrap()).collect();
        for (x, b) in pts.iter().zip(&vals) {
            prop_assert!(b.lo <= b.hi);
            prop_assert!(b.width() <= &alpha * pow2(-(k as i64)) * int(2) + pow2(-(k as i64)));
            let b2 = t2.value(&real(x.clone())).unwrap();
            prop_assert!(b.hi <= &b2.hi + &slack);
            if let Some(v) = code.value(x).fin() {
                prop_assert!(&b.hi <= v);
            }
        }
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let d = abs(&(&pts[i] - &pts[j]));
                let lhs = abs(&(vals[i].mid() - vals[j].mid()));
                prop_assert!(lhs <= &alpha * d + vals[i].width() + vals[j].width());
            }
        }
    }
}
