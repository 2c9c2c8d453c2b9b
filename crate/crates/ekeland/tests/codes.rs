mod common;

use common::*;
use ekeland::codes::*;
use ekeland::rational::{frac, int, Ext};
use ekeland::space::{Ball, NetBounds, Space};
use proptest::prelude::*;

const BUDGET: usize = 10_000;

#[test]
fn continuous_fixtures_obey_the_laws() {
    for (name, code, bounds) in continuous_fixtures() {
        let rep = check_cont_laws(code.as_ref(), &bounds, BUDGET);
        assert!(rep.ok(), "{name}: {:?}", rep.violations);
        assert!(rep.items > 0, "{name} enumerated nothing");
    }
}

#[test]
fn lsc_fixtures_obey_the_laws() {
    for (name, code, bounds) in lsc_fixtures() {
        let rep = check_lsc_laws(code.as_ref(), &bounds, BUDGET);
        assert!(rep.ok(), "{name}: {:?}", rep.violations);
    }
}

#[test]
fn honest_fixtures_obey_the_laws() {
    for (name, code) in honest_fixtures() {
        let rep = check_honest_laws(code.as_ref(), &NetBounds::default(), BUDGET);
        assert!(rep.ok(), "{name}: {:?}", rep.violations);
    }
}

#[test]
fn inconsistent_items_are_reported() {
    struct Liar;
    impl ContinuousCode for Liar {
        fn domain(&self) -> &Space {
            &Space::UnitInterval
        }
        fn ball_items(&self, ball: &Ball) -> Vec<ekeland::rational::Bracket> {
            let v = if ball.radius > frac(1, 8) { int(0) } else { int(5) };
            vec![ekeland::rational::Bracket::exact(v)]
        }
    }
    let rep = check_cont_laws(&Liar, &NetBounds::default(), 500);
    assert!(!rep.ok());
}

#[test]
fn constant_lsc_is_exact() {
    let c = ConstantLsc { space: Space::UnitInterval, value: frac(1, 3) };
    assert_eq!(lsc_bracket(&c, &real(int(0)), 4).unwrap().lo, frac(1, 3));
    assert_eq!(c.ball_inf(&Ball::new(real(frac(1, 2)), frac(1, 4))).lo, Ext::Fin(frac(1, 3)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pl_brackets_contain_values(vals in prop::collection::vec(0i64..64, 2..8), x in 0i64..=256) {
        let n = vals.len() as i64 - 1;
        let knots: Vec<_> = vals.iter().enumerate().map(|(i, v)| (frac(i as i64, n), frac(*v, 16))).collect();
        let code = PiecewiseLinearCode::new(Space::UnitInterval, knots).unwrap();
        let t = frac(x, 256);
        let b = eval_cont(&code, &real(t.clone()), 12).unwrap();
        prop_assert!(b.contains(&code.eval(&t)));
        for s in 0..6 {
            for item in code.ball_items(&Ball::new(real(t.clone()), ekeland::rational::pow2(-s))) {
                prop_assert!(item.contains(&code.eval(&t)));
            }
        }
    }

    #[test]
    fn sup_dist_matches_knotwise_evaluation(a in prop::collection::vec(-32i64..32, 2..7), b in prop::collection::vec(-32i64..32, 2..9)) {
        let mk = |v: &Vec<i64>| {
            let n = v.len() as i64 - 1;
            ekeland::pl::PlFunction::new(v.iter().enumerate().map(|(i, y)| (frac(i as i64, n), frac(*y, 8))).collect()).unwrap()
        };
        let (f, g) = (mk(&a), mk(&b));
        let naive = f.breakpoints().iter().chain(g.breakpoints()).map(|(t, _)| ekeland::rational::abs(&(f.eval(t) - g.eval(t)))).max().unwrap();
        prop_assert_eq!(f.sup_dist(&g), naive.clone());
        prop_assert_eq!(g.sup_dist(&f), naive);
    }

    #[test]
    fn lsc_lower_never_exceeds_upper(x in 0i64..=128) {
        let t = real(frac(x, 128));
        for (name, code, _) in lsc_fixtures().into_iter().filter(|(_, c, _)| c.space() == &Space::UnitInterval) {
            if let Some(u) = code.upper(&t) {
                prop_assert!(code.lower(&t, 24) <= Ext::Fin(u), "{}", name);
            }
        }
    }
}
