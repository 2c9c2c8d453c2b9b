#![allow(dead_code)]

use std::sync::Arc;

use ekeland::codes::*;
use ekeland::gadgets::*;
use ekeland::rational::{frac, int, pow2, Ext, Q};
use ekeland::space::{NetBounds, Point, Space};

pub fn real(q: Q) -> Point {
    Point::real(q)
}

pub fn unit_net(k: u32) -> Vec<Point> {
    Space::UnitInterval.net(k, None, &NetBounds::default()).unwrap()
}

pub fn pl(knots: &[(Q, Q)]) -> ContRef {
    Arc::new(PiecewiseLinearCode::new(Space::UnitInterval, knots.to_vec()).unwrap())
}

pub fn identity() -> ContRef {
    pl(&[(int(0), int(0)), (int(1), int(1))])
}

pub fn tent() -> ContRef {
    pl(&[(int(0), frac(1, 3)), (frac(1, 3), int(0)), (int(1), frac(2, 3))])
}

pub fn parabola() -> ContRef {
    let knots: Vec<(Q, Q)> = (0..=16)
        .map(|i| {
            let x = frac(i, 16);
            let y = &x * (int(1) - &x);
            (x, y)
        })
        .collect();
    pl(&knots)
}

fn plsc(knots: &[Q], values: Vec<Ext>, cells: Vec<Option<(Q, Q)>>) -> PiecewiseLsc {
    PiecewiseLsc::new(Space::UnitInterval, knots.to_vec(), values, cells).unwrap()
}

/// 1 on `[0, 1/2)`, 0 on `[1/2, 1]`.
pub fn step() -> PiecewiseLsc {
    plsc(
        &[int(0), frac(1, 2), int(1)],
        vec![Ext::Fin(int(1)), Ext::Fin(int(0)), Ext::Fin(int(0))],
        vec![Some((int(1), int(1))), Some((int(0), int(0)))],
    )
}

pub fn tent_lsc() -> PiecewiseLsc {
    plsc(
        &[int(0), frac(1, 3), int(1)],
        vec![Ext::Fin(frac(1, 3)), Ext::Fin(int(0)), Ext::Fin(frac(2, 3))],
        vec![Some((frac(1, 3), int(0))), Some((int(0), frac(2, 3)))],
    )
}

/// `+inf` on `[0, 1/4)`, then a valley with floor 1/8 at 3/4.
pub fn walled_valley() -> PiecewiseLsc {
    plsc(
        &[int(0), frac(1, 4), frac(3, 4), int(1)],
        vec![Ext::Inf, Ext::Fin(frac(1, 2)), Ext::Fin(frac(1, 8)), Ext::Fin(frac(1, 2))],
        vec![None, Some((frac(1, 2), frac(1, 8))), Some((frac(1, 8), frac(1, 2)))],
    )
}

/// Drops from 1/2 to 1/5 at the non-dyadic point 3/5.
pub fn jump_down() -> PiecewiseLsc {
    plsc(
        &[int(0), frac(3, 5), int(1)],
        vec![Ext::Fin(int(1)), Ext::Fin(frac(1, 5)), Ext::Fin(frac(3, 5))],
        vec![Some((int(1), frac(1, 2))), Some((frac(1, 5), frac(3, 5)))],
    )
}

pub fn sup_c() -> Vec<Q> {
    (0..16).map(|n| frac(1, 2) - pow2(-n - 1)).collect()
}

pub fn sup_gadget() -> AcaSup {
    AcaSup::new(sup_c()).unwrap()
}

pub fn sup_gadget_three_quarters() -> AcaSup {
    AcaSup::new((0..12).map(|n| frac(3, 4) - pow2(-n - 2)).collect()).unwrap()
}

/// Honest potentials on `[0, 1]` with their minimizers' neighbourhood.
pub fn honest_fixtures() -> Vec<(&'static str, HonestRef)> {
    vec![
        ("step", Arc::new(step())),
        ("tent", Arc::new(tent_lsc())),
        ("walled-valley", Arc::new(walled_valley())),
        ("jump-down", Arc::new(jump_down())),
        ("sup-1/2", Arc::new(sup_gadget().code())),
        ("sup-3/4", Arc::new(sup_gadget_three_quarters().code())),
    ]
}

/// A comb: the spine's prefixes and one sibling hanging off each.
pub fn comb(spine: &str) -> Tree {
    let mut nodes = vec![];
    for j in 0..=spine.len() {
        nodes.push(spine[..j].to_string());
        if j < spine.len() {
            let flip = if &spine[j..j + 1] == "0" { "1" } else { "0" };
            nodes.push(format!("{}{}", &spine[..j], flip));
        }
    }
    let refs: Vec<&str> = nodes.iter().map(|s| s.as_str()).collect();
    Tree::binary(&refs, spine.len() + 1).unwrap()
}

/// Depth-8 trees without deep paths whose best leaves sit below the `2^-10` net.
pub fn wkl_trees() -> Vec<Tree> {
    ["1111111", "0101011", "1001111", "0000011", "1100111"].iter().map(|s| comb(s)).collect()
}

/// Two trees with depth-8 paths and two without.
pub fn pi11_trees() -> Vec<Tree> {
    let with_path = |p: &str, extra: &[&str]| {
        let mut nodes: Vec<String> = (0..=p.len()).map(|j| p[..j].to_string()).collect();
        nodes.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = nodes.iter().map(|s| s.as_str()).collect();
        Tree::binary(&refs, 8).unwrap()
    };
    vec![
        with_path("10110011", &["0", "01", "1111"]),
        comb("0110100"),
        with_path("00000001", &["1", "11", "0001"]),
        comb("1111111"),
    ]
}

pub fn continuous_fixtures() -> Vec<(&'static str, ContRef, NetBounds)> {
    let wkl = WklGadget::new(comb("1001111")).unwrap();
    let small = WklGadget::new(Tree::binary(&["0", "1", "01"], 3).unwrap()).unwrap();
    let none = NetBounds::default();
    vec![
        ("constant", Arc::new(ConstantCode { space: Space::UnitInterval, value: frac(2, 7) }) as ContRef, none.clone()),
        ("identity", identity(), none.clone()),
        ("tent", tent(), none.clone()),
        ("parabola", parabola(), none.clone()),
        ("distance-kernel", Arc::new(DistanceKernel::new(Space::UnitInterval, frac(3, 2)).unwrap()), none.clone()),
        ("wkl-cantor", Arc::new(wkl.cantor_code()), none.clone()),
        ("wkl-unit", Arc::new(small.unit_code().unwrap()), none.clone()),
        (
            "aca-injection",
            Arc::new(aca_injection_gadget(InjectionTable::identity(6), 6).unwrap()),
            NetBounds::baire(3, 4),
        ),
    ]
}

pub fn lsc_fixtures() -> Vec<(&'static str, LscRef, NetBounds)> {
    let none = NetBounds::default();
    let mut out: Vec<(&'static str, LscRef, NetBounds)> =
        honest_fixtures().into_iter().map(|(n, f)| (n, f as LscRef, none.clone())).collect();
    out.push(("sup-raw", Arc::new(sup_gadget().raw_code()), none.clone()));
    out.push(("tent-as-lsc", Arc::new(cont_to_lsc(tent())), none.clone()));
    out.push((
        "pi11",
        Arc::new(pi11_gadget(vec![Tree::binary(&["0", "01", "011"], 3).unwrap(), comb("01")])),
        NetBounds::baire(2, 5),
    ));
    out.push((
        "distance-to-1/3",
        Arc::new(DistanceLsc { space: Space::UnitInterval, x0: real(frac(1, 3)), eps: frac(1, 2), offset: frac(1, 8) }),
        none.clone(),
    ));
    out.push((
        "max-step-tent",
        Arc::new(lsc_combine(Arc::new(step()), Arc::new(tent_lsc()), CombineOp::Max).unwrap()),
        none.clone(),
    ));
    out.push((
        "zero-on-interval",
        Arc::new(
            lsc_zero_on_closed(
                Arc::new(step()),
                Arc::new(IntervalSet { space: Space::UnitInterval, lo: frac(1, 4), hi: frac(3, 4) }),
            )
            .unwrap(),
        ),
        none,
    ));
    out
}

/// `min_y f(y) + α|x - y|` over the `2^-k` grid.
pub fn grid_envelope(f: impl Fn(&Q) -> Ext, alpha: &Q, x: &Q, k: u32) -> Q {
    let n = 1i64 << k;
    (0..=n)
        .filter_map(|i| {
            let y = frac(i, n);
            f(&y).fin().map(|v| v + alpha * ekeland::rational::abs(&(x - &y)))
        })
        .min()
        .unwrap()
}
