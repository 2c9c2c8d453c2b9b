use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};

use ekeland::codes::{honest_promote_compact, HonestRef};
use ekeland::codespec::{Code, CodeFile, CodeSpec};
use ekeland::critical::{
    fvp_search, lvp_search, verify as recheck, Certificate, NetSpec, SearchParams, Verdict, SCHEMA_VERSION,
};
use ekeland::envelope::EnvelopeTable;
use ekeland::gadgets::{
    embed_baire, embed_unit, pseudofib_iota, AcaInjection, Expr, InjectionTable, Pi11Gadget, Tree, TreeSpec,
    WklGadget, WklTarget,
};
use ekeland::rational::{fmt_q, parse_q, Q, Rat};
use ekeland::space::{NetBounds, Point, Space};

use crate::output::Record;
use crate::{
    EmbedArgs, EmbedKind, EnvelopeArgs, Failure, GadgetArgs, GadgetType, Outcome, Principle, SearchArgs, Target,
    VerifyArgs, BUDGET, VERIFY_FAILED,
};

fn rational(name: &str, s: &str) -> Result<Q, Failure> {
    parse_q(s).map_err(|e| Failure::invalid(format!("--{name}: {e}")))
}

fn json_error(path: &std::path::Path, e: impl std::fmt::Display) -> Failure {
    Failure::invalid(format!("{}: {e}", path.display()))
}

fn load_code(path: &std::path::Path, record: &mut Record) -> Result<Code, Failure> {
    let text = record.read(path)?;
    let file = CodeFile::parse(&text).map_err(|e| json_error(path, e))?;
    Ok(file.code.build()?)
}

fn load_tree(path: &std::path::Path, record: &mut Record) -> Result<TreeSpec, Failure> {
    let text = record.read(path)?;
    let spec: TreeSpec = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    Tree::from_spec(&spec).map_err(|e| json_error(path, e))?;
    Ok(spec)
}

fn pretty<T: serde::Serialize>(v: &T) -> Vec<u8> {
    (serde_json::to_string_pretty(v).expect("values serialize") + "\n").into_bytes()
}

pub fn gadget(a: &GadgetArgs, record: &mut Record) -> Result<Outcome, Failure> {
    let mut net: Option<Vec<Point>> = None;
    let spec = match a.kind {
        GadgetType::Wkl => {
            let [path] = a.tree.as_slice() else {
                return Err(Failure::invalid("wkl takes exactly one --tree"));
            };
            let tree = load_tree(path, record)?;
            WklGadget::new(Tree::from_spec(&tree)?).map_err(|e| json_error(path, e))?;
            let target = match a.target {
                Target::Cantor => WklTarget::Cantor,
                Target::Unit => WklTarget::Unit,
            };
            CodeSpec::Wkl { tree, target }
        }
        GadgetType::AcaSup => {
            let Some(cn) = &a.cn else { return Err(Failure::invalid("aca-sup needs --cn")) };
            let c = Expr::parse(cn)?.prefix(a.prefix)?;
            CodeSpec::AcaSup { c: c.into_iter().map(Rat).collect() }
        }
        GadgetType::AcaInj => {
            let Some(h) = &a.h else { return Err(Failure::invalid("aca-inj needs --h")) };
            let h = Expr::parse(h)?;
            let mut table = Vec::new();
            for x in 0..a.domain {
                let v = h.eval(x)?;
                let out = Some(&v).filter(|v| v.is_integer() && !v.is_negative()).and_then(|v| v.to_integer().to_u64());
                let Some(out) = out else {
                    return Err(Failure::invalid(format!("h({x}) = {} is not a natural number", fmt_q(&v))));
                };
                table.push((x, out));
            }
            let g = AcaInjection::new(InjectionTable::new(table.clone())?, a.n)?;
            let mut pts = g.perturbation_net(&Point::seq(vec![]));
            pts.extend(g.perturbation_net(&g.optimum()));
            net = Some(pts);
            CodeSpec::AcaInjection { table, n: a.n }
        }
        GadgetType::Pi11 => {
            if a.tree.is_empty() {
                return Err(Failure::invalid("pi11 needs at least one --tree"));
            }
            let trees = a.tree.iter().map(|p| load_tree(p, record)).collect::<Result<Vec<_>, _>>()?;
            let built = trees.iter().map(Tree::from_spec).collect::<Result<Vec<_>, _>>()?;
            net = Some(Pi11Gadget::new(built).slice_net());
            CodeSpec::Pi11 { trees }
        }
    };
    let code = spec.build()?;
    let file = CodeFile::new(spec);
    let body = file.to_json() + "\n";
    if let Some(path) = &a.net_out {
        let Some(points) = &net else {
            return Err(Failure::invalid("--net-out applies to aca-inj and pi11"));
        };
        record.write(path, &pretty(points))?;
    }
    record.write(&a.out, body.as_bytes())?;
    Ok(Outcome { code: 0, summary: format!("wrote {} code on {}", kind_name(a.kind), code.space().name()) })
}

fn kind_name(k: GadgetType) -> &'static str {
    match k {
        GadgetType::Wkl => "wkl",
        GadgetType::AcaInj => "aca-inj",
        GadgetType::AcaSup => "aca-sup",
        GadgetType::Pi11 => "pi11",
    }
}

fn load_net(path: &std::path::Path, space: &Space, record: &mut Record) -> Result<Vec<Point>, Failure> {
    let text = record.read(path)?;
    let pts: Vec<Point> = serde_json::from_str(&text).map_err(|e| json_error(path, e))?;
    if let Some(p) = pts.iter().find(|p| !space.contains(p)) {
        return Err(Failure::invalid(format!("{}: {p} is not in {}", path.display(), space.name())));
    }
    Ok(pts)
}

pub fn search(a: &SearchArgs, seed_order: Option<u64>, record: &mut Record) -> Result<Outcome, Failure> {
    let code = load_code(&a.code, record)?;
    let space = code.space().clone();
    let f = code.potential();
    let mut params = SearchParams::new(rational("epsilon", &a.epsilon)?, a.resolution);
    params.budget = a.budget;
    params.max_iters = a.max_iters;
    params.slack = a.slack.as_deref().map(|s| rational("slack", s)).transpose()?;
    params.delta = a.delta.as_deref().map(|s| rational("delta", s)).transpose()?;
    params.seed_order = seed_order;
    let mut nets = NetSpec::bounded(NetBounds { branching: a.branching, depth: a.depth, c01: None });
    if let Some(path) = &a.net {
        let pts = load_net(path, &space, record)?;
        nets.search = Some(pts.clone());
        nets.verify = Some(pts);
    }
    let out = match a.principle {
        Principle::Fvp => fvp_search(&f, &params, &nets)?,
        Principle::Lvp => {
            let Some(x0) = &a.x0 else { return Err(Failure::invalid("lvp needs --x0")) };
            let x0 = space.parse_point(x0).map_err(|e| Failure::invalid(format!("--x0: {e}")))?;
            lvp_search(&f, &x0, &params, &nets)?
        }
    };
    if let Some(path) = &a.state {
        record.write(path, &pretty(&out.state))?;
    }
    record.write(&a.out, (out.certificate.to_json() + "\n").as_bytes())?;
    let cert = &out.certificate;
    let summary = format!(
        "x* = {}, f(x*) <= {}, {} after {} iterates",
        cert.x_star,
        fmt_q(&cert.f_upper),
        verdict_name(cert.verdict),
        out.state.iterates.len()
    );
    let code = match (cert.passed(), out.state.stopped_early) {
        (true, _) => 0,
        (false, true) => VERIFY_FAILED,
        (false, false) => BUDGET,
    };
    let summary = if code == BUDGET { format!("{summary}; iteration budget exhausted") } else { summary };
    Ok(Outcome { code, summary })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

pub fn verify(a: &VerifyArgs, record: &mut Record) -> Result<Outcome, Failure> {
    let code = load_code(&a.code, record)?;
    let text = record.read(&a.cert)?;
    let cert: Certificate = serde_json::from_str(&text).map_err(|e| json_error(&a.cert, e))?;
    if cert.schema_version != SCHEMA_VERSION {
        return Err(Failure::invalid(format!(
            "{}: unsupported schema version {}",
            a.cert.display(),
            cert.schema_version
        )));
    }
    if !code.space().contains(&cert.x_star) {
        return Err(Failure::invalid(format!("x* = {} is not in {}", cert.x_star, code.space().name())));
    }
    let consistent = cert.recheck();
    let fresh = recheck(&cert, &code.potential())?;
    if let Some(path) = &a.out {
        record.write(path, (fresh.to_json() + "\n").as_bytes())?;
    }
    let ok = consistent && fresh.passed();
    let mut summary = format!("{} at x* = {}", if ok { "verified" } else { "verification failed" }, fresh.x_star);
    if !consistent {
        summary.push_str("; the recorded rows do not support the recorded verdict");
    }
    if let Some(w) = &fresh.witness {
        summary.push_str(&format!("; witness y = {w}"));
    }
    if let Some(l) = fresh.localization.as_ref().filter(|l| !l.holds) {
        summary.push_str(&format!("; localization from x0 = {} fails", l.x0));
    }
    Ok(Outcome { code: if ok { 0 } else { VERIFY_FAILED }, summary })
}

pub fn envelope(a: &EnvelopeArgs, record: &mut Record) -> Result<Outcome, Failure> {
    let code = load_code(&a.code, record)?;
    let alpha = rational("alpha", &a.alpha)?;
    let space = code.space().clone();
    let Some((lo, hi)) = space.interval() else {
        return Err(Failure::invalid(format!("envelope sampling needs an interval, not {}", space.name())));
    };
    if a.points < 2 {
        return Err(Failure::invalid("--points must be at least 2"));
    }
    let f: HonestRef = match code.honest() {
        Some(h) => h,
        None => Arc::new(honest_promote_compact(code.lsc(), a.resolution + 4).map_err(Failure::invalid)?),
    };
    let table = EnvelopeTable::new(f, alpha.clone(), a.resolution, None, &NetBounds::default())?;
    let mut csv = String::from("x,lo,hi,alpha,resolution\n");
    let n = Q::from_integer((a.points - 1).into());
    for i in 0..a.points {
        let x = &lo + (&hi - &lo) * Q::from_integer(i.into()) / &n;
        let b = table.value(&Point::Real(x.clone()))?;
        csv.push_str(&format!("{},{},{},{},{}\n", fmt_q(&x), fmt_q(&b.lo), fmt_q(&b.hi), fmt_q(&alpha), a.resolution));
    }
    record.write(&a.out, csv.as_bytes())?;
    Ok(Outcome { code: 0, summary: format!("wrote {} envelope samples", a.points) })
}

pub fn embed(a: &EmbedArgs, record: &mut Record) -> Result<Outcome, Failure> {
    let (h, b_default) = match a.kind {
        EmbedKind::Unit => {
            let x = rational("x", &a.x)?;
            (embed_unit(&x)?, Some("1"))
        }
        EmbedKind::Baire => {
            let p = Space::Baire.parse_point(&a.x).map_err(|e| Failure::invalid(format!("--x: {e}")))?;
            (embed_baire(p.as_seq().unwrap_or_default(), a.depth)?, None)
        }
    };
    let g = match &a.y {
        None => h,
        Some(y) => {
            let y = rational("y", y)?;
            let lo = rational("a", &a.a)?;
            let b = a.b.as_deref().or(b_default).map(|s| rational("b", s)).transpose()?;
            pseudofib_iota(&h, &y, &lo, b.as_ref())?
        }
    };
    let n = g.breakpoints().len();
    record.write(&a.out, &pretty(&Point::Pl(g)))?;
    Ok(Outcome { code: 0, summary: format!("wrote {n} breakpoints") })
}
