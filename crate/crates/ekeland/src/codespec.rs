//! Versioned JSON files describing function codes: explicit item data or
//! named gadgets with their parameters.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::{
    cont_from_samples, cont_to_lsc, honest_promote_compact, lsc_add_scaled_distance, lsc_combine, CodeError,
    CombineOp, ConstantCode, ContRef, DistanceKernel, HonestRef, LscRef, Modulus, PiecewiseLinearCode,
    PiecewiseLsc,
};
use crate::critical::Potential;
use crate::gadgets::{
    aca_injection_gadget, aca_sup_gadget, pi11_gadget, wkl_gadget, GadgetError, InjectionTable, Tree, TreeSpec,
    WklTarget,
};
use crate::rational::{Ext, Rat};
use crate::space::{Point, Space};

pub const CODE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodeSpec {
    Constant {
        #[serde(default = "unit")]
        space: Space,
        value: Rat,
    },
    PiecewiseLinear {
        #[serde(default = "unit")]
        space: Space,
        knots: Vec<(Rat, Rat)>,
    },
    /// Knot values and cell limits; `null` stands for `+inf`.
    PiecewiseLsc {
        #[serde(default = "unit")]
        space: Space,
        knots: Vec<Rat>,
        knot_values: Vec<Option<Rat>>,
        cells: Vec<Option<(Rat, Rat)>>,
    },
    Samples {
        space: Space,
        samples: Vec<(Point, Rat)>,
        modulus: Modulus,
    },
    DistanceKernel {
        factor: Space,
        alpha: Rat,
    },
    Wkl {
        tree: TreeSpec,
        target: WklTarget,
    },
    AcaInjection {
        table: Vec<(u64, u64)>,
        n: u32,
    },
    AcaSup {
        c: Vec<Rat>,
    },
    Pi11 {
        trees: Vec<TreeSpec>,
    },
    ToLsc {
        of: Box<CodeSpec>,
    },
    Combine {
        op: CombineOp,
        f: Box<CodeSpec>,
        g: Box<CodeSpec>,
    },
    AddScaledDistance {
        f: Box<CodeSpec>,
        x0: Point,
        eps: Rat,
    },
    Promote {
        f: Box<CodeSpec>,
        resolution: u32,
    },
}

fn unit() -> Space {
    Space::UnitInterval
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub schema_version: u32,
    pub code: CodeSpec,
}

impl CodeFile {
    pub fn new(code: CodeSpec) -> CodeFile {
        CodeFile { schema_version: CODE_SCHEMA_VERSION, code }
    }

    pub fn parse(text: &str) -> Result<CodeFile, SpecError> {
        let file: CodeFile = serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))?;
        if file.schema_version != CODE_SCHEMA_VERSION {
            return Err(SpecError::Version(file.schema_version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("code files serialize")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("{0}")]
    Json(String),
    #[error("unsupported schema version {0}, expected {CODE_SCHEMA_VERSION}")]
    Version(u32),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("{0} needs {1}")]
    Shape(&'static str, &'static str),
}

/// A built code, keeping the strongest interface it supports.
#[derive(Clone)]
pub enum Code {
    Continuous(ContRef),
    Lsc(LscRef),
    Honest(HonestRef),
}

impl Code {
    pub fn space(&self) -> &Space {
        match self {
            Code::Continuous(c) => c.domain(),
            Code::Lsc(l) => l.space(),
            Code::Honest(h) => h.space(),
        }
    }

    pub fn potential(&self) -> Potential {
        match self {
            Code::Continuous(c) => Potential::Continuous(c.clone()),
            Code::Lsc(l) => Potential::Lsc(l.clone()),
            Code::Honest(h) => Potential::Lsc(h.clone()),
        }
    }

    pub fn lsc(&self) -> LscRef {
        match self {
            Code::Continuous(c) => Arc::new(cont_to_lsc(c.clone())),
            Code::Lsc(l) => l.clone(),
            Code::Honest(h) => h.clone(),
        }
    }

    pub fn honest(&self) -> Option<HonestRef> {
        match self {
            Code::Honest(h) => Some(h.clone()),
            _ => None,
        }
    }
}

fn ext(v: &Option<Rat>) -> Ext {
    v.as_ref().map_or(Ext::Inf, |r| Ext::Fin(r.0.clone()))
}

impl CodeSpec {
    pub fn build(&self) -> Result<Code, SpecError> {
        Ok(match self {
            CodeSpec::Constant { space, value } => {
                Code::Continuous(Arc::new(ConstantCode { space: space.clone(), value: value.0.clone() }))
            }
            CodeSpec::PiecewiseLinear { space, knots } => {
                let knots = knots.iter().map(|(t, v)| (t.0.clone(), v.0.clone())).collect();
                Code::Continuous(Arc::new(PiecewiseLinearCode::new(space.clone(), knots)?))
            }
            CodeSpec::PiecewiseLsc { space, knots, knot_values, cells } => Code::Honest(Arc::new(PiecewiseLsc::new(
                space.clone(),
                knots.iter().map(|r| r.0.clone()).collect(),
                knot_values.iter().map(ext).collect(),
                cells.iter().map(|c| c.as_ref().map(|(a, b)| (a.0.clone(), b.0.clone()))).collect(),
            )?)),
            CodeSpec::Samples { space, samples, modulus } => {
                let samples = samples.iter().map(|(p, v)| (p.clone(), v.0.clone())).collect();
                Code::Continuous(Arc::new(cont_from_samples(samples, modulus.clone(), space.clone())?))
            }
            CodeSpec::DistanceKernel { factor, alpha } => {
                Code::Continuous(Arc::new(DistanceKernel::new(factor.clone(), alpha.0.clone())?))
            }
            CodeSpec::Wkl { tree, target } => Code::Continuous(wkl_gadget(Tree::from_spec(tree)?, *target)?),
            CodeSpec::AcaInjection { table, n } => {
                Code::Continuous(Arc::new(aca_injection_gadget(InjectionTable::new(table.clone())?, *n)?))
            }
            CodeSpec::AcaSup { c } => {
                Code::Honest(Arc::new(aca_sup_gadget(c.iter().map(|r| r.0.clone()).collect())?))
            }
            CodeSpec::Pi11 { trees } => {
                let trees = trees.iter().map(Tree::from_spec).collect::<Result<Vec<_>, _>>()?;
                Code::Honest(Arc::new(pi11_gadget(trees)))
            }
            CodeSpec::ToLsc { of } => match of.build()? {
                Code::Continuous(c) => Code::Lsc(Arc::new(cont_to_lsc(c))),
                _ => return Err(SpecError::Shape("to-lsc", "a continuous code")),
            },
            CodeSpec::Combine { op, f, g } => {
                Code::Lsc(Arc::new(lsc_combine(f.build()?.lsc(), g.build()?.lsc(), *op)?))
            }
            CodeSpec::AddScaledDistance { f, x0, eps } => {
                Code::Lsc(Arc::new(lsc_add_scaled_distance(f.build()?.lsc(), x0.clone(), eps.0.clone())?))
            }
            CodeSpec::Promote { f, resolution } => {
                Code::Honest(Arc::new(honest_promote_compact(f.build()?.lsc(), *resolution)?))
            }
        })
    }
}
