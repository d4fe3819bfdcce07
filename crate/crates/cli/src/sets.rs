//! `--set` specifications and the set function each construction is meant for.

use std::sync::Arc;

use thompson_core::approx::{construct_en_countable, construct_en_single, construct_en_sum, explicit_en_hairs};
use thompson_core::harmonic::SharedFn;
use thompson_core::lamplighter::{Caps, SharedSetFn};
use thompson_core::minfn::{minfun, weighted_sum};
use thompson_core::registry::{set_fn, vertex_fn};
use thompson_core::value::parse_value;
use thompson_core::{Config, Error, Result, SchreierGraph, Value};

#[derive(Clone, Debug)]
pub enum SetSpec {
    Explicit(u32),
    Single(u32, String),
    Sum(u32, Vec<(String, String)>),
    Countable(u32),
    Points(String),
    File(String),
}

fn parse_n(s: &str, spec: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::Parse(format!("bad n in set spec {spec:?}")))
}

impl SetSpec {
    pub fn parse(spec: &str) -> Result<SetSpec> {
        let (kind, rest) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("bad set spec {spec:?}")))?;
        match kind {
            "explicit" => Ok(SetSpec::Explicit(parse_n(rest, spec)?)),
            "countable" => Ok(SetSpec::Countable(parse_n(rest, spec)?)),
            "single" => {
                let (n, phi) = rest.split_once(':').unwrap_or((rest, "phi_u"));
                Ok(SetSpec::Single(parse_n(n, spec)?, phi.to_string()))
            }
            "sum" => {
                let (n, terms) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected sum:<n>:<phi>*<λ>,…, got {spec:?}")))?;
                let terms = terms
                    .split(',')
                    .map(|t| {
                        let (phi, l) = t.split_once('*').unwrap_or((t, "1"));
                        (phi.to_string(), l.to_string())
                    })
                    .collect();
                Ok(SetSpec::Sum(parse_n(n, spec)?, terms))
            }
            "points" => Ok(SetSpec::Points(rest.to_string())),
            "file" => Ok(SetSpec::File(rest.to_string())),
            _ => Err(Error::Parse(format!("unknown set kind {kind:?}"))),
        }
    }

    pub fn is_constructive(&self) -> bool {
        !matches!(self, SetSpec::Points(_) | SetSpec::File(_))
    }

    /// The set function a construction targets, when `--fn` is not given.
    pub fn default_fn(&self) -> Option<String> {
        match self {
            SetSpec::Explicit(_) | SetSpec::Countable(_) => Some("sum:phi_family".into()),
            SetSpec::Single(_, phi) => Some(format!("minfun:{phi}")),
            _ => None,
        }
    }

    /// Validates names without running any construction.
    pub fn check(&self, graph: &SchreierGraph) -> Result<()> {
        match self {
            SetSpec::Single(_, phi) => vertex_fn(phi, graph).map(|_| ()),
            SetSpec::Sum(_, terms) => terms_of(graph, terms).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn build(&self, graph: &SchreierGraph) -> Result<Config> {
        match self {
            SetSpec::Explicit(n) => explicit_en_hairs(graph, *n),
            SetSpec::Countable(n) => Ok(construct_en_countable(graph, *n)?.set),
            SetSpec::Single(n, phi) => construct_en_single(graph, vertex_fn(phi, graph)?, *n),
            SetSpec::Sum(n, terms) => {
                let (phis, lambdas) = terms_of(graph, terms)?;
                construct_en_sum(graph, &phis, &lambdas, *n)
            }
            SetSpec::Points(s) => s.parse(),
            SetSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("reading {path}: {e}")))?;
                let text = text.trim();
                // a bare list or a JSON string
                match serde_json::from_str::<String>(text) {
                    Ok(s) => s.parse(),
                    Err(_) => text.parse(),
                }
            }
        }
    }
}

fn terms_of(graph: &SchreierGraph, terms: &[(String, String)]) -> Result<(Vec<SharedFn>, Vec<Value>)> {
    let mut phis = Vec::new();
    let mut lambdas = Vec::new();
    for (phi, l) in terms {
        phis.push(vertex_fn(phi, graph)?);
        lambdas.push(parse_value(l).ok_or_else(|| Error::Parse(format!("bad weight {l:?}")))?);
    }
    Ok((phis, lambdas))
}

/// `--fn` if given, else the function the set was built for.
pub fn resolve_fn(name: Option<&str>, spec: &SetSpec, graph: &Arc<SchreierGraph>, caps: &Caps) -> Result<(String, SharedSetFn)> {
    if let Some(name) = name {
        return Ok((name.to_string(), set_fn(name, graph, caps)?));
    }
    if let SetSpec::Sum(_, terms) = spec {
        let (phis, lambdas) = terms_of(graph, terms)?;
        let fs: Vec<SharedSetFn> = phis.into_iter().map(|p| Arc::new(minfun(graph.clone(), p)) as _).collect();
        let label = terms.iter().map(|(p, l)| format!("{l}*minfun:{p}")).collect::<Vec<_>>().join("+");
        return Ok((label, Arc::new(weighted_sum(fs, lambdas)?)));
    }
    let name = spec
        .default_fn()
        .ok_or_else(|| Error::Parse("--fn is required for points: and file: sets".into()))?;
    Ok((name.clone(), set_fn(&name, graph, caps)?))
}
