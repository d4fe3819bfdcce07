//! Functions addressable by name, as used on the command line.
//!
//! Vertex functions: `phi_u`, `phi:<n>`, `const:<q>`.
//! Set functions: `minfun:<vertex fn>`, `sum:phi_family`,
//! `sum:phi_family:eps=<x>`, `gmin:kmean:<k>:<m>:<vertex fn>`,
//! `markov:<n>:<set fn>`, `const:<q>`, `card`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonic::{canonical_phi_u, phi_family, Constant, SharedFn};
use crate::lamplighter::{Cardinality, Caps, ConstSet, SharedSetFn};
use crate::minfn::{generalized_minfun, markov_image, minfun, phi_family_countable, r_family_kmean, PhiFamilySum};
use crate::schreier::SchreierGraph;
use crate::value::parse_value;

pub fn vertex_fn(name: &str, graph: &SchreierGraph) -> Result<SharedFn> {
    let o = graph.orientation();
    if name == "phi_u" {
        return Ok(canonical_phi_u());
    }
    if let Some(n) = name.strip_prefix("phi:") {
        let n: u32 = n.parse().map_err(|_| Error::Parse(format!("bad family index in {name:?}")))?;
        return Ok(phi_family(n, o));
    }
    if let Some(q) = name.strip_prefix("const:") {
        let v = parse_value(q).ok_or_else(|| Error::Parse(format!("bad constant in {name:?}")))?;
        return Ok(Arc::new(Constant(v)));
    }
    Err(Error::Parse(format!("unknown vertex function {name:?}")))
}

pub fn set_fn(name: &str, graph: &Arc<SchreierGraph>, caps: &Caps) -> Result<SharedSetFn> {
    if name == "card" {
        return Ok(Arc::new(Cardinality));
    }
    if name == "sum:phi_family" {
        return Ok(Arc::new(PhiFamilySum::new(graph.clone())));
    }
    if let Some(eps) = name.strip_prefix("sum:phi_family:eps=") {
        let eps = parse_value(eps).ok_or_else(|| Error::Parse(format!("bad eps in {name:?}")))?;
        return Ok(Arc::new(phi_family_countable(graph.clone(), eps)?));
    }
    if let Some(inner) = name.strip_prefix("minfun:") {
        return Ok(Arc::new(minfun(graph.clone(), vertex_fn(inner, graph)?)));
    }
    if let Some(rest) = name.strip_prefix("gmin:kmean:") {
        let mut parts = rest.splitn(3, ':');
        let (k, m, phi) = (parts.next(), parts.next(), parts.next());
        let (Some(k), Some(m), Some(phi)) = (k, m, phi) else {
            return Err(Error::Parse(format!("expected gmin:kmean:<k>:<m>:<phi>, got {name:?}")));
        };
        let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad k in {name:?}")))?;
        let m: usize = m.parse().map_err(|_| Error::Parse(format!("bad m in {name:?}")))?;
        return Ok(Arc::new(generalized_minfun(r_family_kmean(k, m)?, vertex_fn(phi, graph)?, graph.clone())?));
    }
    if let Some(rest) = name.strip_prefix("markov:") {
        let (n, inner) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("expected markov:<n>:<fn>, got {name:?}")))?;
        let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad power in {name:?}")))?;
        return Ok(Arc::new(markov_image(set_fn(inner, graph, caps)?, n, *caps)?));
    }
    if let Some(q) = name.strip_prefix("const:") {
        let v = parse_value(q).ok_or_else(|| Error::Parse(format!("bad constant in {name:?}")))?;
        return Ok(Arc::new(ConstSet(v)));
    }
    Err(Error::Parse(format!("unknown set function {name:?}")))
}
