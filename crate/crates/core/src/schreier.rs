//! Lazy Schreier graph of F acting on the dyadic rationals in (0, 1).
//!
//! Vertices are materialized on demand from the dyadic action. Structural
//! classification (skeleton vs. hair) is inferred from neighbor counts and
//! memoized.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use parking_lot::RwLock;
use serde::Serialize;

use crate::address::{HairSide, Orientation, SkeletonPath, StructuralAddress};
use crate::config::Config;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::word::Gen;

#[derive(Clone, Debug, Serialize)]
pub struct GraphConfig {
    pub orientation: Orientation,
    /// Root hair used by `hair_point(p, m)`. Defaults to the b⁻¹ hair, the one
    /// the explicit family never walks along.
    pub root_hair: HairSide,
    pub probe_depth: u32,
    /// Probe depth doubles on `Undetermined` until it passes this cap.
    pub probe_cap: u32,
    /// Longest skeleton path followed back to the root.
    pub depth_cap: u32,
    pub ball_cap: usize,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            orientation: Orientation::Lr,
            root_hair: HairSide::B,
            probe_depth: 8,
            probe_cap: 1 << 16,
            depth_cap: 1 << 20,
            ball_cap: 4_000_000,
        }
    }
}

pub struct SchreierGraph {
    cfg: GraphConfig,
    cache: RwLock<HashMap<Dyadic, StructuralAddress>>,
}

impl Default for SchreierGraph {
    fn default() -> Self {
        SchreierGraph::new(GraphConfig::default())
    }
}

impl SchreierGraph {
    pub fn new(cfg: GraphConfig) -> Self {
        let mut m = HashMap::new();
        m.insert(Dyadic::root(), StructuralAddress::root());
        SchreierGraph { cfg, cache: RwLock::new(m) }
    }

    pub fn with_orientation(o: Orientation) -> Self {
        SchreierGraph::new(GraphConfig { orientation: o, ..GraphConfig::default() })
    }

    pub fn config(&self) -> &GraphConfig {
        &self.cfg
    }

    pub fn orientation(&self) -> Orientation {
        self.cfg.orientation
    }

    pub fn root(&self) -> Dyadic {
        Dyadic::root()
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().len()
    }

    pub fn neighbors(&self, x: &Dyadic) -> [(Gen, Dyadic); 4] {
        Gen::ALL.map(|g| (g, g.apply(x)))
    }

    /// Number of distinct neighbors other than `x` itself.
    pub fn distinct_degree(&self, x: &Dyadic) -> usize {
        let nb = self.neighbors(x);
        let mut seen: Vec<&Dyadic> = Vec::with_capacity(4);
        for (_, y) in &nb {
            if y != x && !seen.contains(&y) {
                seen.push(y);
            }
        }
        seen.len()
    }

    fn is_skeleton_vertex(&self, x: &Dyadic) -> bool {
        self.distinct_degree(x) >= 3
    }

    fn cached(&self, x: &Dyadic) -> Option<StructuralAddress> {
        self.cache.read().get(x).cloned()
    }

    /// Structural address of `x`, retrying with doubled probe depth.
    pub fn classify(&self, x: &Dyadic) -> Result<StructuralAddress> {
        let mut depth = self.cfg.probe_depth.max(1);
        loop {
            match self.classify_with_depth(x, depth) {
                Err(Error::Undetermined { .. }) if depth < self.cfg.probe_cap => depth *= 2,
                r => return r,
            }
        }
    }

    /// One classification attempt. Hairs longer than `probe_depth` from their
    /// base come back `Undetermined`.
    pub fn classify_with_depth(&self, x: &Dyadic, probe_depth: u32) -> Result<StructuralAddress> {
        if let Some(a) = self.cached(x) {
            return Ok(a);
        }
        if !x.is_vertex() {
            return Err(Error::PreconditionFailed(format!("{x} is not in (0,1)")));
        }
        let deg = self.distinct_degree(x);
        let addr = if deg >= 3 {
            StructuralAddress::Skeleton(self.skeleton_path(x)?)
        } else if deg == 2 {
            self.classify_hair(x, probe_depth)?
        } else {
            return Err(Error::StructuralAssertFailed(format!("{x} has {deg} distinct neighbors")));
        };
        self.cache.write().insert(x.clone(), addr.clone());
        Ok(addr)
    }

    /// Walk parent edges up to the root. The parent of a non-root skeleton
    /// vertex is whichever of its a⁻¹ / b⁻¹ images is itself on the skeleton.
    fn skeleton_path(&self, x: &Dyadic) -> Result<SkeletonPath> {
        let mut bits_rev: Vec<bool> = Vec::new();
        let mut chain: Vec<Dyadic> = Vec::new();
        let mut cur = x.clone();
        let prefix = loop {
            if let Some(a) = self.cached(&cur) {
                match a {
                    StructuralAddress::Skeleton(p) => break p,
                    StructuralAddress::Hair { .. } => {
                        return Err(Error::StructuralAssertFailed(format!(
                            "skeleton walk from {x} reached hair vertex {cur}"
                        )))
                    }
                }
            }
            if bits_rev.len() as u32 >= self.cfg.depth_cap {
                return Err(Error::Undetermined { vertex: x.to_string(), depth: self.cfg.depth_cap });
            }
            let up_a = Gen::AInv.apply(&cur);
            let up_b = Gen::BInv.apply(&cur);
            let (sa, sb) = (self.is_skeleton_vertex(&up_a), self.is_skeleton_vertex(&up_b));
            let (bit, parent) = match (sa, sb) {
                (true, false) => (false, up_a),
                (false, true) => (true, up_b),
                _ => {
                    return Err(Error::StructuralAssertFailed(format!(
                        "{cur} has {} skeleton parents",
                        sa as u8 + sb as u8
                    )))
                }
            };
            bits_rev.push(bit);
            chain.push(cur);
            cur = parent;
        };
        let mut path = prefix;
        let mut cache = self.cache.write();
        for (bit, v) in bits_rev.into_iter().rev().zip(chain.into_iter().rev()) {
            path.push(bit);
            cache.entry(v).or_insert_with(|| StructuralAddress::Skeleton(path.clone()));
        }
        Ok(path)
    }

    /// Walk both non-loop directions in lockstep until one reaches a vertex
    /// with at least three distinct neighbors.
    fn classify_hair(&self, x: &Dyadic, probe_depth: u32) -> Result<StructuralAddress> {
        let nb = self.neighbors(x);
        let moving: Vec<Gen> = nb.iter().filter(|(_, y)| y != x).map(|(g, _)| *g).collect();
        if moving.len() != 2 || moving[0].inverse() != moving[1] {
            return Err(Error::StructuralAssertFailed(format!(
                "hair vertex {x} moves under {moving:?}, expected an inverse pair"
            )));
        }
        let dirs = [moving[0], moving[1]];
        let mut pos = [x.clone(), x.clone()];
        for step in 1..=probe_depth {
            for k in 0..2 {
                pos[k] = dirs[k].apply(&pos[k]);
                if self.is_skeleton_vertex(&pos[k]) {
                    let outward = dirs[k].inverse();
                    let side = match outward {
                        Gen::AInv => HairSide::A,
                        Gen::BInv => HairSide::B,
                        _ => {
                            return Err(Error::StructuralAssertFailed(format!(
                                "hair through {x} leaves its base by {outward}, expected an inverse generator"
                            )))
                        }
                    };
                    let base = match self.classify(&pos[k])? {
                        StructuralAddress::Skeleton(p) => p,
                        other => {
                            return Err(Error::StructuralAssertFailed(format!("hair base {other} is not skeleton")))
                        }
                    };
                    if let Some(bit) = base.last() {
                        if HairSide::of_child(bit) != side {
                            return Err(Error::StructuralAssertFailed(format!(
                                "hair side {side:?} at base {base} contradicts its child type"
                            )));
                        }
                    }
                    return Ok(StructuralAddress::hair(base, side, step));
                }
            }
        }
        Err(Error::Undetermined { vertex: x.to_string(), depth: probe_depth })
    }

    /// The vertex at a structural address, computed by the dyadic action from p.
    pub fn realize(&self, addr: &StructuralAddress) -> Dyadic {
        let x = addr.to_word().apply(&Dyadic::root());
        self.cache.write().entry(x.clone()).or_insert_with(|| addr.clone());
        x
    }

    /// Address of the point `m` steps out along the hair of a skeleton base.
    pub fn hair_address(&self, base: &SkeletonPath, m: u32) -> StructuralAddress {
        let side = match base.last() {
            None => self.cfg.root_hair,
            Some(bit) => HairSide::of_child(bit),
        };
        StructuralAddress::hair(base.clone(), side, m)
    }

    pub fn hair_point(&self, base: &Dyadic, m: u32) -> Result<Dyadic> {
        let b = match self.classify(base)? {
            StructuralAddress::Skeleton(p) => p,
            other => return Err(Error::PreconditionFailed(format!("{base} is {other}, not a skeleton vertex"))),
        };
        Ok(self.realize(&self.hair_address(&b, m)))
    }

    pub fn t_index(&self, x: &Dyadic) -> Result<Option<u32>> {
        Ok(self.classify(x)?.t_index(self.cfg.orientation))
    }

    /// Membership in T_i (hairs included).
    pub fn subtree_t(&self, i: u32, x: &Dyadic) -> Result<bool> {
        Ok(self.t_index(x)? == Some(i))
    }

    /// `p, a·p, …, a^i·p, b·a^i·p` via the dyadic action.
    pub fn golden_path(&self, i: u32) -> Vec<Dyadic> {
        let mut out = Vec::with_capacity(i as usize + 2);
        let mut x = Dyadic::root();
        out.push(x.clone());
        for _ in 0..i {
            x = Gen::A.apply(&x);
            out.push(x.clone());
        }
        out.push(Gen::B.apply(&x));
        out
    }

    /// Golden path structure for the configured orientation: the first i+1
    /// vertices on the left spine at depths 0..=i, the last one the root of T_i.
    pub fn golden_path_ok(&self, i: u32) -> Result<bool> {
        let path = self.golden_path(i);
        let o = self.cfg.orientation;
        for (j, x) in path.iter().enumerate() {
            let a = self.classify(x)?;
            let ok = if j as u32 <= i {
                a.is_skeleton() && a.depth() == j as u32 && a.t_index(o).is_none()
            } else {
                a.is_skeleton() && a.depth() == i + 1 && a.t_index(o) == Some(i)
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn validate_orientation(&self, max_i: u32) -> Result<()> {
        for i in 0..=max_i {
            if !self.golden_path_ok(i)? {
                return Err(Error::StructuralAssertFailed(format!(
                    "orientation {} fails the golden-path check at i = {i}",
                    self.cfg.orientation
                )));
            }
        }
        Ok(())
    }

    /// Graph with the first orientation (configured one, then its flip) that
    /// passes the golden-path check.
    pub fn auto_oriented(cfg: GraphConfig) -> Result<SchreierGraph> {
        let first = SchreierGraph::new(cfg.clone());
        if first.validate_orientation(4).is_ok() {
            return Ok(first);
        }
        let flipped = SchreierGraph::new(GraphConfig { orientation: cfg.orientation.flipped(), ..cfg });
        flipped.validate_orientation(4)?;
        Ok(flipped)
    }

    /// Breadth-first ball around `center`, neighbors visited in a, b, a⁻¹, b⁻¹ order.
    pub fn ball(&self, center: &Dyadic, radius: u32) -> Result<Ball> {
        if !center.is_vertex() {
            return Err(Error::PreconditionFailed(format!("{center} is not in (0,1)")));
        }
        let mut index: HashMap<Dyadic, usize> = HashMap::new();
        let mut vertices = vec![center.clone()];
        let mut dist = vec![0u32];
        index.insert(center.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            if dist[i] == radius {
                continue;
            }
            let x = vertices[i].clone();
            for (_, y) in self.neighbors(&x) {
                if !index.contains_key(&y) {
                    if vertices.len() >= self.cfg.ball_cap {
                        return Err(Error::ResourceLimit(format!(
                            "ball({center}, {radius}) exceeds {} vertices",
                            self.cfg.ball_cap
                        )));
                    }
                    index.insert(y.clone(), vertices.len());
                    vertices.push(y);
                    dist.push(dist[i] + 1);
                    queue.push_back(vertices.len() - 1);
                }
            }
        }
        let mut edges = Vec::new();
        for (i, x) in vertices.iter().enumerate() {
            for (g, y) in self.neighbors(x) {
                if let Some(&j) = index.get(&y) {
                    edges.push(BallEdge { from: i, gen: g, to: j });
                }
            }
        }
        Ok(Ball { center: center.clone(), radius, vertices, dist, index, edges })
    }

    /// `L` consecutive points on the configured root hair, offsets 1..=L.
    pub fn folner_hair_segment(&self, len: u32) -> Config {
        let root = SkeletonPath::root();
        Config::new((1..=len).map(|m| self.realize(&self.hair_address(&root, m))))
    }

    /// Labeled edge-ends leaving `set`, divided by `4|set|`.
    pub fn boundary_ratio(&self, set: &Config) -> BigRational {
        if set.is_empty() {
            return BigRational::from_integer(0.into());
        }
        let members: HashSet<&Dyadic> = set.iter().collect();
        let leaving = set
            .iter()
            .flat_map(|x| self.neighbors(x))
            .filter(|(_, y)| !members.contains(y))
            .count();
        BigRational::new(leaving.into(), (4 * set.len()).into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallEdge {
    pub from: usize,
    pub gen: Gen,
    pub to: usize,
}

/// Materialized ball with labeled edges (loops and parallel edges kept).
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Dyadic,
    pub radius: u32,
    pub vertices: Vec<Dyadic>,
    pub dist: Vec<u32>,
    index: HashMap<Dyadic, usize>,
    pub edges: Vec<BallEdge>,
}

#[derive(Serialize)]
struct BallEntry<'a> {
    vertex: &'a Dyadic,
    dist: u32,
    edges: BTreeMap<char, &'a Dyadic>,
}

#[derive(Serialize)]
struct BallExport<'a> {
    center: &'a Dyadic,
    radius: u32,
    adjacency: Vec<BallEntry<'a>>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.index.contains_key(x)
    }

    pub fn index_of(&self, x: &Dyadic) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn dist_of(&self, x: &Dyadic) -> Option<u32> {
        self.index_of(x).map(|i| self.dist[i])
    }

    /// Vertices strictly inside the ball (all four neighbors materialized).
    pub fn interior(&self) -> impl Iterator<Item = &Dyadic> {
        self.vertices.iter().zip(&self.dist).filter(|(_, &d)| d < self.radius).map(|(v, _)| v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut adj: Vec<BallEntry> = self
            .vertices
            .iter()
            .zip(&self.dist)
            .map(|(v, &d)| BallEntry { vertex: v, dist: d, edges: BTreeMap::new() })
            .collect();
        for e in &self.edges {
            adj[e.from].edges.insert(e.gen.as_char(), &self.vertices[e.to]);
        }
        serde_json::to_value(BallExport { center: &self.center, radius: self.radius, adjacency: adj })
            .expect("ball export is plain data")
    }
}
