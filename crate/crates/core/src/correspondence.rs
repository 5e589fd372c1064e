//! Correspondence assignments `(L, M)`.
//!
//! Every vertex `v` has a list `L(v)` of positive colour ids and every edge
//! `uv` carries a partial matching `M_uv` between `{u} x L(u)` and
//! `{v} x L(v)`. An `(L, M)`-colouring picks `φ(v) ∈ L(v)` so that no edge
//! has its pair `(φ(u), φ(v))` in `M_uv`. Ordinary list colouring is the
//! special case where each matching pairs equal colours ([`from_lists`]).

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Seed;

pub type Color = u32;

/// Partial matching on one edge `(lo, hi)`, `lo < hi`. Pairs are stored as
/// `(colour at lo, colour at hi)`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pairs: Vec<(Color, Color)>,
    lo_to_hi: HashMap<Color, Color>,
    hi_to_lo: HashMap<Color, Color>,
}

impl Matching {
    fn new(mut pairs: Vec<(Color, Color)>) -> std::result::Result<Self, String> {
        pairs.sort_unstable();
        let mut lo_to_hi = HashMap::with_capacity(pairs.len());
        let mut hi_to_lo = HashMap::with_capacity(pairs.len());
        for &(a, b) in &pairs {
            if lo_to_hi.insert(a, b).is_some() {
                return Err(format!("colour {a} matched twice at the lower endpoint"));
            }
            if hi_to_lo.insert(b, a).is_some() {
                return Err(format!("colour {b} matched twice at the upper endpoint"));
            }
        }
        Ok(Matching {
            pairs,
            lo_to_hi,
            hi_to_lo,
        })
    }

    pub fn pairs(&self) -> &[(Color, Color)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceAssignment {
    base: Graph,
    lists: Vec<Vec<Color>>,
    matchings: BTreeMap<(usize, usize), Matching>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl CorrespondenceAssignment {
    /// Builds and validates an assignment. `matchings` maps an edge `(u, v)`
    /// to pairs `(colour at u, colour at v)`; either orientation is accepted.
    /// Edges of `base` without an entry get the empty matching.
    pub fn new(
        base: Graph,
        lists: Vec<Vec<Color>>,
        matchings: impl IntoIterator<Item = ((usize, usize), Vec<(Color, Color)>)>,
    ) -> Result<Self> {
        if lists.len() != base.n() {
            return Err(Error::param(format!("{} lists for {} vertices", lists.len(), base.n())));
        }
        let mut sorted_lists = Vec::with_capacity(lists.len());
        for (v, mut l) in lists.into_iter().enumerate() {
            l.sort_unstable();
            if l.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("list of vertex {v} repeats a colour")));
            }
            if l.first() == Some(&0) {
                return Err(Error::param(format!("list of vertex {v} contains colour 0")));
            }
            sorted_lists.push(l);
        }
        let mut map = BTreeMap::new();
        for ((u, v), pairs) in matchings {
            if u >= base.n() || v >= base.n() || u == v || !base.has_edge(u, v) {
                return Err(Error::param(format!("matching on ({u},{v}), which is not an edge")));
            }
            let oriented: Vec<(Color, Color)> = if u < v {
                pairs
            } else {
                pairs.into_iter().map(|(a, b)| (b, a)).collect()
            };
            let (lo, hi) = key(u, v);
            for &(a, b) in &oriented {
                if sorted_lists[lo].binary_search(&a).is_err() || sorted_lists[hi].binary_search(&b).is_err() {
                    return Err(Error::param(format!(
                        "pair ({a},{b}) on ({lo},{hi}) uses a colour outside the lists"
                    )));
                }
            }
            let m = Matching::new(oriented).map_err(|e| Error::param(format!("edge ({lo},{hi}): {e}")))?;
            if map.insert((lo, hi), m).is_some() {
                return Err(Error::param(format!("edge ({lo},{hi}) given twice")));
            }
        }
        for (u, v) in base.edges() {
            map.entry((u, v)).or_default();
        }
        Ok(CorrespondenceAssignment {
            base,
            lists: sorted_lists,
            matchings: map,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// `L(v)`, ascending.
    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    /// Matching on edge `uv` as pairs `(colour at min, colour at max)`.
    pub fn matching(&self, u: usize, v: usize) -> Option<&Matching> {
        self.matchings.get(&key(u, v))
    }

    pub fn matchings(&self) -> impl Iterator<Item = ((usize, usize), &Matching)> {
        self.matchings.iter().map(|(&k, m)| (k, m))
    }

    /// The colour of `v` matched to `(u, c)` across edge `uv`, if any.
    #[inline]
    pub fn partner(&self, u: usize, c: Color, v: usize) -> Option<Color> {
        let m = self.matchings.get(&key(u, v))?;
        if u < v {
            m.lo_to_hi.get(&c).copied()
        } else {
            m.hi_to_lo.get(&c).copied()
        }
    }

    /// Whether `(u, cu)` and `(v, cv)` are adjacent in the cover graph.
    #[inline]
    pub fn conflicts(&self, u: usize, cu: Color, v: usize, cv: Color) -> bool {
        self.partner(u, cu, v) == Some(cv)
    }

    /// Every list has at least `ell` colours.
    pub fn is_ell_assignment(&self, ell: usize) -> bool {
        self.lists.iter().all(|l| l.len() >= ell)
    }

    pub fn to_file(&self) -> AssignmentFile {
        AssignmentFile {
            lists: self.lists.clone(),
            matchings: self
                .matchings
                .iter()
                .map(|(&(u, v), m)| MatchingEntry {
                    u,
                    v,
                    pairs: m.pairs.iter().map(|&(a, b)| [a, b]).collect(),
                })
                .collect(),
        }
    }

    /// Loads an assignment for `base`, enforcing every invariant.
    pub fn from_file(base: Graph, file: &AssignmentFile) -> Result<Self> {
        for (i, l) in file.lists.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::Load(format!("lists[{i}] is empty")));
            }
        }
        let matchings = file
            .matchings
            .iter()
            .map(|m| ((m.u, m.v), m.pairs.iter().map(|p| (p[0], p[1])).collect()));
        CorrespondenceAssignment::new(base, file.lists.clone(), matchings).map_err(|e| Error::Load(e.to_string()))
    }
}

/// On-disk assignment format; the base graph is stored separately.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub lists: Vec<Vec<Color>>,
    pub matchings: Vec<MatchingEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingEntry {
    pub u: usize,
    pub v: usize,
    pub pairs: Vec<[Color; 2]>,
}

/// Random ℓ-correspondence assignment: `L(v) = {1..ℓ}` and every edge gets an
/// independent uniformly random perfect matching (Fisher-Yates shuffle).
pub fn random_assignment(g: &Graph, ell: usize, seed: Seed) -> Result<CorrespondenceAssignment> {
    if ell < 1 {
        return Err(Error::param("ell must be at least 1"));
    }
    let mut rng = seed.rng();
    let colors: Vec<Color> = (1..=ell as Color).collect();
    let matchings: Vec<_> = g
        .edges()
        .into_iter()
        .map(|e| {
            let mut perm = colors.clone();
            perm.shuffle(&mut rng);
            (e, colors.iter().copied().zip(perm).collect())
        })
        .collect();
    CorrespondenceAssignment::new(g.clone(), vec![colors; g.n()], matchings)
}

/// List-colouring instance as a correspondence assignment: each edge matches
/// equal colours present in both lists.
pub fn from_lists(g: &Graph, lists: Vec<Vec<Color>>) -> Result<CorrespondenceAssignment> {
    if let Some(v) = lists.iter().position(Vec::is_empty) {
        return Err(Error::param(format!("list of vertex {v} is empty")));
    }
    let matchings: Vec<_> = g
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let shared = lists[u]
                .iter()
                .filter(|c| lists[v].contains(c))
                .map(|&c| (c, c))
                .collect();
            ((u, v), shared)
        })
        .collect();
    CorrespondenceAssignment::new(g.clone(), lists, matchings)
}

/// The cover graph on nodes `(v, c)`, `c ∈ L(v)`, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverGraph {
    nodes: Vec<(usize, Color)>,
    index: HashMap<(usize, Color), usize>,
    pub graph: Graph,
}

impl CoverGraph {
    pub fn nodes(&self) -> &[(usize, Color)] {
        &self.nodes
    }

    pub fn node_index(&self, v: usize, c: Color) -> Option<usize> {
        self.index.get(&(v, c)).copied()
    }

    /// Base vertex of cover node `i`.
    pub fn base_of(&self, i: usize) -> usize {
        self.nodes[i].0
    }
}

pub fn build_cover_graph(ca: &CorrespondenceAssignment) -> CoverGraph {
    let nodes: Vec<(usize, Color)> = (0..ca.n())
        .flat_map(|v| ca.list(v).iter().map(move |&c| (v, c)))
        .collect();
    let index: HashMap<_, _> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut graph = Graph::empty(nodes.len());
    for ((u, v), m) in ca.matchings() {
        for &(a, b) in m.pairs() {
            graph.insert_edge(index[&(u, a)], index[&(v, b)]);
        }
    }
    CoverGraph { nodes, index, graph }
}

/// Whether `nodes` holds at most one cover node per base vertex.
pub fn is_plausible(cg: &CoverGraph, nodes: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    nodes.iter().all(|&i| seen.insert(cg.base_of(i)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialColoring {
    colors: Vec<Option<Color>>,
}

impl PartialColoring {
    pub fn empty(n: usize) -> Self {
        PartialColoring { colors: vec![None; n] }
    }

    pub fn from_vec(colors: Vec<Option<Color>>) -> Self {
        PartialColoring { colors }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    #[inline]
    pub fn get(&self, v: usize) -> Option<Color> {
        self.colors[v]
    }

    pub fn set(&mut self, v: usize, c: Color) {
        self.colors[v] = Some(c);
    }

    pub fn unset(&mut self, v: usize) {
        self.colors[v] = None;
    }

    pub fn is_colored(&self, v: usize) -> bool {
        self.colors[v].is_some()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    pub fn as_slice(&self) -> &[Option<Color>] {
        &self.colors
    }
}

/// Colours of `L(u)` that conflict with no coloured neighbour of `u`.
pub fn available_colors(ca: &CorrespondenceAssignment, phi: &PartialColoring, u: usize) -> Vec<Color> {
    ca.list(u)
        .iter()
        .copied()
        .filter(|&c| is_usable(ca, phi, u, c))
        .collect()
}

/// Whether colour `c` can be put on `u` without touching the rest of `phi`.
#[inline]
pub fn is_usable(ca: &CorrespondenceAssignment, phi: &PartialColoring, u: usize, c: Color) -> bool {
    ca.base()
        .neighbors(u)
        .all(|v| phi.get(v).is_none_or(|cv| !ca.conflicts(u, c, v, cv)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    WrongLength { expected: usize, got: usize },
    NotInList { vertex: usize, color: Color },
    MatchedEdge { u: usize, v: usize, cu: Color, cv: Color },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub violations: Vec<ViolationKind>,
}

/// Checks the partial-colouring invariants.
pub fn validate(ca: &CorrespondenceAssignment, phi: &PartialColoring) -> Validation {
    let mut violations = Vec::new();
    if phi.len() != ca.n() {
        violations.push(ViolationKind::WrongLength {
            expected: ca.n(),
            got: phi.len(),
        });
        return Validation {
            valid: false,
            violations,
        };
    }
    for v in 0..ca.n() {
        if let Some(c) = phi.get(v) {
            if ca.list(v).binary_search(&c).is_err() {
                violations.push(ViolationKind::NotInList { vertex: v, color: c });
            }
        }
    }
    for (u, v) in ca.base().edges() {
        if let (Some(cu), Some(cv)) = (phi.get(u), phi.get(v)) {
            if ca.conflicts(u, cu, v, cv) {
                violations.push(ViolationKind::MatchedEdge { u, v, cu, cv });
            }
        }
    }
    Validation {
        valid: violations.is_empty(),
        violations,
    }
}

/// Per-vertex colour renaming. `forward[v]` maps original colours to view
/// colours; vertices absent from the map are unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pub forward: BTreeMap<usize, BTreeMap<Color, Color>>,
}

impl Relabeling {
    pub fn map(&self, v: usize, c: Color) -> Color {
        self.forward.get(&v).and_then(|m| m.get(&c)).copied().unwrap_or(c)
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            forward: self
                .forward
                .iter()
                .map(|(&v, m)| (v, m.iter().map(|(&a, &b)| (b, a)).collect()))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.values().all(|m| m.iter().all(|(a, b)| a == b))
    }

    /// Applies the renaming to an assignment.
    pub fn apply(&self, ca: &CorrespondenceAssignment) -> CorrespondenceAssignment {
        let lists = (0..ca.n())
            .map(|v| ca.list(v).iter().map(|&c| self.map(v, c)).collect())
            .collect();
        let matchings: Vec<_> = ca
            .matchings()
            .map(|((u, v), m)| {
                (
                    (u, v),
                    m.pairs()
                        .iter()
                        .map(|&(a, b)| (self.map(u, a), self.map(v, b)))
                        .collect(),
                )
            })
            .collect();
        CorrespondenceAssignment::new(ca.base().clone(), lists, matchings).expect("renaming preserves invariants")
    }

    pub fn apply_coloring(&self, phi: &PartialColoring) -> PartialColoring {
        PartialColoring::from_vec(
            phi.as_slice()
                .iter()
                .enumerate()
                .map(|(v, c)| c.map(|c| self.map(v, c)))
                .collect(),
        )
    }
}

/// Renames colours of the neighbours of `u` so that every matching at `u`
/// becomes diagonal: `(u, c)` is only ever matched to `(v, c)`. Colours of a
/// neighbour not matched towards `u` keep their label unless it is taken, in
/// which case they get fresh labels above every colour in use.
pub fn relabel_towards(ca: &CorrespondenceAssignment, u: usize) -> (CorrespondenceAssignment, Relabeling) {
    let max_color = ca.lists().iter().flatten().copied().max().unwrap_or(0);
    let mut forward = BTreeMap::new();
    for v in ca.base().neighbors(u) {
        let mut map = BTreeMap::new();
        for &cu in ca.list(u) {
            if let Some(cv) = ca.partner(u, cu, v) {
                map.insert(cv, cu);
            }
        }
        let taken: std::collections::BTreeSet<Color> = map.values().copied().collect();
        let mut fresh = max_color;
        for &cv in ca.list(v) {
            if map.contains_key(&cv) {
                continue;
            }
            if taken.contains(&cv) {
                fresh += 1;
                map.insert(cv, fresh);
            } else {
                map.insert(cv, cv);
            }
        }
        forward.insert(v, map);
    }
    let relabel = Relabeling { forward };
    (relabel.apply(ca), relabel)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2(pairs: Vec<(Color, Color)>) -> CorrespondenceAssignment {
        CorrespondenceAssignment::new(Graph::complete(2), vec![vec![1, 2], vec![1, 2]], [((0, 1), pairs)]).unwrap()
    }

    #[test]
    fn random_assignment_basics() {
        let ca = random_assignment(&Graph::complete(3), 1, Seed(4)).unwrap();
        for (_, m) in ca.matchings() {
            assert_eq!(m.pairs(), &[(1, 1)]);
        }
        assert!(random_assignment(&Graph::complete(3), 0, Seed(4)).is_err());
        let big = random_assignment(&Graph::complete(5), 6, Seed(1)).unwrap();
        assert!(big.is_ell_assignment(6));
        assert!(big.matchings().all(|(_, m)| m.len() == 6));
        assert_eq!(big, random_assignment(&Graph::complete(5), 6, Seed(1)).unwrap());
    }

    #[test]
    fn k2_matching_frequencies() {
        let trials = 10_000;
        let identity = (0..trials)
            .filter(|&s| {
                let ca = random_assignment(&Graph::complete(2), 2, Seed(s)).unwrap();
                ca.matching(0, 1).unwrap().pairs() == [(1, 1), (2, 2)]
            })
            .count();
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((identity as f64 - trials as f64 / 2.0).abs() <= 5.0 * sigma);
    }

    #[test]
    fn invariants_enforced() {
        let g = Graph::complete(2);
        let two = || vec![vec![1, 2], vec![1, 2]];
        assert!(CorrespondenceAssignment::new(g.clone(), two(), [((0, 1), vec![(1, 1), (1, 2)])]).is_err());
        assert!(CorrespondenceAssignment::new(g.clone(), two(), [((0, 1), vec![(1, 3)])]).is_err());
        assert!(CorrespondenceAssignment::new(Graph::empty(2), two(), [((0, 1), vec![])]).is_err());
        assert!(CorrespondenceAssignment::new(g.clone(), vec![vec![1, 1], vec![2]], []).is_err());
        // reversed orientation is normalised
        let ca = CorrespondenceAssignment::new(g, two(), [((1, 0), vec![(2, 1)])]).unwrap();
        assert_eq!(ca.matching(0, 1).unwrap().pairs(), &[(1, 2)]);
        assert_eq!(ca.partner(1, 2, 0), Some(1));
        assert_eq!(ca.partner(0, 1, 1), Some(2));
    }

    #[test]
    fn cover_graph_examples() {
        let cg = build_cover_graph(&k2(vec![(1, 1), (2, 2)]));
        assert_eq!(cg.nodes(), &[(0, 1), (0, 2), (1, 1), (1, 2)]);
        assert_eq!(cg.graph.edges(), vec![(0, 2), (1, 3)]);

        let e = from_lists(&Graph::empty(3), vec![vec![1, 2]; 3]).unwrap();
        assert_eq!(build_cover_graph(&e).graph.edge_count(), 0);

        let k3 = random_assignment(&Graph::complete(3), 1, Seed(0)).unwrap();
        assert_eq!(build_cover_graph(&k3).graph, Graph::complete(3));
    }

    #[test]
    fn availability_examples() {
        let id = k2(vec![(1, 1), (2, 2)]);
        assert_eq!(available_colors(&id, &PartialColoring::empty(2), 0), vec![1, 2]);
        let phi = PartialColoring::from_vec(vec![None, Some(1)]);
        assert_eq!(available_colors(&id, &phi, 0), vec![2]);
        let swap = k2(vec![(1, 2), (2, 1)]);
        assert_eq!(available_colors(&swap, &phi, 0), vec![1]);
    }

    #[test]
    fn validate_examples() {
        let id = k2(vec![(1, 1), (2, 2)]);
        assert!(validate(&id, &PartialColoring::empty(2)).valid);
        let bad = validate(&id, &PartialColoring::from_vec(vec![Some(1), Some(1)]));
        assert!(!bad.valid);
        assert_eq!(
            bad.violations,
            vec![ViolationKind::MatchedEdge {
                u: 0,
                v: 1,
                cu: 1,
                cv: 1
            }]
        );
        assert!(validate(&id, &PartialColoring::from_vec(vec![Some(1), Some(2)])).valid);
        let out = validate(&id, &PartialColoring::from_vec(vec![Some(3), None]));
        assert_eq!(out.violations, vec![ViolationKind::NotInList { vertex: 0, color: 3 }]);
    }

    #[test]
    fn relabel_examples() {
        let swap = k2(vec![(1, 2), (2, 1)]);
        let (view, perm) = relabel_towards(&swap, 0);
        assert_eq!(view.matching(0, 1).unwrap().pairs(), &[(1, 1), (2, 2)]);
        assert_eq!(perm.map(1, 1), 2);
        assert_eq!(perm.map(1, 2), 1);
        assert_eq!(perm.inverse().apply(&view), swap);

        let id = k2(vec![(1, 1), (2, 2)]);
        let (view, perm) = relabel_towards(&id, 0);
        assert!(perm.is_identity());
        assert_eq!(view, id);

        // unmatched colour whose label is taken gets a fresh one
        let ca = CorrespondenceAssignment::new(
            Graph::complete(2),
            vec![vec![1, 2], vec![2, 7]],
            [((0, 1), vec![(2, 7)])],
        )
        .unwrap();
        let (view, perm) = relabel_towards(&ca, 0);
        assert_eq!(view.matching(0, 1).unwrap().pairs(), &[(2, 2)]);
        assert_eq!(view.list(1), &[2, 8]);
        assert_eq!(perm.inverse().apply(&view), ca);
    }

    #[test]
    fn plausible_sets() {
        let ca = random_assignment(&Graph::complete(4), 3, Seed(2)).unwrap();
        let cg = build_cover_graph(&ca);
        let a = cg.node_index(0, 1).unwrap();
        let b = cg.node_index(1, 1).unwrap();
        let c = cg.node_index(0, 2).unwrap();
        assert!(is_plausible(&cg, &[a, b]));
        assert!(!is_plausible(&cg, &[a, c]));
        for i in 0..cg.nodes().len() {
            let nb: Vec<usize> = cg.graph.neighbors(i).collect();
            assert!(is_plausible(&cg, &nb));
        }
    }

    #[test]
    fn assignment_file_roundtrip() {
        let ca = random_assignment(&Graph::cycle(5), 3, Seed(8)).unwrap();
        let file = ca.to_file();
        let json = serde_json::to_string(&file).unwrap();
        let back: AssignmentFile = serde_json::from_str(&json).unwrap();
        assert_eq!(CorrespondenceAssignment::from_file(Graph::cycle(5), &back).unwrap(), ca);

        let mut broken = file.clone();
        broken.lists[0].clear();
        assert!(matches!(
            CorrespondenceAssignment::from_file(Graph::cycle(5), &broken),
            Err(Error::Load(_))
        ));
        let mut broken = file;
        broken.matchings[0].pairs.push([1, 1]);
        assert!(CorrespondenceAssignment::from_file(Graph::cycle(5), &broken).is_err());
    }
}
