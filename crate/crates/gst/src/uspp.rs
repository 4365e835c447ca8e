//! The unique simple path property and the machinery built on it:
//! bold arrows, sloops, rank functions, cutting and closure.
//!
//! A rooted graph has the property when every vertex is the target of
//! exactly one simple path from the root; equivalently it admits a
//! unique directed spanning tree, and every non-tree edge falls back
//! onto the geodesic of its source.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::digraph::{
    simple_paths, spanning_tree, strong_components, DirectedGraph, Frame, Path, RootedGraph,
    SpanningTree, Subgraph,
};

#[derive(Debug, Error)]
pub enum UsppError {
    #[error("edge {0} is a tree edge, not a bold arrow")]
    NotBold(usize),
    #[error("rank is not a bijection onto an initial interval at vertex {0}")]
    BadRank(usize),
    #[error("subgraph is not contained in the tree-downset of {0}")]
    NotBelow(usize),
    #[error("rooted graph does not have the unique simple path property")]
    NoUspp,
}

/// Certificate that a rooted graph has the unique simple path property:
/// its unique spanning tree and the bold arrows outside it.
#[derive(Debug, Clone)]
pub struct UsppData {
    pub root: usize,
    pub tree: SpanningTree,
    /// Edges outside the spanning tree, ascending by id.
    pub bold: Vec<usize>,
    is_tree_edge: Vec<bool>,
}

impl UsppData {
    pub fn is_bold(&self, e: usize) -> bool {
        !self.is_tree_edge[e]
    }

    /// The geodesic from the root to `v`.
    pub fn geodesic(&self, g: &DirectedGraph, v: usize) -> Path {
        self.tree.geodesic(g, v)
    }

    /// Bold arrows whose tip is `v`, ascending by id.
    pub fn bold_into(&self, g: &DirectedGraph, v: usize) -> Vec<usize> {
        self.bold.iter().copied().filter(|&e| g.term(e) == v).collect()
    }
}

/// Two distinct simple paths from the root to a common vertex.
#[derive(Debug, Clone)]
pub struct UsppCounterexample {
    pub vertex: usize,
    pub first: Path,
    pub second: Path,
}

/// Decides the unique simple path property.  The breadth-first spanning
/// tree is checked for the fallback condition (every non-tree edge ends
/// on the geodesic of its source); when the graph has a unique spanning
/// tree it must be this one, so failure at any edge yields two distinct
/// simple paths as a counterexample.
pub fn has_uspp(g: &RootedGraph) -> Result<UsppData, UsppCounterexample> {
    let tree = spanning_tree(g);
    let mut is_tree_edge = vec![false; g.graph.num_edges()];
    for &e in &tree.tree_edges {
        is_tree_edge[e] = true;
    }
    let mut bold = Vec::new();
    for e in g.graph.edges() {
        if is_tree_edge[e] {
            continue;
        }
        let tip = g.graph.term(e);
        if !tree.le_tree(&g.graph, g.graph.init(e), tip) {
            // The tip is not visited by the geodesic to the source, so
            // the geodesic extended by e is a second simple path.
            let mut second = tree.geodesic(&g.graph, g.graph.init(e));
            second.edges.push(e);
            debug_assert!(second.is_simple(&g.graph));
            return Err(UsppCounterexample {
                vertex: tip,
                first: tree.geodesic(&g.graph, tip),
                second,
            });
        }
        bold.push(e);
    }
    Ok(UsppData { root: g.root, tree, bold, is_tree_edge })
}

/// The three characterizations of the property, each evaluated
/// independently: unique simple paths (by enumeration), unique spanning
/// tree (by enumeration), and the fallback condition on the
/// breadth-first tree.
pub fn uspp_characterizations(g: &RootedGraph) -> (bool, bool, bool) {
    let by_paths = unique_simple_paths(g);
    let by_trees = count_spanning_trees_capped(g, 2) == 1;
    let by_fallback = has_uspp(g).is_ok();
    (by_paths, by_trees, by_fallback)
}

/// Evaluates the three characterizations of the property independently
/// and checks that they agree.
///
/// Panics when the characterizations disagree; that would indicate a
/// bug in one of the implementations.
pub fn check_uspp_equivalence(g: &RootedGraph) -> bool {
    let (by_paths, by_trees, by_fallback) = uspp_characterizations(g);
    assert_eq!(by_paths, by_trees, "simple-path and spanning-tree characterizations disagree");
    assert_eq!(by_paths, by_fallback, "simple-path and fallback characterizations disagree");
    by_paths
}

fn unique_simple_paths(g: &RootedGraph) -> bool {
    g.graph.vertices().all(|v| {
        simple_paths(&g.graph, g.root, v, 2).map(|ps| ps.len() == 1).unwrap_or(false)
    })
}

/// Counts directed spanning trees rooted at the root, stopping at `cap`.
/// Each non-root vertex picks an incoming edge; the choice is a spanning
/// tree iff no directed cycle arises among the picks.
fn count_spanning_trees_capped(g: &RootedGraph, cap: usize) -> usize {
    let n = g.graph.num_vertices();
    let order: Vec<usize> = (0..n).filter(|&v| v != g.root).collect();
    let mut pick: Vec<Option<usize>> = vec![None; n];
    fn acyclic(g: &RootedGraph, pick: &[Option<usize>], start: usize) -> bool {
        // Walk parent pointers from start; reaching the root or an
        // unassigned vertex is fine, repeating a vertex is a cycle.
        let mut seen = BTreeSet::new();
        let mut at = start;
        loop {
            if at == g.root || !seen.insert(at) {
                return at == g.root || false;
            }
            match pick[at] {
                Some(e) => at = g.graph.init(e),
                None => return true,
            }
        }
    }
    fn go(
        g: &RootedGraph,
        order: &[usize],
        i: usize,
        pick: &mut Vec<Option<usize>>,
        cap: usize,
        count: &mut usize,
    ) {
        if *count >= cap {
            return;
        }
        if i == order.len() {
            *count += 1;
            return;
        }
        let v = order[i];
        for &e in g.graph.in_edges(v) {
            if g.graph.init(e) == v {
                continue; // loop edge cannot enter a tree
            }
            pick[v] = Some(e);
            if acyclic(g, pick, v) {
                go(g, order, i + 1, pick, cap, count);
            }
            pick[v] = None;
            if *count >= cap {
                return;
            }
        }
    }
    let mut count = 0;
    go(g, &order, 0, &mut pick, cap, &mut count);
    count
}

/// The sloop of a bold arrow: the geodesic to its source followed by the
/// arrow itself.
pub fn sloop(g: &DirectedGraph, u: &UsppData, e: usize) -> Result<Path, UsppError> {
    if !u.is_bold(e) {
        return Err(UsppError::NotBold(e));
    }
    let mut p = u.geodesic(g, g.init(e));
    p.edges.push(e);
    Ok(p)
}

/// The loop of a sloop: the simple circuit from the tip of the arrow
/// along the tree to its source, closed by the arrow.
pub fn loop_of(g: &DirectedGraph, u: &UsppData, e: usize) -> Result<Path, UsppError> {
    if !u.is_bold(e) {
        return Err(UsppError::NotBold(e));
    }
    let mut p = u
        .tree
        .geodesic_between(g, g.term(e), g.init(e))
        .expect("bold arrow tips lie on the geodesic of their source");
    p.edges.push(e);
    debug_assert!(p.is_simple_circuit(g));
    Ok(p)
}

/// A rank function totally orders the bold arrows arriving at each
/// vertex: on each such bundle it must be a bijection onto 0..count.
#[derive(Debug, Clone, Default)]
pub struct GeometricRank {
    pub rank: BTreeMap<usize, usize>,
}

impl GeometricRank {
    pub fn get(&self, e: usize) -> usize {
        self.rank[&e]
    }
}

pub fn validate_rank(g: &DirectedGraph, u: &UsppData, r: &GeometricRank) -> Result<(), UsppError> {
    for v in g.vertices() {
        let bundle = u.bold_into(g, v);
        let mut values: Vec<usize> = Vec::with_capacity(bundle.len());
        for &e in &bundle {
            match r.rank.get(&e) {
                Some(&x) => values.push(x),
                None => return Err(UsppError::BadRank(v)),
            }
        }
        values.sort_unstable();
        if values.iter().enumerate().any(|(i, &x)| i != x) {
            return Err(UsppError::BadRank(v));
        }
    }
    Ok(())
}

/// Default rank: bold arrows at each vertex ordered by the shortlex of
/// their loop labels when labels are supplied, otherwise by edge id.
pub fn default_rank(
    g: &DirectedGraph,
    u: &UsppData,
    labels: Option<&[u8]>,
) -> GeometricRank {
    let mut rank = BTreeMap::new();
    for v in g.vertices() {
        let mut bundle = u.bold_into(g, v);
        if let Some(labels) = labels {
            bundle.sort_by_key(|&e| {
                let lp = loop_of(g, u, e).expect("bundle edges are bold");
                let word: Vec<u8> = lp.edges.iter().map(|&x| labels[x]).collect();
                (word.len(), word, e)
            });
        }
        for (i, &e) in bundle.iter().enumerate() {
            rank.insert(e, i);
        }
    }
    GeometricRank { rank }
}

/// Outcome of comparing two bold arrows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoldOrd {
    Below,
    Above,
    Incomparable,
}

/// The order on bold arrows: `e` below `f` when the tip of `f` lies in a
/// strictly lower strong component; at equal components when the tip of
/// `e` is strictly below in the tree order; at equal tips by rank.
pub fn bold_order(
    g: &DirectedGraph,
    u: &UsppData,
    frame: &Frame,
    r: &GeometricRank,
    e: usize,
    f: usize,
) -> BoldOrd {
    if e == f {
        return BoldOrd::Incomparable;
    }
    let te = g.term(e);
    let tf = g.term(f);
    let ce = frame.component_of[te];
    let cf = frame.component_of[tf];
    if ce != cf {
        if frame.comp_reaches(ce, cf) {
            return BoldOrd::Below;
        }
        if frame.comp_reaches(cf, ce) {
            return BoldOrd::Above;
        }
        return BoldOrd::Incomparable;
    }
    if te != tf {
        if u.tree.le_tree(g, te, tf) {
            return BoldOrd::Below;
        }
        if u.tree.le_tree(g, tf, te) {
            return BoldOrd::Above;
        }
        return BoldOrd::Incomparable;
    }
    if r.get(e) < r.get(f) {
        BoldOrd::Below
    } else {
        BoldOrd::Above
    }
}

/// Result of cutting a rooted graph at its root: every edge into the
/// root is redirected to a fresh vertex of its own.
#[derive(Debug, Clone)]
pub struct CutGraph {
    pub graph: RootedGraph,
    /// For each edge that ended at the root, the fresh vertex it now
    /// ends at.  Iteration order follows edge ids.
    pub new_vertex_for_edge: BTreeMap<usize, usize>,
}

/// Cuts a rooted graph at its root, moving the end of every edge in
/// `term⁻¹(root)` to a fresh vertex.  Edge ids are preserved.
pub fn cut_graph(g: &RootedGraph) -> CutGraph {
    let n = g.graph.num_vertices();
    let incoming: Vec<usize> = g
        .graph
        .edges()
        .filter(|&e| g.graph.term(e) == g.root)
        .collect();
    let mut new_vertex_for_edge = BTreeMap::new();
    let mut out = DirectedGraph::new(n + incoming.len());
    for (i, &e) in incoming.iter().enumerate() {
        new_vertex_for_edge.insert(e, n + i);
    }
    for e in g.graph.edges() {
        let to = new_vertex_for_edge.get(&e).copied().unwrap_or(g.graph.term(e));
        out.add_edge(g.graph.init(e), to);
    }
    let graph = RootedGraph::new(out, g.root).expect("cutting preserves rootedness");
    CutGraph { graph, new_vertex_for_edge }
}

/// The full subgraph on the tree-descendants of `v`.
pub fn downset(g: &DirectedGraph, u: &UsppData, v: usize) -> Subgraph {
    let vs = g.vertices().filter(|&w| u.tree.le_tree(g, w, v));
    Subgraph::full(g, vs)
}

/// The full subgraph on the vertices that can reach `w`.
pub fn upset(g: &DirectedGraph, w: usize) -> Subgraph {
    let vs: Vec<usize> = g.vertices().filter(|&q| g.accessible(q, w)).collect();
    Subgraph::full(g, vs)
}

/// Whether `sub` is closed with respect to `base`: it contains `base`,
/// lies in the tree-downset of `base`, contains the geodesic from `base`
/// to each of its vertices, and contains every bold arrow ending at one
/// of its vertices other than `base`.
pub fn is_closed(g: &DirectedGraph, u: &UsppData, sub: &Subgraph, base: usize) -> bool {
    if !sub.vertices.contains(&base) {
        return false;
    }
    if !sub.vertices.iter().all(|&v| u.tree.le_tree(g, v, base)) {
        return false;
    }
    for &v in &sub.vertices {
        let geo = u.tree.geodesic_between(g, base, v).expect("v lies below base");
        if !sub.contains_subgraph(&Subgraph::of_path(g, &geo)) {
            return false;
        }
    }
    for &e in &u.bold {
        let tip = g.term(e);
        if tip != base && sub.vertices.contains(&tip) && !sub.edges.contains(&e) {
            return false;
        }
    }
    true
}

/// Least closed subgraph containing `sub`, with respect to `base`.
/// The two closure axioms are iterated in a fixed order (geodesics,
/// then bold arrows) until stable.
pub fn closure(
    g: &DirectedGraph,
    u: &UsppData,
    sub: &Subgraph,
    base: usize,
) -> Result<Subgraph, UsppError> {
    let mut acc = sub.clone();
    acc.vertices.insert(base);
    for &v in &acc.vertices {
        if !u.tree.le_tree(g, v, base) {
            return Err(UsppError::NotBelow(base));
        }
    }
    loop {
        let mut changed = false;
        let vs: Vec<usize> = acc.vertices.iter().copied().collect();
        for v in vs {
            let geo = u.tree.geodesic_between(g, base, v).expect("v lies below base");
            for &e in &geo.edges {
                if acc.edges.insert(e) {
                    changed = true;
                }
                if acc.vertices.insert(g.term(e)) {
                    changed = true;
                }
            }
        }
        for &e in &u.bold {
            let tip = g.term(e);
            if tip != base && acc.vertices.contains(&tip) && !acc.edges.contains(&e) {
                acc.insert_edge(g, e);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(is_closed(g, u, &acc, base));
    Ok(acc)
}

/// The cut sloop of a bold arrow `e`: the closure of its loop at its
/// tip, cut there.  The result is rooted at the copy of the tip, has a
/// single fresh vertex, and is linear.
#[derive(Debug, Clone)]
pub struct CutSloop {
    pub graph: RootedGraph,
    /// The fresh vertex created by the cut.
    pub u_prime: usize,
    /// Map from the new vertex ids to ambient vertex ids (the fresh
    /// vertex maps to the tip of `e`).
    pub orig_vertex: Vec<usize>,
    /// Map from new edge ids to ambient edge ids.
    pub orig_edge: Vec<usize>,
}

pub fn cut_sloop(g: &DirectedGraph, u: &UsppData, e: usize) -> Result<CutSloop, UsppError> {
    let tip = g.term(e);
    let lp = loop_of(g, u, e)?;
    let closed = closure(g, u, &Subgraph::of_path(g, &lp), tip)?;
    let (sub, vmap, emap) = closed.extract(g);
    let root = vmap.iter().position(|&v| v == tip).expect("tip is in its closure");
    let rooted = RootedGraph::new(sub, root).expect("closed subgraphs are rooted at their base");
    let cut = cut_graph(&rooted);
    assert_eq!(
        cut.new_vertex_for_edge.len(),
        1,
        "the bold arrow is the only edge of its closed loop ending at the tip"
    );
    let (&cut_edge, &u_prime) = cut.new_vertex_for_edge.iter().next().unwrap();
    debug_assert_eq!(emap[cut_edge], e);
    let mut orig_vertex = vmap;
    orig_vertex.push(tip);
    Ok(CutSloop { graph: cut.graph, u_prime, orig_vertex, orig_edge: emap })
}

/// The strong component of `u` inside its tree-downset after deleting
/// the bold arrows into `u` other than `e`.  By the structure theory of
/// cut sloops this equals the closure of the loop of `e`; it serves as
/// the independent oracle for that computation.
pub fn loop_component(g: &DirectedGraph, u: &UsppData, e: usize) -> Subgraph {
    let tip = g.term(e);
    let mut sub = downset(g, u, tip);
    for &f in &u.bold {
        if f != e && g.term(f) == tip {
            sub.edges.remove(&f);
        }
    }
    let (h, vmap, emap) = sub.extract(g);
    let frame = strong_components(&h);
    let root_local = vmap.iter().position(|&v| v == tip).unwrap();
    let comp = frame.component_of[root_local];
    let vertices: BTreeSet<usize> = frame.components[comp]
        .vertices
        .iter()
        .map(|&v| vmap[v])
        .collect();
    let edges: BTreeSet<usize> = frame.components[comp]
        .edges
        .iter()
        .map(|&x| emap[x])
        .collect();
    Subgraph { vertices, edges }
}
