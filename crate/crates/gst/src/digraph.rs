//! Directed graphs with explicit edge identities and their topology:
//! strong components, frames, linearity, spanning trees and coverings.
//!
//! Vertices and edges are dense `usize` ids.  Parallel edges and loop
//! edges are permitted, so edges are first-class objects rather than
//! vertex pairs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} is not reachable from the root")]
    NotRooted(usize),
    #[error("graph is not linear")]
    NotLinear,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("edge {0} out of range")]
    BadEdge(usize),
    #[error("path enumeration exceeded cap of {0}")]
    CapExceeded(usize),
    #[error("invalid path: edge {edge} does not continue from vertex {at}")]
    BrokenPath { edge: usize, at: usize },
}

/// A finite directed graph: a vertex set, an edge set and the two
/// incidence maps picking out the initial and terminal vertex of each
/// edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    init: Vec<usize>,
    term: Vec<usize>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(num_vertices: usize) -> Self {
        DirectedGraph {
            init: Vec::new(),
            term: Vec::new(),
            out: vec![Vec::new(); num_vertices],
            inn: vec![Vec::new(); num_vertices],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> usize {
        assert!(from < self.num_vertices() && to < self.num_vertices());
        let e = self.init.len();
        self.init.push(from);
        self.term.push(to);
        self.out[from].push(e);
        self.inn[to].push(e);
        e
    }

    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    pub fn num_edges(&self) -> usize {
        self.init.len()
    }

    pub fn init(&self, e: usize) -> usize {
        self.init[e]
    }

    pub fn term(&self, e: usize) -> usize {
        self.term[e]
    }

    /// Star of `v`: the edges leaving `v`, in the graph's stored order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.num_vertices()
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> {
        0..self.num_edges()
    }

    /// Re-sorts each out-edge list by the given key.  Breadth-first
    /// constructions visit out-edges in stored order, so this pins down
    /// deterministic spanning trees (automata sort by label, then id).
    pub fn sort_out_edges_by<K: Ord>(&mut self, key: impl Fn(usize) -> K) {
        for list in &mut self.out {
            list.sort_by_key(|&e| key(e));
        }
    }

    /// Vertices reachable from `v` by directed paths (including `v`).
    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::new();
        seen[v] = true;
        queue.push_back(v);
        while let Some(x) = queue.pop_front() {
            for &e in &self.out[x] {
                let y = self.term[e];
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// `u ≺ w` in the accessibility order: some path runs from `w` to `u`.
    pub fn accessible(&self, from: usize, to: usize) -> bool {
        self.reachable_from(from)[to]
    }
}

/// A graph together with a root from which every vertex is reachable.
#[derive(Debug, Clone)]
pub struct RootedGraph {
    pub graph: DirectedGraph,
    pub root: usize,
}

impl RootedGraph {
    /// Checks the rootedness invariant, reporting the first unreachable
    /// vertex on failure.
    pub fn new(graph: DirectedGraph, root: usize) -> Result<Self, GraphError> {
        if root >= graph.num_vertices() {
            return Err(GraphError::BadVertex(root));
        }
        let seen = graph.reachable_from(root);
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(GraphError::NotRooted(v));
        }
        Ok(RootedGraph { graph, root })
    }
}

/// A directed path: a start vertex and a sequence of consecutively
/// incident edges.  The empty path at a vertex is allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn empty(at: usize) -> Self {
        Path { start: at, edges: Vec::new() }
    }

    pub fn new(g: &DirectedGraph, start: usize, edges: Vec<usize>) -> Result<Self, GraphError> {
        let mut at = start;
        for &e in &edges {
            if e >= g.num_edges() {
                return Err(GraphError::BadEdge(e));
            }
            if g.init(e) != at {
                return Err(GraphError::BrokenPath { edge: e, at });
            }
            at = g.term(e);
        }
        Ok(Path { start, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, g: &DirectedGraph) -> usize {
        self.edges.last().map_or(self.start, |&e| g.term(e))
    }

    /// Vertex sequence visited, of length `len() + 1`.
    pub fn vertices(&self, g: &DirectedGraph) -> Vec<usize> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(self.start);
        for &e in &self.edges {
            vs.push(g.term(e));
        }
        vs
    }

    /// A path is simple when it visits no vertex twice.
    pub fn is_simple(&self, g: &DirectedGraph) -> bool {
        let vs = self.vertices(g);
        let set: BTreeSet<usize> = vs.iter().copied().collect();
        set.len() == vs.len()
    }

    /// A circuit is simple if its only repeated vertex is the endpoint.
    pub fn is_simple_circuit(&self, g: &DirectedGraph) -> bool {
        if self.is_empty() || self.end(g) != self.start {
            return false;
        }
        let vs = self.vertices(g);
        let interior: BTreeSet<usize> = vs[..vs.len() - 1].iter().copied().collect();
        interior.len() == vs.len() - 1
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Path { start: self.start, edges }
    }
}

/// One strong component: its vertices and the edges induced on them.
#[derive(Debug, Clone)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// A component with at least one edge (possibly a loop).
    pub nontrivial: bool,
}

/// The frame of a graph: strong components with the transition edges
/// between them.  Components are listed in topological order, index 0
/// highest in the accessibility order.
#[derive(Debug, Clone)]
pub struct Frame {
    pub components: Vec<Component>,
    pub component_of: Vec<usize>,
    pub transition_edges: Vec<usize>,
    /// `reach[i][j]` iff there is a path from component i to component j.
    reach: Vec<Vec<bool>>,
}

impl Frame {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Component order: `C ≥ C'` iff a path runs from C into C'.
    pub fn comp_reaches(&self, i: usize, j: usize) -> bool {
        self.reach[i][j]
    }

    pub fn is_transition(&self, e: usize) -> bool {
        self.transition_edges.contains(&e)
    }

    /// The strong-component order is total.
    pub fn is_quasilinear(&self) -> bool {
        // Components are already topologically sorted, so totality is
        // equivalent to each consecutive pair being comparable.
        (1..self.components.len()).all(|i| self.reach[i - 1][i])
    }

    /// Quasilinear and the transition edges form a chain in the edge
    /// preorder (e before f iff some path epf exists).
    pub fn is_linear(&self, g: &DirectedGraph) -> bool {
        if !self.is_quasilinear() {
            return false;
        }
        for (a, &e) in self.transition_edges.iter().enumerate() {
            for &f in self.transition_edges.iter().skip(a + 1) {
                let ef = self.reach[self.component_of[g.term(e)]][self.component_of[g.init(f)]];
                let fe = self.reach[self.component_of[g.term(f)]][self.component_of[g.init(e)]];
                if !ef && !fe {
                    return false;
                }
            }
        }
        true
    }
}

/// Strong components via Tarjan's algorithm, then the condensation data.
pub fn strong_components(g: &DirectedGraph) -> Frame {
    let n = g.num_vertices();
    let mut state = Tarjan {
        g,
        index: 0,
        idx: vec![usize::MAX; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp_of: vec![usize::MAX; n],
        num_comps: 0,
    };
    for v in 0..n {
        if state.idx[v] == usize::MAX {
            state.connect(v);
        }
    }
    let Tarjan { comp_of, num_comps, .. } = state;

    // Tarjan emits components in reverse topological order; flip so that
    // index 0 is the top of the accessibility order.
    let comp_of: Vec<usize> = comp_of.iter().map(|&c| num_comps - 1 - c).collect();

    let mut components: Vec<Component> = (0..num_comps)
        .map(|_| Component { vertices: Vec::new(), edges: Vec::new(), nontrivial: false })
        .collect();
    for v in 0..n {
        components[comp_of[v]].vertices.push(v);
    }
    let mut transition_edges = Vec::new();
    for e in 0..g.num_edges() {
        let ci = comp_of[g.init(e)];
        let ct = comp_of[g.term(e)];
        if ci == ct {
            components[ci].edges.push(e);
            components[ci].nontrivial = true;
        } else {
            transition_edges.push(e);
        }
    }

    let mut reach = vec![vec![false; num_comps]; num_comps];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in 0..g.num_edges() {
        reach[comp_of[g.init(e)]][comp_of[g.term(e)]] = true;
    }
    // Transitive closure in topological order.
    for i in (0..num_comps).rev() {
        for j in 0..num_comps {
            if i != j && reach[i][j] {
                for k in 0..num_comps {
                    if reach[j][k] {
                        reach[i][k] = true;
                    }
                }
            }
        }
    }

    Frame { components, component_of: comp_of, transition_edges, reach }
}

struct Tarjan<'a> {
    g: &'a DirectedGraph,
    index: usize,
    idx: Vec<usize>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comp_of: Vec<usize>,
    num_comps: usize,
}

impl Tarjan<'_> {
    fn connect(&mut self, v: usize) {
        // Iterative to keep recursion off large graphs.
        enum Step {
            Enter(usize),
            Resume(usize, usize),
        }
        let mut work = vec![Step::Enter(v)];
        while let Some(step) = work.pop() {
            match step {
                Step::Enter(v) => {
                    self.idx[v] = self.index;
                    self.low[v] = self.index;
                    self.index += 1;
                    self.stack.push(v);
                    self.on_stack[v] = true;
                    work.push(Step::Resume(v, 0));
                }
                Step::Resume(v, mut i) => {
                    let mut descend = None;
                    while i < self.g.out[v].len() {
                        let w = self.g.term[self.g.out[v][i]];
                        i += 1;
                        if self.idx[w] == usize::MAX {
                            descend = Some(w);
                            break;
                        } else if self.on_stack[w] {
                            self.low[v] = self.low[v].min(self.idx[w]);
                        }
                    }
                    if let Some(w) = descend {
                        work.push(Step::Resume(v, i));
                        work.push(Step::Enter(w));
                        continue;
                    }
                    if self.low[v] == self.idx[v] {
                        loop {
                            let w = self.stack.pop().expect("tarjan stack underflow");
                            self.on_stack[w] = false;
                            self.comp_of[w] = self.num_comps;
                            if w == v {
                                break;
                            }
                        }
                        self.num_comps += 1;
                    }
                    // Propagate the low link to the parent frame.
                    if let Some(Step::Resume(p, _)) = work.last() {
                        let p = *p;
                        self.low[p] = self.low[p].min(self.low[v]);
                    }
                }
            }
        }
    }
}

pub fn is_quasilinear(g: &DirectedGraph) -> bool {
    strong_components(g).is_quasilinear()
}

pub fn is_linear(g: &DirectedGraph) -> bool {
    let fr = strong_components(g);
    fr.is_linear(g)
}

/// Entry and exit points of a finite linear graph.  With components
/// numbered `0..=k` from the top, the i-th transition edge runs from the
/// exit `q_{i-1}` of component i-1 to the entry `p_i` of component i.
/// The top component has no entry and the bottom one no exit.
#[derive(Debug, Clone)]
pub struct EntryExit {
    /// Transition edges, ordered from top to bottom.
    pub transitions: Vec<usize>,
    /// Per component: `p_i` (None for the top component).
    pub entry: Vec<Option<usize>>,
    /// Per component: `q_i` (None for the bottom component).
    pub exit: Vec<Option<usize>>,
}

pub fn entry_exit_points(g: &DirectedGraph, frame: &Frame) -> Result<EntryExit, GraphError> {
    if !frame.is_linear(g) {
        return Err(GraphError::NotLinear);
    }
    let k1 = frame.num_components();
    let mut transitions = frame.transition_edges.clone();
    transitions.sort_by_key(|&e| frame.component_of[g.term(e)]);
    debug_assert_eq!(transitions.len(), k1.saturating_sub(1));
    let mut entry = vec![None; k1];
    let mut exit = vec![None; k1];
    for (i, &e) in transitions.iter().enumerate() {
        debug_assert_eq!(frame.component_of[g.init(e)], i);
        debug_assert_eq!(frame.component_of[g.term(e)], i + 1);
        exit[i] = Some(g.init(e));
        entry[i + 1] = Some(g.term(e));
    }
    Ok(EntryExit { transitions, entry, exit })
}

/// All simple paths from `from` to `to`, aborting when more than `cap`
/// would be produced.
pub fn simple_paths(
    g: &DirectedGraph,
    from: usize,
    to: usize,
    cap: usize,
) -> Result<Vec<Path>, GraphError> {
    let mut found = Vec::new();
    let mut visited = vec![false; g.num_vertices()];
    let mut edges = Vec::new();
    visited[from] = true;
    dfs_simple(g, from, to, cap, &mut visited, &mut edges, &mut found)?;
    Ok(found)
}

fn dfs_simple(
    g: &DirectedGraph,
    at: usize,
    to: usize,
    cap: usize,
    visited: &mut Vec<bool>,
    edges: &mut Vec<usize>,
    found: &mut Vec<Path>,
) -> Result<(), GraphError> {
    if at == to {
        if found.len() >= cap {
            return Err(GraphError::CapExceeded(cap));
        }
        found.push(Path { start: if edges.is_empty() { to } else { g.init(edges[0]) }, edges: edges.clone() });
        // The empty path is the only simple path that may continue past
        // its target, and only when from == to; simple paths cannot
        // revisit `to`, so stop here unless we just started.
        if !edges.is_empty() || at != to {
            return Ok(());
        }
    }
    for &e in g.out_edges(at) {
        let w = g.term(e);
        if visited[w] {
            continue;
        }
        visited[w] = true;
        edges.push(e);
        dfs_simple(g, w, to, cap, visited, edges, found)?;
        edges.pop();
        visited[w] = false;
    }
    Ok(())
}

/// Quasi-bases of a linear graph: simple paths from `p` in the top
/// component to `q` in the bottom one (each necessarily uses every
/// transition edge).  `is_base` holds when the quasi-base is unique.
pub struct QuasiBases {
    pub paths: Vec<Path>,
    pub is_base: bool,
}

pub fn quasi_bases(
    g: &DirectedGraph,
    frame: &Frame,
    p: usize,
    q: usize,
    cap: usize,
) -> Result<QuasiBases, GraphError> {
    if !frame.is_linear(g) {
        return Err(GraphError::NotLinear);
    }
    assert_eq!(frame.component_of[p], 0, "p must lie in the top component");
    assert_eq!(frame.component_of[q], frame.num_components() - 1, "q must lie in the bottom component");
    let paths = simple_paths(g, p, q, cap)?;
    assert!(!paths.is_empty(), "a linear graph admits at least one quasi-base");
    for path in &paths {
        debug_assert!(frame.transition_edges.iter().all(|t| path.edges.contains(t)));
    }
    let is_base = paths.len() == 1;
    Ok(QuasiBases { paths, is_base })
}

/// A directed spanning tree of a rooted graph, built breadth-first with
/// out-edges taken in stored order, so the construction is deterministic.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    /// Tree edge entering each vertex (None at the root).
    pub parent_edge: Vec<Option<usize>>,
    /// Edge ids of the tree, in discovery order.
    pub tree_edges: Vec<usize>,
    /// Distance from the root along the tree.
    pub depth: Vec<usize>,
}

impl SpanningTree {
    pub fn contains_edge(&self, e: usize) -> bool {
        self.tree_edges.contains(&e)
    }

    /// The tree path from the root to `v`.
    pub fn geodesic(&self, g: &DirectedGraph, v: usize) -> Path {
        let mut edges = Vec::new();
        let mut at = v;
        while let Some(e) = self.parent_edge[at] {
            edges.push(e);
            at = g.init(e);
        }
        edges.reverse();
        Path { start: self.root, edges }
    }

    /// The tree path from `u` down to `v`, if `v` lies below `u`.
    pub fn geodesic_between(&self, g: &DirectedGraph, u: usize, v: usize) -> Option<Path> {
        let mut edges = Vec::new();
        let mut at = v;
        while at != u {
            let e = self.parent_edge[at]?;
            edges.push(e);
            at = g.init(e);
        }
        edges.reverse();
        Some(Path { start: u, edges })
    }

    /// Tree order: `v ≤_T u` iff `u` lies on the tree geodesic to `v`.
    pub fn le_tree(&self, g: &DirectedGraph, v: usize, u: usize) -> bool {
        let mut at = v;
        loop {
            if at == u {
                return true;
            }
            match self.parent_edge[at] {
                Some(e) => at = g.init(e),
                None => return false,
            }
        }
    }
}

pub fn spanning_tree(g: &RootedGraph) -> SpanningTree {
    let n = g.graph.num_vertices();
    let mut parent_edge = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut tree_edges = Vec::new();
    let mut queue = VecDeque::new();
    seen[g.root] = true;
    queue.push_back(g.root);
    while let Some(v) = queue.pop_front() {
        for &e in g.graph.out_edges(v) {
            let w = g.graph.term(e);
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(e);
                depth[w] = depth[v] + 1;
                tree_edges.push(e);
                queue.push_back(w);
            }
        }
    }
    SpanningTree { root: g.root, parent_edge, tree_edges, depth }
}

/// The universal directed cover truncated at path length `depth`:
/// vertices are the directed paths of length at most `depth` from the
/// root, edges extend a path of length under `depth` by one edge.
#[derive(Debug)]
pub struct TruncatedCover {
    pub cover: RootedGraph,
    /// Per cover vertex, the base path it denotes (edge-id sequence).
    pub vertex_paths: Vec<Vec<usize>>,
    /// Projection on vertices: the endpoint of the path.
    pub proj_v: Vec<usize>,
    /// Projection on edges.
    pub proj_e: Vec<usize>,
}

pub fn universal_cover_truncated(g: &RootedGraph, depth: usize) -> TruncatedCover {
    let mut vertex_paths: Vec<Vec<usize>> = vec![Vec::new()];
    let mut proj_v = vec![g.root];
    let mut edges: Vec<(usize, usize, usize)> = Vec::new(); // (from, to, base edge)
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &pv in &frontier {
            let end = proj_v[pv];
            for &e in g.graph.out_edges(end) {
                let mut path = vertex_paths[pv].clone();
                path.push(e);
                let nv = vertex_paths.len();
                vertex_paths.push(path);
                proj_v.push(g.graph.term(e));
                edges.push((pv, nv, e));
                next.push(nv);
            }
        }
        frontier = next;
    }
    let mut cover = DirectedGraph::new(vertex_paths.len());
    let mut proj_e = Vec::with_capacity(edges.len());
    for (from, to, base) in edges {
        cover.add_edge(from, to);
        proj_e.push(base);
    }
    let cover = RootedGraph::new(cover, 0).expect("cover is rooted by construction");
    TruncatedCover { cover, vertex_paths, proj_v, proj_e }
}

/// First-return loops at the root: non-empty loops of length at most
/// `maxlen` that visit the root only at their endpoints.  These freely
/// generate the fundamental monoid, filtered by length.
pub fn first_return_generators(g: &RootedGraph, maxlen: usize) -> Vec<Path> {
    let mut found = Vec::new();
    let mut edges = Vec::new();
    fn go(
        g: &DirectedGraph,
        root: usize,
        at: usize,
        maxlen: usize,
        edges: &mut Vec<usize>,
        found: &mut Vec<Path>,
    ) {
        if edges.len() >= maxlen {
            return;
        }
        for &e in g.out_edges(at) {
            let w = g.term(e);
            edges.push(e);
            if w == root {
                found.push(Path { start: root, edges: edges.clone() });
            } else {
                go(g, root, w, maxlen, edges, found);
            }
            edges.pop();
        }
    }
    go(&g.graph, g.root, g.root, maxlen, &mut edges, &mut found);
    found.sort();
    found
}

/// A pair of maps between graphs, not yet known to be a morphism.
#[derive(Debug, Clone)]
pub struct GraphMorphism {
    pub v_map: Vec<usize>,
    pub e_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismClass {
    /// Incidence fails at this edge.
    NotMorphism { edge: usize },
    /// A morphism that is not injective on some star.
    Morphism { star_clash: (usize, usize, usize) },
    /// Injective on every star but not a covering; the witness is either
    /// a vertex missed or a star that is not surjective.
    Immersion { missing: StarDefect },
    Covering,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarDefect {
    VertexNotHit(usize),
    EdgeNotLifted { vertex: usize, edge: usize },
}

/// Classifies a candidate morphism as covering, immersion, plain
/// morphism, or not a morphism at all, with a witness for the verdict.
pub fn classify_morphism(
    dom: &DirectedGraph,
    cod: &DirectedGraph,
    m: &GraphMorphism,
) -> MorphismClass {
    assert_eq!(m.v_map.len(), dom.num_vertices());
    assert_eq!(m.e_map.len(), dom.num_edges());
    for e in dom.edges() {
        let fe = m.e_map[e];
        if fe >= cod.num_edges()
            || m.v_map[dom.init(e)] != cod.init(fe)
            || m.v_map[dom.term(e)] != cod.term(fe)
        {
            return MorphismClass::NotMorphism { edge: e };
        }
    }
    // Injectivity on stars.
    for v in dom.vertices() {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for &e in dom.out_edges(v) {
            if let Some(&other) = seen.get(&m.e_map[e]) {
                return MorphismClass::Morphism { star_clash: (v, other, e) };
            }
            seen.insert(m.e_map[e], e);
        }
    }
    // Covering: surjective on vertices, surjective on every star.
    let mut hit = vec![false; cod.num_vertices()];
    for &v in &m.v_map {
        hit[v] = true;
    }
    if let Some(v) = hit.iter().position(|&h| !h) {
        return MorphismClass::Immersion { missing: StarDefect::VertexNotHit(v) };
    }
    for v in dom.vertices() {
        let images: BTreeSet<usize> = dom.out_edges(v).iter().map(|&e| m.e_map[e]).collect();
        for &f in cod.out_edges(m.v_map[v]) {
            if !images.contains(&f) {
                return MorphismClass::Immersion {
                    missing: StarDefect::EdgeNotLifted { vertex: v, edge: f },
                };
            }
        }
    }
    MorphismClass::Covering
}

/// Lifts a base path through a morphism starting at `at`, if a lift
/// exists.  For immersions the lift is unique.
pub fn lift_path(
    dom: &DirectedGraph,
    m: &GraphMorphism,
    at: usize,
    base: &Path,
) -> Option<Path> {
    let mut edges = Vec::with_capacity(base.edges.len());
    let mut here = at;
    for &be in &base.edges {
        let mut found = None;
        for &e in dom.out_edges(here) {
            if m.e_map[e] == be {
                found = Some(e);
                break;
            }
        }
        let e = found?;
        edges.push(e);
        here = dom.term(e);
    }
    Some(Path { start: at, edges })
}

/// A subgraph of a fixed ambient graph, as vertex and edge id sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<usize>,
}

impl Subgraph {
    pub fn empty() -> Self {
        Subgraph { vertices: BTreeSet::new(), edges: BTreeSet::new() }
    }

    pub fn single(v: usize) -> Self {
        let mut s = Subgraph::empty();
        s.vertices.insert(v);
        s
    }

    pub fn of_path(g: &DirectedGraph, p: &Path) -> Self {
        let mut s = Subgraph::empty();
        s.vertices.insert(p.start);
        for &e in &p.edges {
            s.edges.insert(e);
            s.vertices.insert(g.term(e));
        }
        s
    }

    /// Full subgraph on a vertex set: all ambient edges between them.
    pub fn full(g: &DirectedGraph, vertices: impl IntoIterator<Item = usize>) -> Self {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges = g
            .edges()
            .filter(|&e| vertices.contains(&g.init(e)) && vertices.contains(&g.term(e)))
            .collect();
        Subgraph { vertices, edges }
    }

    pub fn insert_edge(&mut self, g: &DirectedGraph, e: usize) {
        self.edges.insert(e);
        self.vertices.insert(g.init(e));
        self.vertices.insert(g.term(e));
    }

    pub fn contains_subgraph(&self, other: &Subgraph) -> bool {
        other.vertices.is_subset(&self.vertices) && other.edges.is_subset(&self.edges)
    }

    /// Extracts the subgraph as a standalone graph, returning maps from
    /// new ids back to ambient ids (ids stay sorted, hence canonical).
    pub fn extract(&self, g: &DirectedGraph) -> (DirectedGraph, Vec<usize>, Vec<usize>) {
        let vmap: Vec<usize> = self.vertices.iter().copied().collect();
        let vinv: BTreeMap<usize, usize> = vmap.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let emap: Vec<usize> = self.edges.iter().copied().collect();
        let mut out = DirectedGraph::new(vmap.len());
        for &e in &emap {
            out.add_edge(vinv[&g.init(e)], vinv[&g.term(e)]);
        }
        (out, vmap, emap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        let mut g = DirectedGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Brute-force strong components by pairwise reachability.
    fn scc_oracle(g: &DirectedGraph) -> Vec<BTreeSet<usize>> {
        let reach: Vec<Vec<bool>> = (0..g.num_vertices()).map(|v| g.reachable_from(v)).collect();
        let mut comps: Vec<BTreeSet<usize>> = Vec::new();
        let mut assigned = vec![false; g.num_vertices()];
        for v in 0..g.num_vertices() {
            if assigned[v] {
                continue;
            }
            let comp: BTreeSet<usize> = (0..g.num_vertices())
                .filter(|&w| reach[v][w] && reach[w][v])
                .collect();
            for &w in &comp {
                assigned[w] = true;
            }
            comps.push(comp);
        }
        comps
    }

    fn frame_matches_oracle(g: &DirectedGraph) {
        let frame = strong_components(g);
        let oracle = scc_oracle(g);
        assert_eq!(frame.num_components(), oracle.len());
        for comp in &frame.components {
            let set: BTreeSet<usize> = comp.vertices.iter().copied().collect();
            assert!(oracle.contains(&set));
        }
    }

    #[test]
    fn single_vertex_no_edges() {
        let g = graph(1, &[]);
        let frame = strong_components(&g);
        assert_eq!(frame.num_components(), 1);
        assert!(!frame.components[0].nontrivial);
        assert!(frame.transition_edges.is_empty());
    }

    #[test]
    fn loop_makes_component_nontrivial() {
        let g = graph(1, &[(0, 0)]);
        let frame = strong_components(&g);
        assert_eq!(frame.num_components(), 1);
        assert!(frame.components[0].nontrivial);
    }

    #[test]
    fn two_vertex_arc() {
        let g = graph(2, &[(0, 1)]);
        let frame = strong_components(&g);
        assert_eq!(frame.num_components(), 2);
        assert_eq!(frame.transition_edges, vec![0]);
        assert!(frame.components.iter().all(|c| !c.nontrivial));
    }

    /// An eight-vertex linear instance shaped like a chain of six
    /// components (three of them non-trivial) with five transition edges.
    fn chain_instance() -> DirectedGraph {
        graph(
            8,
            &[
                // C0 = {0} trivial, C1 = {1,2} cycle, C2 = {3} loop,
                // C3 = {4} trivial, C4 = {5,6} cycle, C5 = {7} trivial.
                (0, 1),
                (1, 2),
                (2, 1),
                (2, 3),
                (3, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 5),
                (6, 7),
            ],
        )
    }

    #[test]
    fn chain_of_six_components() {
        let g = chain_instance();
        frame_matches_oracle(&g);
        let frame = strong_components(&g);
        assert_eq!(frame.num_components(), 6);
        assert_eq!(frame.transition_edges.len(), 5);
        assert!(frame.is_quasilinear());
        assert!(frame.is_linear(&g));
    }

    #[test]
    fn strongly_connected_is_linear() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(is_quasilinear(&g));
        assert!(is_linear(&g));
    }

    #[test]
    fn directed_path_is_linear() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert!(is_linear(&g));
    }

    #[test]
    fn out_star_is_not_quasilinear() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        assert!(!is_quasilinear(&g));
    }

    #[test]
    fn entry_exit_single_component() {
        let g = graph(1, &[(0, 0)]);
        let frame = strong_components(&g);
        let ee = entry_exit_points(&g, &frame).unwrap();
        assert!(ee.transitions.is_empty());
        assert_eq!(ee.entry, vec![None]);
        assert_eq!(ee.exit, vec![None]);
    }

    #[test]
    fn entry_exit_arc() {
        let g = graph(2, &[(0, 1)]);
        let frame = strong_components(&g);
        let ee = entry_exit_points(&g, &frame).unwrap();
        assert_eq!(ee.transitions, vec![0]);
        assert_eq!(ee.exit[0], Some(0));
        assert_eq!(ee.entry[1], Some(1));
    }

    #[test]
    fn entry_exit_chain_has_coincident_point() {
        // Component 3 of the chain instance is the trivial {4}: its entry
        // and exit coincide.
        let g = chain_instance();
        let frame = strong_components(&g);
        let ee = entry_exit_points(&g, &frame).unwrap();
        assert_eq!(ee.entry[3], ee.exit[3]);
        assert_eq!(ee.entry[3], Some(4));
    }

    #[test]
    fn entry_exit_rejects_nonlinear() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        let frame = strong_components(&g);
        assert!(entry_exit_points(&g, &frame).is_err());
    }

    #[test]
    fn quasi_base_of_path_graph() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let frame = strong_components(&g);
        let qb = quasi_bases(&g, &frame, 0, 2, 100).unwrap();
        assert_eq!(qb.paths.len(), 1);
        assert!(qb.is_base);
    }

    #[test]
    fn parallel_routes_give_multiple_quasi_bases() {
        // One non-trivial component with two simple routes from entry to
        // exit: 0 -> {1,2,3 cycle with chord} -> 4.
        let g = graph(
            5,
            &[(0, 1), (1, 2), (2, 3), (1, 3), (3, 1), (3, 4)],
        );
        let frame = strong_components(&g);
        let qb = quasi_bases(&g, &frame, 0, 4, 100).unwrap();
        assert!(qb.paths.len() >= 2);
        assert!(!qb.is_base);
    }

    #[test]
    fn quasi_base_count_is_product_over_components() {
        let g = chain_instance();
        let frame = strong_components(&g);
        let ee = entry_exit_points(&g, &frame).unwrap();
        let qb = quasi_bases(&g, &frame, 0, 7, 10_000).unwrap();
        let mut product = 1usize;
        for i in 0..frame.num_components() {
            let p = ee.entry[i].unwrap_or(0);
            let q = ee.exit[i].unwrap_or(7);
            let sub = Subgraph::full(&g, frame.components[i].vertices.iter().copied());
            let (h, vmap, _) = sub.extract(&g);
            let pi = vmap.iter().position(|&v| v == p).unwrap();
            let qi = vmap.iter().position(|&v| v == q).unwrap();
            product *= simple_paths(&h, pi, qi, 10_000).unwrap().len();
        }
        assert_eq!(qb.paths.len(), product);
    }

    #[test]
    fn spanning_tree_of_tree_is_identity() {
        let g = graph(4, &[(0, 1), (0, 2), (2, 3)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let t = spanning_tree(&rg);
        assert_eq!(t.tree_edges.len(), 3);
        let mut sorted = t.tree_edges.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn spanning_tree_has_v_minus_one_edges() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 1)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let t = spanning_tree(&rg);
        assert_eq!(t.tree_edges.len(), rg.graph.num_vertices() - 1);
    }

    #[test]
    fn cover_of_loop_is_path() {
        let g = graph(1, &[(0, 0)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let cov = universal_cover_truncated(&rg, 3);
        assert_eq!(cov.cover.graph.num_vertices(), 4);
        assert_eq!(cov.cover.graph.num_edges(), 3);
    }

    #[test]
    fn cover_of_bouquet_is_trie() {
        // Bouquet on three letters: one vertex, three loops.
        let g = graph(1, &[(0, 0), (0, 0), (0, 0)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let cov = universal_cover_truncated(&rg, 2);
        assert_eq!(cov.cover.graph.num_vertices(), 1 + 3 + 9);
    }

    #[test]
    fn cover_paths_lift_uniquely() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let n = 4;
        let cov = universal_cover_truncated(&rg, n);
        let m = GraphMorphism { v_map: cov.proj_v.clone(), e_map: cov.proj_e.clone() };
        // Every base path of length <= n from the root lifts to exactly
        // one path at the cover root.
        let mut stack = vec![Path::empty(0)];
        while let Some(p) = stack.pop() {
            let lift = lift_path(&cov.cover.graph, &m, 0, &p).expect("lift exists");
            assert_eq!(cov.vertex_paths[lift.end(&cov.cover.graph)], p.edges);
            if p.len() < n {
                for &e in rg.graph.out_edges(p.end(&rg.graph)) {
                    let mut q = p.clone();
                    q.edges.push(e);
                    stack.push(q);
                }
            }
        }
    }

    #[test]
    fn first_return_loops_of_two_cycle_with_tail_loop() {
        // v = 0, w = 1; e: v->w, f: w->v, g: w->w.
        let g = graph(2, &[(0, 1), (1, 0), (1, 1)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let gens = first_return_generators(&rg, 4);
        let words: Vec<Vec<usize>> = gens.iter().map(|p| p.edges.clone()).collect();
        assert_eq!(words, vec![vec![0, 1], vec![0, 2, 1], vec![0, 2, 2, 1]]);
    }

    #[test]
    fn first_return_loops_from_other_root() {
        let g = graph(2, &[(0, 1), (1, 0), (1, 1)]);
        let rg = RootedGraph::new(g, 1).unwrap();
        let gens = first_return_generators(&rg, 2);
        let words: Vec<Vec<usize>> = gens.iter().map(|p| p.edges.clone()).collect();
        assert_eq!(words, vec![vec![1, 0], vec![2]]);
    }

    #[test]
    fn single_loop_generates() {
        let g = graph(1, &[(0, 0)]);
        let rg = RootedGraph::new(g, 0).unwrap();
        let gens = first_return_generators(&rg, 3);
        assert_eq!(gens.len(), 1);
        assert_eq!(gens[0].edges, vec![0]);
    }

    #[test]
    fn identity_is_covering() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let m = GraphMorphism { v_map: vec![0, 1, 2], e_map: vec![0, 1, 2] };
        assert_eq!(classify_morphism(&g, &g, &m), MorphismClass::Covering);
    }

    #[test]
    fn subgraph_inclusion_is_immersion() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        let sub = graph(2, &[(0, 1)]);
        let m = GraphMorphism { v_map: vec![0, 1], e_map: vec![0] };
        match classify_morphism(&sub, &g, &m) {
            MorphismClass::Immersion { .. } => {}
            other => panic!("expected immersion, got {other:?}"),
        }
    }

    #[test]
    fn folding_map_is_morphism_not_immersion() {
        let dom = graph(3, &[(0, 1), (0, 2)]);
        let cod = graph(2, &[(0, 1)]);
        let m = GraphMorphism { v_map: vec![0, 1, 1], e_map: vec![0, 0] };
        match classify_morphism(&dom, &cod, &m) {
            MorphismClass::Morphism { .. } => {}
            other => panic!("expected bare morphism, got {other:?}"),
        }
    }

    #[test]
    fn path_lifting_counts() {
        // For immersions every base path has at most one lift;
        // for coverings exactly one.  Checked by enumeration.
        let base = graph(2, &[(0, 1), (1, 0)]);
        let cover = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let m = GraphMorphism { v_map: vec![0, 1, 0, 1], e_map: vec![0, 1, 0, 1] };
        assert_eq!(classify_morphism(&cover, &base, &m), MorphismClass::Covering);
        let mut paths = vec![Path::empty(0)];
        for _ in 0..6 {
            let mut next = Vec::new();
            for p in &paths {
                for &e in base.out_edges(p.end(&base)) {
                    let mut q = p.clone();
                    q.edges.push(e);
                    next.push(q);
                }
            }
            for p in &next {
                let lifts: Vec<_> = (0..4)
                    .filter(|&v| m.v_map[v] == 0)
                    .filter_map(|v| lift_path(&cover, &m, v, p))
                    .collect();
                assert_eq!(lifts.len(), 2, "each fiber vertex lifts the path once");
            }
            paths = next;
        }
    }

    #[test]
    fn accessibility_implies_simple_path() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]);
        for v in 0..5 {
            let reach = g.reachable_from(v);
            for w in 0..5 {
                if reach[w] {
                    let paths = simple_paths(&g, v, w, 1000).unwrap();
                    assert!(!paths.is_empty());
                    assert!(paths.iter().all(|p| p.is_simple(&g)));
                }
            }
        }
    }

    #[test]
    fn frame_is_acyclic() {
        let g = chain_instance();
        let frame = strong_components(&g);
        for i in 0..frame.num_components() {
            for j in 0..frame.num_components() {
                if i != j {
                    assert!(
                        !(frame.comp_reaches(i, j) && frame.comp_reaches(j, i)),
                        "frame must be acyclic"
                    );
                }
            }
        }
    }

    #[test]
    fn linear_graph_has_k_transition_edges() {
        let g = chain_instance();
        let frame = strong_components(&g);
        assert!(frame.is_linear(&g));
        assert_eq!(frame.transition_edges.len(), frame.num_components() - 1);
    }

    #[test]
    fn principal_series_steps_are_equivalence_classes() {
        // Walking the topological order of components, each successive
        // difference of principal downsets is exactly one component.
        let g = chain_instance();
        let frame = strong_components(&g);
        for i in 0..frame.num_components() {
            let rep = frame.components[i].vertices[0];
            let down: BTreeSet<usize> = g
                .vertices()
                .filter(|&w| g.accessible(rep, w))
                .collect();
            let next: BTreeSet<usize> = if i + 1 < frame.num_components() {
                let rep2 = frame.components[i + 1].vertices[0];
                g.vertices().filter(|&w| g.accessible(rep2, w)).collect()
            } else {
                BTreeSet::new()
            };
            let diff: BTreeSet<usize> = down.difference(&next).copied().collect();
            let comp: BTreeSet<usize> = frame.components[i].vertices.iter().copied().collect();
            assert_eq!(diff, comp);
        }
    }

    #[test]
    fn cap_errors_out() {
        let g = graph(
            6,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)],
        );
        assert!(matches!(simple_paths(&g, 0, 5, 2), Err(GraphError::CapExceeded(2))));
    }
}
