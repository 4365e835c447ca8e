//! Seeded random instances for the verification suites.  All generators
//! take an explicit RNG so suites are reproducible from a seed.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::{Acceptor, Automaton, PointedAutomaton};
use crate::digraph::{DirectedGraph, RootedGraph, Subgraph};
use crate::semigroup::{enumerate_semigroups, table_as_a_semigroup, FiniteASemigroup};
use crate::uspp::{has_uspp, GeometricRank};
use crate::words::Letter;

/// A random parent tree plus arbitrary extra edges; returns the extra
/// edge ids.
pub fn random_rooted_graph<R: Rng>(
    rng: &mut R,
    max_v: usize,
    max_extra: usize,
) -> (RootedGraph, Vec<usize>) {
    let n = rng.gen_range(1..=max_v);
    let mut g = DirectedGraph::new(n);
    for v in 1..n {
        g.add_edge(rng.gen_range(0..v), v);
    }
    let extra = rng.gen_range(0..=max_extra);
    let mut ids = Vec::with_capacity(extra);
    for _ in 0..extra {
        ids.push(g.add_edge(rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    (RootedGraph::new(g, 0).unwrap(), ids)
}

/// A random graph with the unique simple path property: a parent tree
/// plus fallback edges whose tips lie on the geodesic of their source.
/// Returns the fallback (bold) edge ids.
pub fn random_uspp_graph<R: Rng>(
    rng: &mut R,
    max_v: usize,
    max_bold: usize,
) -> (RootedGraph, Vec<usize>) {
    random_uspp_graph_bounded(rng, max_v, max_bold, usize::MAX)
}

/// As `random_uspp_graph` with a cap on out-degrees, so the graph can be
/// labeled over an alphabet of that size.
pub fn random_uspp_graph_bounded<R: Rng>(
    rng: &mut R,
    max_v: usize,
    max_bold: usize,
    max_outdeg: usize,
) -> (RootedGraph, Vec<usize>) {
    let n = rng.gen_range(1..=max_v);
    let mut g = DirectedGraph::new(n);
    let mut parent = vec![0usize; n];
    for v in 1..n {
        let candidates: Vec<usize> =
            (0..v).filter(|&p| g.out_edges(p).len() < max_outdeg).collect();
        let p = *candidates.choose(rng).unwrap_or(&(v - 1));
        parent[v] = p;
        g.add_edge(p, v);
    }
    let chain = |v: usize| {
        let mut c = vec![v];
        let mut at = v;
        while at != 0 {
            at = parent[at];
            c.push(at);
        }
        c
    };
    let want = rng.gen_range(0..=max_bold);
    let mut bold = Vec::new();
    for _ in 0..want {
        let sources: Vec<usize> = (0..n).filter(|&v| g.out_edges(v).len() < max_outdeg).collect();
        let Some(&src) = sources.choose(rng) else { break };
        let ch = chain(src);
        let tip = ch[rng.gen_range(0..ch.len())];
        bold.push(g.add_edge(src, tip));
    }
    (RootedGraph::new(g, 0).unwrap(), bold)
}

/// A random partial deterministic pointed automaton with the stated
/// alphabet size, trimmed to the part reachable from state 0.
pub fn random_automaton<R: Rng>(
    rng: &mut R,
    max_states: usize,
    alphabet_size: usize,
) -> PointedAutomaton {
    let n = rng.gen_range(1..=max_states);
    let mut g = DirectedGraph::new(n);
    let mut labels = Vec::new();
    for v in 0..n {
        for a in 0..alphabet_size {
            if rng.gen_bool(0.6) {
                g.add_edge(v, rng.gen_range(0..n));
                labels.push(a as Letter);
            }
        }
    }
    let seen = g.reachable_from(0);
    let sub = Subgraph::full(&g, (0..n).filter(|&v| seen[v]));
    let (h, vmap, emap) = sub.extract(&g);
    let labels: Vec<Letter> = emap.iter().map(|&e| labels[e]).collect();
    let alphabet = crate::words::Alphabet::latin(alphabet_size);
    let aut = Automaton::new(h, labels, alphabet).unwrap();
    let root = vmap.iter().position(|&v| v == 0).unwrap();
    PointedAutomaton::new(aut, root).unwrap()
}

/// A random trim acceptor with the unique simple path property and a
/// single terminal state, together with a random valid rank function.
pub fn random_uspp_acceptor<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_bold: usize,
) -> (Acceptor, GeometricRank) {
    let alphabet_size = 3;
    let (rg, _) = random_uspp_graph_bounded(rng, max_states, max_bold, alphabet_size);
    let n = rg.graph.num_vertices();
    // Distinct labels per vertex.
    let mut labels = vec![0 as Letter; rg.graph.num_edges()];
    for v in 0..n {
        let mut avail: Vec<Letter> = (0..alphabet_size as u8).collect();
        avail.shuffle(rng);
        for (&e, &l) in rg.graph.out_edges(v).iter().zip(avail.iter()) {
            labels[e] = l;
        }
    }
    // Trim to the vertices that reach a random terminal.
    let terminal = rng.gen_range(0..n);
    let keep: Vec<usize> = (0..n).filter(|&v| rg.graph.accessible(v, terminal)).collect();
    let sub = Subgraph::full(&rg.graph, keep);
    let (h, vmap, emap) = sub.extract(&rg.graph);
    let labels: Vec<Letter> = emap.iter().map(|&e| labels[e]).collect();
    let alphabet = crate::words::Alphabet::latin(alphabet_size);
    let aut = Automaton::new(h, labels, alphabet).unwrap();
    let root = vmap.iter().position(|&v| v == rg.root).unwrap();
    let local_term = vmap.iter().position(|&v| v == terminal).unwrap();
    let pointed = PointedAutomaton::new(aut, root).unwrap();
    let acc = Acceptor::new(pointed, [local_term].into_iter().collect());
    acc.is_trim().expect("construction is trim");
    // Random rank: shuffle each incoming bold bundle.
    let u = has_uspp(&acc.pointed.rooted_graph()).expect("construction has the property");
    let g = &acc.pointed.automaton.graph;
    let mut rank = std::collections::BTreeMap::new();
    for v in g.vertices() {
        let mut bundle = u.bold_into(g, v);
        bundle.shuffle(rng);
        for (i, &e) in bundle.iter().enumerate() {
            rank.insert(e, i);
        }
    }
    (acc, GeometricRank { rank })
}

static CATALOGS: [OnceLock<Vec<Vec<usize>>>; 6] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

/// All multiplication tables of order `n` up to isomorphism, cached.
pub fn catalog(n: usize) -> &'static [Vec<usize>] {
    assert!(n <= 5, "catalog is computed for orders up to 5");
    CATALOGS[n].get_or_init(|| enumerate_semigroups(n))
}

/// A random catalog semigroup of order at most `max_n`, generated by
/// its whole element set.
pub fn random_catalog_semigroup<R: Rng>(rng: &mut R, max_n: usize) -> FiniteASemigroup {
    let n = rng.gen_range(1..=max_n);
    let tables = catalog(n);
    let t = tables[rng.gen_range(0..tables.len())].clone();
    table_as_a_semigroup(n, t, None).unwrap()
}

/// A random catalog semigroup with a minimal generating set as its
/// alphabet.
pub fn random_catalog_semigroup_min_gens<R: Rng>(rng: &mut R, max_n: usize) -> FiniteASemigroup {
    let n = rng.gen_range(1..=max_n);
    let tables = catalog(n);
    let t = tables[rng.gen_range(0..tables.len())].clone();
    let gens = crate::semigroup::minimal_generating_set(n, &t);
    table_as_a_semigroup(n, t, Some(gens)).unwrap()
}
