//! Edge-labeled graphs as partial deterministic automata: monodromy
//! actions, transition semigroups, acceptors and their languages,
//! presentations by prefix rewriting.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::congruence::Congruence;
use crate::digraph::{
    classify_morphism, spanning_tree, DirectedGraph, GraphMorphism, MorphismClass, RootedGraph,
};
use crate::semigroup::FiniteASemigroup;
use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("labeling is not a directed immersion: vertex {vertex} has two out-edges labeled {label}")]
    NotDeterministic { vertex: usize, label: String },
    #[error("label count {0} does not match edge count {1}")]
    LabelMismatch(usize, usize),
    #[error("automaton is not rooted: vertex {0} unreachable")]
    NotRooted(usize),
    #[error("acceptor is not trim: vertex {0} reaches no terminal")]
    NotTrim(usize),
    #[error("presentation words must fit the bound {0}")]
    BoundTooSmall(usize),
    #[error("morphism is not label-compatible at edge {0}")]
    LabelIncompatible(usize),
    #[error("not a directed covering: {0}")]
    NotCovering(String),
    #[error("rewriting did not terminate within {0} steps")]
    StepCapExceeded(usize),
}

/// A partial deterministic automaton: at each vertex the out-edge labels
/// are pairwise distinct, so the labeling is a directed immersion into
/// the one-vertex bouquet on the alphabet.
#[derive(Debug, Clone)]
pub struct Automaton {
    pub graph: DirectedGraph,
    pub labels: Vec<Letter>,
    pub alphabet: Alphabet,
}

impl Automaton {
    /// Validates partial determinism and sorts each out-edge list by
    /// (label, id) so breadth-first constructions are reproducible.
    pub fn new(
        mut graph: DirectedGraph,
        labels: Vec<Letter>,
        alphabet: Alphabet,
    ) -> Result<Self, AutomatonError> {
        if labels.len() != graph.num_edges() {
            return Err(AutomatonError::LabelMismatch(labels.len(), graph.num_edges()));
        }
        for v in graph.vertices() {
            let mut seen = BTreeSet::new();
            for &e in graph.out_edges(v) {
                if !seen.insert(labels[e]) {
                    return Err(AutomatonError::NotDeterministic {
                        vertex: v,
                        label: alphabet.name(labels[e]).to_string(),
                    });
                }
            }
        }
        graph.sort_out_edges_by(|e| (labels[e], e));
        Ok(Automaton { graph, labels, alphabet })
    }

    /// The unique out-edge of `v` labeled `a`, if any.
    pub fn edge_at(&self, v: usize, a: Letter) -> Option<usize> {
        self.graph.out_edges(v).iter().copied().find(|&e| self.labels[e] == a)
    }

    pub fn step(&self, v: usize, a: Letter) -> Option<usize> {
        self.edge_at(v, a).map(|e| self.graph.term(e))
    }

    /// Complete automaton: every vertex has one out-edge per letter.
    pub fn is_deterministic(&self) -> bool {
        self.graph
            .vertices()
            .all(|v| self.graph.out_edges(v).len() == self.alphabet.size())
    }

    pub fn word_of_path(&self, edges: &[usize]) -> Word {
        edges.iter().map(|&e| self.labels[e]).collect()
    }

    /// Reads a word from `q` by unique path lifting; `None` when the
    /// action is undefined.
    pub fn delta(&self, q: usize, w: &[Letter]) -> Option<usize> {
        let mut at = q;
        for &a in w {
            at = self.step(at, a)?;
        }
        Some(at)
    }
}

/// An automaton rooted at an initial state.
#[derive(Debug, Clone)]
pub struct PointedAutomaton {
    pub automaton: Automaton,
    pub root: usize,
}

impl PointedAutomaton {
    pub fn new(automaton: Automaton, root: usize) -> Result<Self, AutomatonError> {
        let seen = automaton.graph.reachable_from(root);
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(AutomatonError::NotRooted(v));
        }
        Ok(PointedAutomaton { automaton, root })
    }

    pub fn read(&self, w: &[Letter]) -> Option<usize> {
        self.automaton.delta(self.root, w)
    }

    pub fn rooted_graph(&self) -> RootedGraph {
        RootedGraph::new(self.automaton.graph.clone(), self.root)
            .expect("pointed automata are rooted")
    }
}

/// A pointed automaton with terminal states.
#[derive(Debug, Clone)]
pub struct Acceptor {
    pub pointed: PointedAutomaton,
    pub terminals: BTreeSet<usize>,
}

impl Acceptor {
    pub fn new(pointed: PointedAutomaton, terminals: BTreeSet<usize>) -> Self {
        Acceptor { pointed, terminals }
    }

    /// Trim: every vertex lies on some path from the root to a terminal.
    pub fn is_trim(&self) -> Result<(), AutomatonError> {
        let g = &self.pointed.automaton.graph;
        for v in g.vertices() {
            let reach = g.reachable_from(v);
            if !self.terminals.iter().any(|&t| reach[t]) {
                return Err(AutomatonError::NotTrim(v));
            }
        }
        Ok(())
    }

    /// Accepted words of length 1..=n; the empty word is included only
    /// under `include_empty` (and only when the root is terminal).
    pub fn language_upto(&self, n: usize, include_empty: bool) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        if include_empty && self.terminals.contains(&self.pointed.root) {
            out.insert(Vec::new());
        }
        let aut = &self.pointed.automaton;
        let mut frontier = vec![(self.pointed.root, Word::new())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (v, w) in frontier {
                for &e in aut.graph.out_edges(v) {
                    let mut w2 = w.clone();
                    w2.push(aut.labels[e]);
                    let t = aut.graph.term(e);
                    if self.terminals.contains(&t) {
                        out.insert(w2.clone());
                    }
                    next.push((t, w2));
                }
            }
            frontier = next;
        }
        out
    }
}

/// A partial transformation of a finite state set, the monodromy action
/// of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialTransformation {
    pub map: Vec<Option<u16>>,
}

impl PartialTransformation {
    pub fn identity(n: usize) -> Self {
        PartialTransformation { map: (0..n as u16).map(Some).collect() }
    }

    pub fn of_letter(aut: &Automaton, a: Letter) -> Self {
        let map = aut
            .graph
            .vertices()
            .map(|v| aut.step(v, a).map(|w| w as u16))
            .collect();
        PartialTransformation { map }
    }

    /// `self` then `other`; undefined propagates.
    pub fn then(&self, other: &PartialTransformation) -> Self {
        let map = self
            .map
            .iter()
            .map(|&x| x.and_then(|v| other.map[v as usize]))
            .collect();
        PartialTransformation { map }
    }

    pub fn apply(&self, v: usize) -> Option<usize> {
        self.map[v].map(|x| x as usize)
    }
}

/// The transition semigroup of a finite automaton: the closure of the
/// letter transformations under composition, with a shortlex-minimal
/// representative word for each element.
#[derive(Debug, Clone)]
pub struct TransitionSemigroup {
    pub semigroup: FiniteASemigroup,
    pub transforms: Vec<PartialTransformation>,
    /// Whether the identity transformation arose as a non-empty word.
    pub contains_identity: bool,
}

pub fn transition_semigroup(aut: &Automaton) -> TransitionSemigroup {
    let n = aut.graph.num_vertices();
    let mut transforms: Vec<PartialTransformation> = Vec::new();
    let mut index: HashMap<PartialTransformation, usize> = HashMap::new();
    let mut reps: Vec<Word> = Vec::new();
    let mut gens = Vec::with_capacity(aut.alphabet.size());
    let mut queue = VecDeque::new();
    for a in aut.alphabet.letters() {
        let t = PartialTransformation::of_letter(aut, a);
        let id = *index.entry(t.clone()).or_insert_with(|| {
            transforms.push(t.clone());
            reps.push(vec![a]);
            queue.push_back(transforms.len() - 1);
            transforms.len() - 1
        });
        gens.push(id);
    }
    while let Some(x) = queue.pop_front() {
        for a in aut.alphabet.letters() {
            let t = transforms[x].then(&PartialTransformation::of_letter(aut, a));
            if !index.contains_key(&t) {
                let mut w = reps[x].clone();
                w.push(a);
                index.insert(t.clone(), transforms.len());
                transforms.push(t);
                reps.push(w);
                queue.push_back(transforms.len() - 1);
            }
        }
    }
    let m = transforms.len();
    let mut table = vec![0usize; m * m];
    for i in 0..m {
        for j in 0..m {
            let t = transforms[i].then(&transforms[j]);
            table[i * m + j] = index[&t];
        }
    }
    let contains_identity = index.contains_key(&PartialTransformation::identity(n));
    let semigroup = FiniteASemigroup::from_parts(aut.alphabet.clone(), gens, table, reps)
        .expect("transition semigroups are associative and generated");
    TransitionSemigroup { semigroup, transforms, contains_identity }
}

/// The transition monoid: the transition semigroup together with the
/// identity action of the empty word.
pub fn transition_monoid(aut: &Automaton) -> TransitionSemigroup {
    let ts = transition_semigroup(aut);
    let n = aut.graph.num_vertices();
    let ident = PartialTransformation::identity(n);
    if let Some(pos) = ts.transforms.iter().position(|t| *t == ident) {
        let mut ts = ts;
        ts.semigroup.set_identity(pos);
        return ts;
    }
    let m = ts.transforms.len();
    let mut transforms = ts.transforms;
    transforms.push(ident);
    let mut table = vec![0usize; (m + 1) * (m + 1)];
    for i in 0..m {
        for j in 0..m {
            table[i * (m + 1) + j] = ts.semigroup.mul(i, j);
        }
    }
    for i in 0..=m {
        table[i * (m + 1) + m] = i;
        table[m * (m + 1) + i] = i;
    }
    let mut reps: Vec<Word> = (0..m).map(|i| ts.semigroup.rep(i).to_vec()).collect();
    reps.push(Word::new());
    let gens = ts.semigroup.gens().to_vec();
    let mut semigroup = FiniteASemigroup::from_parts(aut.alphabet.clone(), gens, table, reps)
        .expect("transition monoids are associative");
    semigroup.set_identity(m);
    TransitionSemigroup { semigroup, transforms, contains_identity: true }
}

/// A covering of automata together with the morphism of transition
/// semigroups it induces.
#[derive(Debug)]
pub struct AutomataCovering {
    /// Element map from the transition semigroup of the domain to that
    /// of the codomain.
    pub semigroup_map: Vec<usize>,
    pub dom_semigroup: TransitionSemigroup,
    pub cod_semigroup: TransitionSemigroup,
}

/// Checks that a label-compatible graph morphism is a directed covering
/// of automata and, if so, produces the induced surjective morphism of
/// transition semigroups (verified to be equivariant).
pub fn is_covering_of_automata(
    dom: &Automaton,
    cod: &Automaton,
    m: &GraphMorphism,
) -> Result<AutomataCovering, AutomatonError> {
    for e in dom.graph.edges() {
        if dom.labels[e] != cod.labels[m.e_map[e]] {
            return Err(AutomatonError::LabelIncompatible(e));
        }
    }
    match classify_morphism(&dom.graph, &cod.graph, m) {
        MorphismClass::Covering => {}
        other => return Err(AutomatonError::NotCovering(format!("{other:?}"))),
    }
    let dom_semigroup = transition_semigroup(dom);
    let cod_semigroup = transition_semigroup(cod);
    let semigroup_map: Vec<usize> = (0..dom_semigroup.semigroup.len())
        .map(|x| {
            cod_semigroup
                .semigroup
                .eval(dom_semigroup.semigroup.rep(x))
                .expect("codomain acts on all generator words")
        })
        .collect();
    // Homomorphism property makes the map independent of the chosen
    // representatives; equivariance ties the two actions together.
    for x in 0..dom_semigroup.semigroup.len() {
        for y in 0..dom_semigroup.semigroup.len() {
            let lhs = semigroup_map[dom_semigroup.semigroup.mul(x, y)];
            let rhs = cod_semigroup.semigroup.mul(semigroup_map[x], semigroup_map[y]);
            if lhs != rhs {
                return Err(AutomatonError::NotCovering(format!(
                    "induced map fails to be a morphism at ({x},{y})"
                )));
            }
        }
    }
    for q in dom.graph.vertices() {
        for x in 0..dom_semigroup.semigroup.len() {
            let lhs = dom_semigroup.transforms[x].apply(q).map(|p| m.v_map[p]);
            let rhs = cod_semigroup.transforms[semigroup_map[x]].apply(m.v_map[q]);
            if lhs != rhs {
                return Err(AutomatonError::NotCovering(format!(
                    "action is not equivariant at state {q}"
                )));
            }
        }
    }
    Ok(AutomataCovering { semigroup_map, dom_semigroup, cod_semigroup })
}

/// Relations presenting a pointed automaton: `u = v` identifies the
/// states reached by `u` and `v`; `u = □` forbids reading `u`.
#[derive(Debug, Clone)]
pub enum Relation {
    Equal(Word, Word),
    Dead(Word),
}

/// Whether the bounded saturation is exact or needs a larger bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    Closed,
    NotClosed,
}

#[derive(Debug)]
pub struct PresentedAutomaton {
    pub pointed: PointedAutomaton,
    pub certificate: Certificate,
    /// State of each word class (by minimal word id) for inspection.
    pub state_of_class: BTreeMap<Word, usize>,
}

/// Builds the pointed automaton presented by the relations, saturating
/// the one-step derivation congruence on words of length at most
/// `bound`.  Exactness is claimed only when the certificate is closed.
pub fn automaton_from_presentation(
    alphabet: &Alphabet,
    relations: &[Relation],
    bound: usize,
) -> Result<PresentedAutomaton, AutomatonError> {
    let mut cong = Congruence::new(alphabet.size(), bound, true, false, true);
    for rel in relations {
        match rel {
            Relation::Equal(u, v) => {
                if u.len() > bound || v.len() > bound {
                    return Err(AutomatonError::BoundTooSmall(bound));
                }
                cong.relate_words(u, v);
            }
            Relation::Dead(u) => {
                if u.len() > bound {
                    return Err(AutomatonError::BoundTooSmall(bound));
                }
                cong.relate_to_sink(u);
            }
        }
    }
    build_presented(alphabet, cong)
}

/// Presents the rooted Cayley graph of a semigroup presentation: every
/// relation is applied after every prefix within the bound.
pub fn cayley_from_semigroup_presentation(
    alphabet: &Alphabet,
    relations: &[(Word, Word)],
    bound: usize,
) -> Result<PresentedAutomaton, AutomatonError> {
    let mut cong = Congruence::new(alphabet.size(), bound, true, false, true);
    for (u, v) in relations {
        if u.len() > bound || v.len() > bound {
            return Err(AutomatonError::BoundTooSmall(bound));
        }
        cong.relate_words(u, v);
        let room = bound - u.len().max(v.len());
        for len in 1..=room {
            for p in crate::words::words_up_to(alphabet.size(), len) {
                if p.len() != len {
                    continue;
                }
                let mut pu = p.clone();
                pu.extend_from_slice(u);
                let mut pv = p;
                pv.extend_from_slice(v);
                cong.relate_words(&pu, &pv);
            }
        }
    }
    build_presented(alphabet, cong)
}

fn build_presented(
    alphabet: &Alphabet,
    mut cong: Congruence,
) -> Result<PresentedAutomaton, AutomatonError> {
    let sink_root = {
        let s = cong.sink_id().unwrap();
        cong.find(s)
    };
    let roots: Vec<usize> = cong.class_roots().into_iter().filter(|&r| r != sink_root).collect();
    let state_of: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let certificate = if cong.is_closed() { Certificate::Closed } else { Certificate::NotClosed };
    let mut graph = DirectedGraph::new(roots.len());
    let mut labels = Vec::new();
    for (i, &r) in roots.iter().enumerate() {
        for a in alphabet.letters() {
            if let Some(t) = cong.step_right(r, a) {
                if t == sink_root {
                    continue;
                }
                graph.add_edge(i, state_of[&cong.find(t)]);
                labels.push(a);
            }
        }
    }
    let automaton = Automaton::new(graph, labels, alphabet.clone())?;
    let root_class = cong.find(cong.word_id(&[]).unwrap());
    let pointed = PointedAutomaton::new(automaton, state_of[&root_class])?;
    let mut state_of_class = BTreeMap::new();
    for (&r, &i) in &state_of {
        let m = cong.min_member(r);
        state_of_class.insert(cong.id_word(m), i);
    }
    Ok(PresentedAutomaton { pointed, certificate, state_of_class })
}

/// A prefix rewriting system: loop rules `uv → u` and dead-end rules
/// `u → □`, applied only at word prefixes; the sink absorbs letters.
#[derive(Debug, Clone)]
pub struct PrefixRewritingSystem {
    pub alphabet: Alphabet,
    pub loop_rules: Vec<(Word, Word)>,
    pub dead_rules: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduced {
    Word(Word),
    Sink,
}

impl PrefixRewritingSystem {
    /// The rewriting system of an automaton with the unique simple path
    /// property: each bold arrow's sloop label rewrites to the geodesic
    /// label of its tip, and undefined letters after geodesics die.
    pub fn from_uspp(aut: &PointedAutomaton, u: &crate::uspp::UsppData) -> Self {
        let g = &aut.automaton.graph;
        let mut loop_rules = Vec::new();
        for &e in &u.bold {
            let slp = crate::uspp::sloop(g, u, e).expect("bold arrow");
            let lhs = aut.automaton.word_of_path(&slp.edges);
            let rhs = aut.automaton.word_of_path(&u.geodesic(g, g.term(e)).edges);
            debug_assert!(lhs.starts_with(&rhs));
            loop_rules.push((lhs, rhs));
        }
        let mut dead_rules = Vec::new();
        for v in g.vertices() {
            let geo = aut.automaton.word_of_path(&u.geodesic(g, v).edges);
            for a in aut.automaton.alphabet.letters() {
                if aut.automaton.step(v, a).is_none() {
                    let mut lhs = geo.clone();
                    lhs.push(a);
                    dead_rules.push(lhs);
                }
            }
        }
        PrefixRewritingSystem { alphabet: aut.automaton.alphabet.clone(), loop_rules, dead_rules }
    }

    fn applicable(&self, w: &[Letter]) -> Option<(usize, bool)> {
        for (i, (lhs, _)) in self.loop_rules.iter().enumerate() {
            if w.starts_with(lhs) {
                return Some((i, false));
            }
        }
        for (i, lhs) in self.dead_rules.iter().enumerate() {
            if w.starts_with(lhs) {
                return Some((i, true));
            }
        }
        None
    }

    /// Leftmost-prefix rewriting to a normal form.  `step_cap` guards
    /// non-terminating user systems.
    pub fn reduce(&self, w: &[Letter], step_cap: usize) -> Result<Reduced, AutomatonError> {
        let mut cur = w.to_vec();
        for _ in 0..step_cap {
            match self.applicable(&cur) {
                None => return Ok(Reduced::Word(cur)),
                Some((_, true)) => return Ok(Reduced::Sink),
                Some((i, false)) => {
                    let (lhs, rhs) = &self.loop_rules[i];
                    let mut next = rhs.clone();
                    next.extend_from_slice(&cur[lhs.len()..]);
                    cur = next;
                }
            }
        }
        Err(AutomatonError::StepCapExceeded(step_cap))
    }

    /// Reduces applying rules in a caller-chosen order at each step,
    /// used to exercise confluence.
    pub fn reduce_with_choice(
        &self,
        w: &[Letter],
        step_cap: usize,
        mut choose: impl FnMut(&[usize]) -> usize,
    ) -> Result<Reduced, AutomatonError> {
        let mut cur = w.to_vec();
        for _ in 0..step_cap {
            let mut loops = Vec::new();
            for (i, (lhs, _)) in self.loop_rules.iter().enumerate() {
                if cur.starts_with(lhs) {
                    loops.push(i);
                }
            }
            if loops.is_empty() {
                if self.dead_rules.iter().any(|lhs| cur.starts_with(lhs)) {
                    return Ok(Reduced::Sink);
                }
                return Ok(Reduced::Word(cur));
            }
            let i = loops[choose(&loops) % loops.len()];
            let (lhs, rhs) = &self.loop_rules[i];
            let mut next = rhs.clone();
            next.extend_from_slice(&cur[lhs.len()..]);
            cur = next;
        }
        Err(AutomatonError::StepCapExceeded(step_cap))
    }
}

/// Isomorphism of pointed automata over a common alphabet, by a
/// synchronized walk from the roots.  For partial deterministic rooted
/// automata the root correspondence forces the whole map.
pub fn pointed_isomorphic(a: &PointedAutomaton, b: &PointedAutomaton) -> bool {
    if a.automaton.graph.num_vertices() != b.automaton.graph.num_vertices() {
        return false;
    }
    let n = a.automaton.graph.num_vertices();
    let mut map: Vec<Option<usize>> = vec![None; n];
    let mut hit = vec![false; n];
    map[a.root] = Some(b.root);
    hit[b.root] = true;
    let mut queue = VecDeque::from([a.root]);
    while let Some(x) = queue.pop_front() {
        let y = map[x].unwrap();
        for l in a.automaton.alphabet.letters() {
            match (a.automaton.step(x, l), b.automaton.step(y, l)) {
                (None, None) => {}
                (Some(xn), Some(yn)) => match map[xn] {
                    None => {
                        if hit[yn] {
                            return false;
                        }
                        map[xn] = Some(yn);
                        hit[yn] = true;
                        queue.push_back(xn);
                    }
                    Some(prev) => {
                        if prev != yn {
                            return false;
                        }
                    }
                },
                _ => return false,
            }
        }
    }
    map.into_iter().all(|m| m.is_some())
}

/// Decides the unique simple path property through the rewriting view:
/// the breadth-first tree must give loop rules (every non-tree edge
/// falls back onto a geodesic) and the irreducible words of the derived
/// system must land on pairwise distinct states.
pub fn elementary_loop_certificate(aut: &PointedAutomaton) -> bool {
    let g = &aut.automaton.graph;
    let rg = aut.rooted_graph();
    let tree = spanning_tree(&rg);
    for e in g.edges() {
        if tree.contains_edge(e) {
            continue;
        }
        if !tree.le_tree(g, g.init(e), g.term(e)) {
            // The sloop relation of this edge is not a loop relation.
            return false;
        }
    }
    let u = match crate::uspp::has_uspp(&rg) {
        Ok(u) => u,
        Err(_) => return false,
    };
    let rs = PrefixRewritingSystem::from_uspp(aut, &u);
    // Irreducible words form a prefix-closed set; enumerate it.
    let mut irreducible = vec![Word::new()];
    let mut stack = vec![Word::new()];
    while let Some(w) = stack.pop() {
        for a in aut.automaton.alphabet.letters() {
            let mut wa = w.clone();
            wa.push(a);
            if wa.len() > g.num_vertices() {
                return false;
            }
            if rs.applicable(&wa).is_none() {
                irreducible.push(wa.clone());
                stack.push(wa);
            }
        }
    }
    let mut states = BTreeSet::new();
    for w in &irreducible {
        match aut.read(w) {
            Some(q) => {
                if !states.insert(q) {
                    return false;
                }
            }
            None => return false,
        }
    }
    states.len() == g.num_vertices()
}
