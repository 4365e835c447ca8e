//! Finite A-semigroups: multiplication tables with a chosen generating
//! map from an alphabet, Green's relations, Schützenberger graphs,
//! straightline and Cayley automata, stabilizers and the algebraic rank.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{Acceptor, Automaton, Certificate, PointedAutomaton};
use crate::congruence::Congruence;
use crate::digraph::{strong_components, DirectedGraph, Subgraph};
use crate::words::{Alphabet, Letter, Word};

#[derive(Debug, Error)]
pub enum SemigroupError {
    #[error("multiplication table is not square")]
    NotSquare,
    #[error("table entry out of range at ({0},{1})")]
    OutOfRange(usize, usize),
    #[error("not associative: ({0}·{1})·{2} differs from {0}·({1}·{2})")]
    NotAssociative(usize, usize, usize),
    #[error("generators do not generate: element {0} unreached")]
    NotGenerated(usize),
    #[error("representative of element {0} does not evaluate to it")]
    BadRepresentative(usize),
    #[error("congruence is not closed at bound {0}; raise the bound")]
    UnclosedCongruence(usize),
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("expected a group with at least 3 elements")]
    NotAGroup,
    #[error("search space cap {0} exceeded")]
    SearchCapExceeded(usize),
    #[error("semigroup has no identity element")]
    NotAMonoid,
}

/// A finite semigroup presented as an A-semigroup: a multiplication
/// table plus a generator map from a fixed alphabet, with a shortlex
/// representative word stored for every element.
#[derive(Debug, Clone)]
pub struct FiniteASemigroup {
    alphabet: Alphabet,
    gens: Vec<usize>,
    n: usize,
    table: Vec<usize>,
    reps: Vec<Word>,
    identity: Option<usize>,
}

impl FiniteASemigroup {
    /// Validated construction from a flat row-major table.
    pub fn from_table(
        alphabet: Alphabet,
        gens: Vec<usize>,
        n: usize,
        table: Vec<usize>,
    ) -> Result<Self, SemigroupError> {
        if alphabet.size() == 0 || gens.len() != alphabet.size() {
            return Err(SemigroupError::EmptyAlphabet);
        }
        if table.len() != n * n {
            return Err(SemigroupError::NotSquare);
        }
        for i in 0..n {
            for j in 0..n {
                if table[i * n + j] >= n {
                    return Err(SemigroupError::OutOfRange(i, j));
                }
            }
        }
        check_associativity(n, &table)?;
        let reps = generate_reps(&alphabet, &gens, n, &table)?;
        Ok(FiniteASemigroup { alphabet, gens, n, table, reps, identity: None })
    }

    /// Construction from precomputed parts (transition semigroups,
    /// quotients).  Associativity is trusted for large tables but the
    /// representatives are always verified.
    pub fn from_parts(
        alphabet: Alphabet,
        gens: Vec<usize>,
        table: Vec<usize>,
        reps: Vec<Word>,
    ) -> Result<Self, SemigroupError> {
        let n = reps.len();
        if table.len() != n * n {
            return Err(SemigroupError::NotSquare);
        }
        if n <= 128 {
            check_associativity(n, &table)?;
        }
        let s = FiniteASemigroup { alphabet, gens, n, table, reps, identity: None };
        for i in 0..n {
            if s.reps[i].is_empty() {
                continue; // identity of a monoid view, set later
            }
            if s.eval(&s.reps[i]) != Some(i) {
                return Err(SemigroupError::BadRepresentative(i));
            }
        }
        Ok(s)
    }

    /// Quotient of the free semigroup by a two-sided bounded congruence.
    /// Exact only when the congruence is closed.
    pub fn from_presentation(
        alphabet: Alphabet,
        relations: &[(Word, Word)],
        bound: usize,
    ) -> Result<(Self, Certificate), SemigroupError> {
        let mut cong = Congruence::new(alphabet.size(), bound, false, true, false);
        for (u, v) in relations {
            cong.relate_words(u, v);
        }
        let s = Self::from_congruence(alphabet, &mut cong)?;
        Ok((s, Certificate::Closed))
    }

    /// Builds the quotient semigroup on the classes of a saturated
    /// two-sided congruence.
    pub fn from_congruence(
        alphabet: Alphabet,
        cong: &mut Congruence,
    ) -> Result<Self, SemigroupError> {
        if !cong.is_closed() {
            return Err(SemigroupError::UnclosedCongruence(cong.bound()));
        }
        let roots = cong.class_roots();
        let index: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let reps: Vec<Word> = roots
            .iter()
            .map(|&r| {
                let m = cong.min_member(r);
                cong.id_word(m)
            })
            .collect();
        let n = roots.len();
        let mut table = vec![0usize; n * n];
        for i in 0..n {
            for (j, rep) in reps.iter().enumerate() {
                let mut at = roots[i];
                for &a in rep {
                    at = cong
                        .step_right(at, a)
                        .expect("closed congruences extend every class");
                }
                table[i * n + j] = index[&at];
            }
        }
        let gens: Vec<usize> = alphabet
            .letters()
            .map(|a| {
                let id = cong.word_id(&[a]).expect("bound is at least 1");
                index[&cong.find(id)]
            })
            .collect();
        check_associativity(n, &table)?;
        FiniteASemigroup::from_parts(alphabet, gens, table, reps)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn gen_of(&self, a: Letter) -> usize {
        self.gens[a as usize]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y]
    }

    pub fn rep(&self, x: usize) -> &[Letter] {
        &self.reps[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Evaluates a word; `None` on the empty word unless an identity
    /// element has been designated.
    pub fn eval(&self, w: &[Letter]) -> Option<usize> {
        let mut it = w.iter();
        let mut acc = match it.next() {
            Some(&a) => self.gen_of(a),
            None => return self.identity,
        };
        for &a in it {
            acc = self.mul(acc, self.gen_of(a));
        }
        Some(acc)
    }

    pub fn set_identity(&mut self, e: usize) {
        debug_assert!((0..self.n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x));
        self.identity = Some(e);
    }

    pub fn identity_elem(&self) -> Option<usize> {
        (0..self.n).find(|&e| (0..self.n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.is_idempotent(x)).collect()
    }

    /// The unique idempotent power of `x`.
    pub fn omega(&self, x: usize) -> usize {
        let mut seen = HashMap::new();
        let mut p = x;
        let mut k = 1usize;
        loop {
            if let Some(&start) = seen.get(&p) {
                let cycle_len = k - start;
                // Some power inside the cycle is idempotent.
                let mut q = p;
                loop {
                    if self.mul(q, q) == q {
                        return q;
                    }
                    q = self.mul(q, x);
                    let _ = cycle_len;
                }
            }
            seen.insert(p, k);
            p = self.mul(p, x);
            k += 1;
        }
    }

    pub fn is_group(&self) -> bool {
        let Some(e) = self.identity_elem() else { return false };
        (0..self.n).all(|x| (0..self.n).any(|y| self.mul(x, y) == e && self.mul(y, x) == e))
    }

    /// The reversed A-semigroup: the transposed table, with reversed
    /// representative words.
    pub fn reversal(&self) -> Self {
        let mut table = vec![0usize; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                table[i * self.n + j] = self.mul(j, i);
            }
        }
        let reps = self
            .reps
            .iter()
            .map(|w| w.iter().rev().copied().collect())
            .collect();
        FiniteASemigroup {
            alphabet: self.alphabet.clone(),
            gens: self.gens.clone(),
            n: self.n,
            table,
            reps,
            identity: self.identity,
        }
    }

    /// Product in the monoid view `S^I`, with 0 the fresh identity and
    /// element x at index x+1.
    pub fn mul_si(&self, x: usize, y: usize) -> usize {
        if x == 0 {
            y
        } else if y == 0 {
            x
        } else {
            self.mul(x - 1, y - 1) + 1
        }
    }

    /// The right Cayley graph on `S^I` as a pointed deterministic
    /// automaton; the returned map sends vertices to elements (`None`
    /// for the adjoined identity at the root).
    pub fn cayley_right(&self) -> (PointedAutomaton, Vec<Option<usize>>) {
        self.cayley(false)
    }

    /// The left Cayley graph: edges act by multiplication on the left.
    pub fn cayley_left(&self) -> (PointedAutomaton, Vec<Option<usize>>) {
        self.cayley(true)
    }

    fn cayley(&self, left: bool) -> (PointedAutomaton, Vec<Option<usize>>) {
        let n = self.n;
        let mut g = DirectedGraph::new(n + 1);
        let mut labels = Vec::new();
        for v in 0..=n {
            for a in self.alphabet.letters() {
                let ga = self.gen_of(a) + 1;
                let t = if left { self.mul_si(ga, v) } else { self.mul_si(v, ga) };
                g.add_edge(v, t);
                labels.push(a);
            }
        }
        let aut = Automaton::new(g, labels, self.alphabet.clone())
            .expect("Cayley graphs are deterministic");
        let pointed = PointedAutomaton::new(aut, 0).expect("Cayley graphs are rooted at I");
        let vmap = (0..=n).map(|v| v.checked_sub(1)).collect();
        (pointed, vmap)
    }
}

/// The Cayley graph on the elements themselves, rooted at the identity
/// element.  This is the classical group/monoid Cayley graph, in
/// contrast with [`FiniteASemigroup::cayley_right`] which always
/// adjoins a fresh identity.
pub fn monoid_cayley(s: &FiniteASemigroup) -> Result<PointedAutomaton, SemigroupError> {
    let e = s.identity_elem().ok_or(SemigroupError::NotAMonoid)?;
    let n = s.len();
    let mut g = DirectedGraph::new(n);
    let mut labels = Vec::new();
    for v in 0..n {
        for a in s.alphabet.letters() {
            g.add_edge(v, s.mul(v, s.gen_of(a)));
            labels.push(a);
        }
    }
    let aut = Automaton::new(g, labels, s.alphabet.clone())
        .expect("Cayley graphs are deterministic");
    Ok(PointedAutomaton::new(aut, e).expect("monoids are rooted at their identity"))
}

fn check_associativity(n: usize, table: &[usize]) -> Result<(), SemigroupError> {
    for a in 0..n {
        for b in 0..n {
            let ab = table[a * n + b];
            for c in 0..n {
                if table[ab * n + c] != table[a * n + table[b * n + c]] {
                    return Err(SemigroupError::NotAssociative(a, b, c));
                }
            }
        }
    }
    Ok(())
}

/// Shortlex-minimal representative per element, breadth-first from the
/// generators.
fn generate_reps(
    alphabet: &Alphabet,
    gens: &[usize],
    n: usize,
    table: &[usize],
) -> Result<Vec<Word>, SemigroupError> {
    let mut reps: Vec<Option<Word>> = vec![None; n];
    let mut queue = VecDeque::new();
    for a in alphabet.letters() {
        let g = gens[a as usize];
        if reps[g].is_none() {
            reps[g] = Some(vec![a]);
            queue.push_back(g);
        }
    }
    while let Some(x) = queue.pop_front() {
        for a in alphabet.letters() {
            let y = table[x * n + gens[a as usize]];
            if reps[y].is_none() {
                let mut w = reps[x].clone().unwrap();
                w.push(a);
                reps[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    reps.into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or(SemigroupError::NotGenerated(i)))
        .collect()
}

/// Green's preorders, computed over `S^I` (index 0 is the adjoined
/// identity, element x sits at x+1).
#[derive(Debug, Clone)]
pub struct GreenData {
    pub n: usize,
    /// `geq_r[x][y]`: x ≥_R y, i.e. y ∈ x·S^I.
    pub geq_r: Vec<Vec<bool>>,
    pub geq_l: Vec<Vec<bool>>,
    pub geq_j: Vec<Vec<bool>>,
}

impl GreenData {
    pub fn si(x: usize) -> usize {
        x + 1
    }

    pub fn r_equiv(&self, x: usize, y: usize) -> bool {
        self.geq_r[x][y] && self.geq_r[y][x]
    }

    pub fn l_equiv(&self, x: usize, y: usize) -> bool {
        self.geq_l[x][y] && self.geq_l[y][x]
    }

    pub fn j_equiv(&self, x: usize, y: usize) -> bool {
        self.geq_j[x][y] && self.geq_j[y][x]
    }

    pub fn h_equiv(&self, x: usize, y: usize) -> bool {
        self.r_equiv(x, y) && self.l_equiv(x, y)
    }

    /// Number of J-classes among the semigroup elements (the adjoined
    /// identity excluded).
    pub fn num_j_classes(&self) -> usize {
        let mut classes = 0;
        let mut assigned = vec![false; self.n + 1];
        for x in 1..=self.n {
            if assigned[x] {
                continue;
            }
            for y in 1..=self.n {
                if self.j_equiv(x, y) {
                    assigned[y] = true;
                }
            }
            classes += 1;
        }
        classes
    }
}

pub fn green(s: &FiniteASemigroup) -> GreenData {
    let n = s.len();
    let m = n + 1;
    let mut geq_r = vec![vec![false; m]; m];
    let mut geq_l = vec![vec![false; m]; m];
    let mut geq_j = vec![vec![false; m]; m];
    for x in 0..m {
        // Right ideal x·S^I by closure under right multiplication.
        let mut seen = vec![false; m];
        seen[x] = true;
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            for a in s.alphabet.letters() {
                let z = s.mul_si(y, s.gen_of(a) + 1);
                if !seen[z] {
                    seen[z] = true;
                    queue.push(z);
                }
            }
        }
        geq_r[x] = seen;
        let mut seen = vec![false; m];
        seen[x] = true;
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            for a in s.alphabet.letters() {
                let z = s.mul_si(s.gen_of(a) + 1, y);
                if !seen[z] {
                    seen[z] = true;
                    queue.push(z);
                }
            }
        }
        geq_l[x] = seen;
        let mut seen = vec![false; m];
        seen[x] = true;
        let mut queue = vec![x];
        while let Some(y) = queue.pop() {
            for a in s.alphabet.letters() {
                for z in [s.mul_si(y, s.gen_of(a) + 1), s.mul_si(s.gen_of(a) + 1, y)] {
                    if !seen[z] {
                        seen[z] = true;
                        queue.push(z);
                    }
                }
            }
        }
        geq_j[x] = seen;
    }
    GreenData { n, geq_r, geq_l, geq_j }
}

pub fn is_regular(s: &FiniteASemigroup, x: usize) -> bool {
    (0..s.len()).any(|t| s.mul(s.mul(x, t), x) == x)
}

/// Length of the longest strictly increasing J-chain of idempotents
/// starting at `x^ω`.
pub fn algebraic_rank(s: &FiniteASemigroup, g: &GreenData, x: usize) -> usize {
    let idems = s.idempotents();
    let mut memo: HashMap<usize, usize> = HashMap::new();
    fn chain(
        e: usize,
        s: &FiniteASemigroup,
        g: &GreenData,
        idems: &[usize],
        memo: &mut HashMap<usize, usize>,
    ) -> usize {
        if let Some(&r) = memo.get(&e) {
            return r;
        }
        let mut best = 0;
        for &f in idems {
            let above = g.geq_j[GreenData::si(f)][GreenData::si(e)]
                && !g.geq_j[GreenData::si(e)][GreenData::si(f)];
            if above {
                best = best.max(1 + chain(f, s, g, idems, memo));
            }
        }
        memo.insert(e, best);
        best
    }
    chain(s.omega(x), s, g, &idems, &mut memo)
}

/// Right, left and double stabilizers of an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizers {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub double: Vec<usize>,
}

pub fn stabilizers(s: &FiniteASemigroup, x: usize) -> Stabilizers {
    let right: Vec<usize> = (0..s.len()).filter(|&t| s.mul(x, t) == x).collect();
    let left: Vec<usize> = (0..s.len()).filter(|&t| s.mul(t, x) == x).collect();
    let double = right.iter().copied().filter(|t| left.contains(t)).collect();
    Stabilizers { right, left, double }
}

/// An acceptor carved out of a Cayley graph, with provenance back to
/// `S^I` vertex indices.
#[derive(Debug, Clone)]
pub struct CayleyPiece {
    pub acceptor: Acceptor,
    /// Ambient `S^I` index of each local vertex.
    pub vertex_of: Vec<usize>,
}

/// The Schützenberger graph of `s`: the strong component of the right
/// Cayley graph at `s`, as an acceptor with `s` both initial and
/// terminal.  `si` indexes into `S^I` (0 is the identity).
pub fn schutzenberger(s: &FiniteASemigroup, si: usize) -> CayleyPiece {
    let (cay, _) = s.cayley_right();
    let frame = strong_components(&cay.automaton.graph);
    let comp = &frame.components[frame.component_of[si]];
    piece_from_subgraph(
        &cay,
        Subgraph::full(&cay.automaton.graph, comp.vertices.iter().copied()),
        si,
        si,
    )
}

fn piece_from_subgraph(
    cay: &PointedAutomaton,
    sub: Subgraph,
    root: usize,
    terminal: usize,
) -> CayleyPiece {
    let (graph, vmap, emap) = sub.extract(&cay.automaton.graph);
    let labels = emap.iter().map(|&e| cay.automaton.labels[e]).collect();
    let aut = Automaton::new(graph, labels, cay.automaton.alphabet.clone())
        .expect("subautomata of deterministic automata are partial deterministic");
    let local_root = vmap.iter().position(|&v| v == root).expect("root in piece");
    let local_term = vmap.iter().position(|&v| v == terminal).expect("terminal in piece");
    let pointed = PointedAutomaton::new(aut, local_root).expect("piece is rooted");
    CayleyPiece {
        acceptor: Acceptor::new(pointed, [local_term].into_iter().collect()),
        vertex_of: vmap,
    }
}

/// The straightline automaton of a word: the path it reads from the
/// identity, together with the strong components of the vertices the
/// path visits.  Initial state I, terminal state `[w]`.
pub fn str_automaton(s: &FiniteASemigroup, w: &[Letter]) -> CayleyPiece {
    let (cay, _) = s.cayley_right();
    let frame = strong_components(&cay.automaton.graph);
    let mut sub = Subgraph::empty();
    let mut at = 0usize;
    sub.vertices.insert(at);
    let mut path_comps = BTreeSet::new();
    path_comps.insert(frame.component_of[at]);
    for &a in w {
        let e = cay.automaton.edge_at(at, a).expect("Cayley graphs are complete");
        sub.insert_edge(&cay.automaton.graph, e);
        at = cay.automaton.graph.term(e);
        path_comps.insert(frame.component_of[at]);
    }
    for &c in &path_comps {
        let comp = &frame.components[c];
        sub.vertices.extend(comp.vertices.iter().copied());
        sub.edges.extend(comp.edges.iter().copied());
    }
    let terminal = at;
    piece_from_subgraph(&cay, sub, 0, terminal)
}

/// The Cayley automaton of a word: the full subgraph of the right
/// Cayley graph on the vertices R-above `[w]`.
pub fn cay_automaton(s: &FiniteASemigroup, w: &[Letter]) -> CayleyPiece {
    let (cay, _) = s.cayley_right();
    let target = s.eval(w).expect("non-empty word") + 1;
    let g = &cay.automaton.graph;
    let vs: Vec<usize> = g.vertices().filter(|&v| g.accessible(v, target)).collect();
    piece_from_subgraph(&cay, Subgraph::full(g, vs), 0, target)
}

/// Whether `a` is a subautomaton of `b` under the ambient indexing.
pub fn piece_subsumes(small: &CayleyPiece, big: &CayleyPiece) -> bool {
    let sv: BTreeSet<usize> = small.vertex_of.iter().copied().collect();
    let bv: BTreeSet<usize> = big.vertex_of.iter().copied().collect();
    if !sv.is_subset(&bv) {
        return false;
    }
    // Edge containment via (source, label) pairs, which determine edges
    // in a deterministic ambient graph.
    let edge_keys = |p: &CayleyPiece| -> BTreeSet<(usize, Letter)> {
        let aut = &p.acceptor.pointed.automaton;
        aut.graph
            .edges()
            .map(|e| (p.vertex_of[aut.graph.init(e)], aut.labels[e]))
            .collect()
    };
    edge_keys(small).is_subset(&edge_keys(big))
}

/// Equality of Cayley pieces as labeled graphs over `S^I`.
pub fn piece_equal(a: &CayleyPiece, b: &CayleyPiece) -> bool {
    piece_subsumes(a, b) && piece_subsumes(b, a)
}

/// The unique A-morphism between two A-semigroups, when it exists: the
/// relation {([w]_S, [w]_T)} is computed by closure and must be a
/// function.
pub fn a_morphism(from: &FiniteASemigroup, to: &FiniteASemigroup) -> Option<Vec<usize>> {
    assert_eq!(from.alphabet.size(), to.alphabet.size());
    let mut map: Vec<Option<usize>> = vec![None; from.len()];
    let mut queue = VecDeque::new();
    for a in from.alphabet.letters() {
        let x = from.gen_of(a);
        let y = to.gen_of(a);
        match map[x] {
            None => {
                map[x] = Some(y);
                queue.push_back(x);
            }
            Some(z) if z == y => {}
            Some(_) => return None,
        }
    }
    while let Some(x) = queue.pop_front() {
        let y = map[x].unwrap();
        for a in from.alphabet.letters() {
            let xa = from.mul(x, from.gen_of(a));
            let ya = to.mul(y, to.gen_of(a));
            match map[xa] {
                None => {
                    map[xa] = Some(ya);
                    queue.push_back(xa);
                }
                Some(z) if z == ya => {}
                Some(_) => return None,
            }
        }
    }
    map.into_iter().collect()
}

/// A-isomorphism: the canonical A-morphism exists and is bijective.
pub fn a_isomorphic(a: &FiniteASemigroup, b: &FiniteASemigroup) -> bool {
    if a.len() != b.len() {
        return false;
    }
    match a_morphism(a, b) {
        None => false,
        Some(map) => {
            let mut hit = vec![false; b.len()];
            for y in map {
                hit[y] = true;
            }
            hit.into_iter().all(|h| h)
        }
    }
}

/// Searches for a word whose prefixes (including the empty one) visit
/// every element of a finite group exactly once: a simple path through
/// the whole Cayley graph starting at the identity.
pub fn hamiltonian_word_search(
    s: &FiniteASemigroup,
    cap: usize,
) -> Result<Option<Word>, SemigroupError> {
    if !s.is_group() || s.len() < 3 {
        return Err(SemigroupError::NotAGroup);
    }
    let e = s.identity_elem().expect("groups have an identity");
    let mut visited = vec![false; s.len()];
    visited[e] = true;
    let mut word = Vec::new();
    let mut nodes = 0usize;
    fn dfs(
        s: &FiniteASemigroup,
        at: usize,
        visited: &mut Vec<bool>,
        word: &mut Word,
        count: usize,
        nodes: &mut usize,
        cap: usize,
    ) -> Result<bool, SemigroupError> {
        *nodes += 1;
        if *nodes > cap {
            return Err(SemigroupError::SearchCapExceeded(cap));
        }
        if count == s.len() {
            return Ok(true);
        }
        for a in s.alphabet().letters() {
            let next = s.mul(at, s.gen_of(a));
            if !visited[next] {
                visited[next] = true;
                word.push(a);
                if dfs(s, next, visited, word, count + 1, nodes, cap)? {
                    return Ok(true);
                }
                word.pop();
                visited[next] = false;
            }
        }
        Ok(false)
    }
    let found = dfs(s, e, &mut visited, &mut word, 1, &mut nodes, cap)?;
    Ok(found.then_some(word))
}

/// Whether the straightline and Cayley automata agree for every word.
/// A straightline automaton is determined by its endpoint and the
/// transition edges its word crossed, so the finite space of such
/// states is explored outright; the first failing state's witness word
/// is returned.
pub fn str_equals_cay_everywhere(
    s: &FiniteASemigroup,
    state_cap: usize,
) -> Result<Option<Word>, SemigroupError> {
    let (cay, _) = s.cayley_right();
    let g = &cay.automaton.graph;
    let frame = strong_components(g);
    // Reverse reachability: vertices R-above v, computed on demand.
    let mut above_memo: HashMap<usize, std::rc::Rc<Vec<bool>>> = HashMap::new();
    let mut above = |v: usize| -> std::rc::Rc<Vec<bool>> {
        if let Some(a) = above_memo.get(&v) {
            return a.clone();
        }
        let mut seen = vec![false; g.num_vertices()];
        seen[v] = true;
        let mut queue = vec![v];
        while let Some(x) = queue.pop() {
            for &e in g.in_edges(x) {
                let y = g.init(e);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        let rc = std::rc::Rc::new(seen);
        above_memo.insert(v, rc.clone());
        rc
    };
    type State = (usize, BTreeSet<usize>);
    let mut seen: BTreeSet<State> = BTreeSet::new();
    let mut queue: VecDeque<(State, Word)> = VecDeque::new();
    for a in s.alphabet().letters() {
        let e = cay.automaton.edge_at(0, a).unwrap();
        let mut used = BTreeSet::new();
        if frame.is_transition(e) {
            used.insert(e);
        }
        let state = (g.term(e), used);
        if seen.insert(state.clone()) {
            queue.push_back((state, vec![a]));
        }
    }
    while let Some(((v, used), w)) = queue.pop_front() {
        if seen.len() > state_cap {
            return Err(SemigroupError::SearchCapExceeded(state_cap));
        }
        // Straightline vertex set: the components entered by the run.
        let mut str_vs = vec![false; g.num_vertices()];
        let mark = |set: &mut Vec<bool>, comp: usize| {
            for &x in &frame.components[comp].vertices {
                set[x] = true;
            }
        };
        mark(&mut str_vs, frame.component_of[0]);
        for &e in &used {
            mark(&mut str_vs, frame.component_of[g.term(e)]);
        }
        let cay_vs = above(v);
        if str_vs != *cay_vs {
            return Ok(Some(w));
        }
        for &e in &frame.transition_edges {
            if cay_vs[g.init(e)] && cay_vs[g.term(e)] && !used.contains(&e) {
                return Ok(Some(w));
            }
        }
        for a in s.alphabet().letters() {
            let e = cay.automaton.edge_at(v, a).unwrap();
            let mut used2 = used.clone();
            if frame.is_transition(e) {
                used2.insert(e);
            }
            let state = (g.term(e), used2);
            if seen.insert(state.clone()) {
                let mut w2 = w.clone();
                w2.push(a);
                queue.push_back((state, w2));
            }
        }
    }
    Ok(None)
}

/// The quotient by the congruence generated by the given element pairs,
/// with the class map.
pub fn quotient_by_pairs(
    s: &FiniteASemigroup,
    pairs: &[(usize, usize)],
) -> (FiniteASemigroup, Vec<usize>) {
    let n = s.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut pending: Vec<(usize, usize)> = pairs.to_vec();
    while let Some((x, y)) = pending.pop() {
        let rx = find(&mut parent, x);
        let ry = find(&mut parent, y);
        if rx == ry {
            continue;
        }
        parent[rx.max(ry)] = rx.min(ry);
        for z in 0..n {
            pending.push((s.mul(rx, z), s.mul(ry, z)));
            pending.push((s.mul(z, rx), s.mul(z, ry)));
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for x in 0..n {
        let r = find(&mut parent, x);
        if class_of[r] == usize::MAX {
            class_of[r] = classes.len();
            classes.push(r);
        }
        class_of[x] = class_of[r];
    }
    let m = classes.len();
    let mut table = vec![0usize; m * m];
    for (i, &x) in classes.iter().enumerate() {
        for (j, &y) in classes.iter().enumerate() {
            table[i * m + j] = class_of[s.mul(x, y)];
        }
    }
    let gens = s.gens().iter().map(|&g| class_of[g]).collect();
    let q = FiniteASemigroup::from_table(s.alphabet().clone(), gens, m, table)
        .expect("quotients of valid tables are valid");
    (q, class_of)
}

/// The subsemigroup generated by the seeds, as an A-semigroup over one
/// letter per seed; the second component embeds it back.
pub fn subsemigroup_of(
    s: &FiniteASemigroup,
    seeds: &[usize],
) -> (FiniteASemigroup, Vec<usize>) {
    let mut members: Vec<usize> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &x in seeds {
        if !index.contains_key(&x) {
            index.insert(x, members.len());
            members.push(x);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &g in seeds {
            for y in [s.mul(x, g), s.mul(g, x)] {
                if !index.contains_key(&y) {
                    index.insert(y, members.len());
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    let m = members.len();
    let mut table = vec![0usize; m * m];
    for i in 0..m {
        for j in 0..m {
            table[i * m + j] = index[&s.mul(members[i], members[j])];
        }
    }
    let gens: Vec<usize> = seeds.iter().map(|x| index[x]).collect();
    let alphabet = Alphabet::latin(gens.len());
    let t = FiniteASemigroup::from_table(alphabet, gens, m, table)
        .expect("subsemigroups of valid tables are valid");
    (t, members)
}

/// Every associative table on `0..n`, up to isomorphism: backtracking
/// over table cells with incremental associativity pruning, then
/// canonical-form deduplication over all relabelings.
pub fn enumerate_semigroups(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return Vec::new();
    }
    let mut table = vec![usize::MAX; n * n];
    let mut out = Vec::new();
    fill(n, 0, &mut table, &mut out);
    let perms = permutations(n);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut reps = Vec::new();
    for t in out {
        let canon = perms
            .iter()
            .map(|p| relabel(n, &t, p))
            .min()
            .expect("at least the identity permutation");
        if seen.insert(canon.clone()) {
            reps.push(canon);
        }
    }
    reps
}

fn fill(n: usize, cell: usize, table: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cell == n * n {
        out.push(table.clone());
        return;
    }
    let (i, j) = (cell / n, cell % n);
    for v in 0..n {
        table[cell] = v;
        if partial_associative(n, table, i, j) {
            fill(n, cell + 1, table, out);
        }
    }
    table[cell] = usize::MAX;
}

/// Checks every associativity triple that the new cell (i,j) completes.
fn partial_associative(n: usize, t: &[usize], i: usize, j: usize) -> bool {
    let get = |a: usize, b: usize| -> Option<usize> {
        let v = t[a * n + b];
        (v != usize::MAX).then_some(v)
    };
    let check = |a: usize, b: usize, c: usize| -> bool {
        match (get(a, b), get(b, c)) {
            (Some(ab), Some(bc)) => match (get(ab, c), get(a, bc)) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            },
            _ => true,
        }
    };
    for x in 0..n {
        // Triples where (i,j) occurs as a factor pair.
        if !check(i, j, x) || !check(x, i, j) {
            return false;
        }
    }
    // Triples (a,b,c) where (i,j) is (ab,c) or (a,bc).
    for a in 0..n {
        for b in 0..n {
            if let Some(ab) = get(a, b) {
                if ab == i && !check(a, b, j) {
                    return false;
                }
            }
            if get(b, a) == Some(j) && !check(i, b, a) {
                return false;
            }
        }
    }
    true
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k % 2 == 0 {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out
}

fn relabel(n: usize, t: &[usize], p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; n];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi] = i;
    }
    let mut out = vec![0usize; n * n];
    for a in 0..n {
        for b in 0..n {
            out[a * n + b] = p[t[inv[a] * n + inv[b]]];
        }
    }
    out
}

/// Smallest generating subset of a table, by exhaustive subset search
/// in increasing size (intended for small catalog semigroups).
pub fn minimal_generating_set(n: usize, table: &[usize]) -> Vec<usize> {
    let closure_is_all = |gens: &[usize]| -> bool {
        let mut seen = vec![false; n];
        let mut queue: Vec<usize> = gens.to_vec();
        for &g in gens {
            seen[g] = true;
        }
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = table[x * n + g];
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
                let z = table[g * n + x];
                if !seen[z] {
                    seen[z] = true;
                    queue.push(z);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let gens: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if closure_is_all(&gens) {
            return gens;
        }
    }
    (0..n).collect()
}

/// Wraps a bare table as an A-semigroup generated by the given subset
/// (whole element set by default).
pub fn table_as_a_semigroup(
    n: usize,
    table: Vec<usize>,
    gens: Option<Vec<usize>>,
) -> Result<FiniteASemigroup, SemigroupError> {
    let gens = gens.unwrap_or_else(|| (0..n).collect());
    let alphabet = Alphabet::latin(gens.len());
    FiniteASemigroup::from_table(alphabet, gens, n, table)
}

/// Ready-made instances used across the test batteries.
pub mod instances {
    use super::*;

    /// The trivial semigroup viewed as generated by `k` letters.
    pub fn trivial(k: usize) -> FiniteASemigroup {
        FiniteASemigroup::from_table(Alphabet::latin(k), vec![0; k], 1, vec![0]).unwrap()
    }

    /// The right zero semigroup on `k` letters.
    pub fn right_zero(k: usize) -> FiniteASemigroup {
        let mut table = vec![0usize; k * k];
        for i in 0..k {
            for j in 0..k {
                table[i * k + j] = j;
            }
        }
        FiniteASemigroup::from_table(Alphabet::latin(k), (0..k).collect(), k, table).unwrap()
    }

    /// The cyclic group of order `m`, generated by one letter.
    pub fn cyclic(m: usize) -> FiniteASemigroup {
        let mut table = vec![0usize; m * m];
        for i in 0..m {
            for j in 0..m {
                // element x stands for the (x+1)-st power of the generator
                table[i * m + j] = (i + j + 1) % m;
            }
        }
        FiniteASemigroup::from_table(Alphabet::latin(1), vec![0], m, table).unwrap()
    }

    /// The Klein four-group on generators a, b; elements a, b, ab, 1.
    pub fn klein_four() -> FiniteASemigroup {
        let (s, cert) = FiniteASemigroup::from_presentation(
            Alphabet::latin(2),
            &[
                (vec![0, 0], vec![1, 1]),
                (vec![0, 0, 0], vec![0]),
                (vec![0, 0, 1], vec![1]),
                (vec![0, 1], vec![1, 0]),
            ],
            8,
        )
        .unwrap();
        assert_eq!(cert, Certificate::Closed);
        assert_eq!(s.len(), 4);
        s
    }

    /// The chain semilattice {0..=k} under max, every element a
    /// generator.
    pub fn max_chain(k: usize) -> FiniteASemigroup {
        let n = k + 1;
        let mut table = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = i.max(j);
            }
        }
        table_as_a_semigroup(n, table, None).unwrap()
    }

    /// The chain semilattice with its top inflated into a two-element
    /// null pocket {n, n'}.
    pub fn inflated_max_chain(k: usize) -> FiniteASemigroup {
        let n = k + 2; // elements 0..=k plus n' at index k+1
        let top = k;
        let prime = k + 1;
        let mut table = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                let x = if i == prime || j == prime {
                    if i == prime && j == prime {
                        prime
                    } else {
                        top
                    }
                } else {
                    i.max(j)
                };
                table[i * n + j] = x;
            }
        }
        table_as_a_semigroup(n, table, None).unwrap()
    }

    /// The two-element null semigroup {a, 0} with a·a = 0.
    pub fn null_two() -> FiniteASemigroup {
        // index 0 = a, index 1 = zero
        let table = vec![1, 1, 1, 1];
        FiniteASemigroup::from_table(Alphabet::latin(1), vec![0], 2, table).unwrap()
    }
}
