//! Union-free Kleene expressions for trim acceptors with the unique
//! simple path property and a single terminal state.
//!
//! The synthesis recurses on (number of bold arrows, number of states):
//! a bold-arrow-free acceptor is its geodesic; several strong
//! components split at the last transition edge; a single component
//! peels off the top-ranked bold arrow into the root, reading it
//! through the cut sloop.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::Acceptor;
use crate::digraph::{strong_components, DirectedGraph, RootedGraph, Subgraph};
use crate::uspp::{
    closure, cut_sloop, has_uspp, validate_rank, GeometricRank,
};
use crate::words::{Alphabet, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum KleeneError {
    #[error("acceptor must have exactly one terminal state, found {0}")]
    TerminalCount(usize),
    #[error("acceptor is not trim: state {0} reaches no terminal")]
    NotTrim(usize),
    #[error("acceptor lacks the unique simple path property at state {0}")]
    NoUspp(usize),
    #[error("invalid rank function at state {0}")]
    InvalidRank(usize),
    #[error("expression parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A union-free regular expression.  Concatenations are kept flattened
/// and empty factors dropped; a star of the empty expression is the
/// empty expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KleeneExpr {
    Empty,
    Letter(Letter),
    Concat(Vec<KleeneExpr>),
    Star(Box<KleeneExpr>),
}

impl KleeneExpr {
    pub fn concat(items: Vec<KleeneExpr>) -> KleeneExpr {
        let mut flat = Vec::new();
        for item in items {
            match item {
                KleeneExpr::Empty => {}
                KleeneExpr::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => KleeneExpr::Empty,
            1 => flat.pop().unwrap(),
            _ => KleeneExpr::Concat(flat),
        }
    }

    pub fn star(e: KleeneExpr) -> KleeneExpr {
        match e {
            KleeneExpr::Empty => KleeneExpr::Empty,
            other => KleeneExpr::Star(Box::new(other)),
        }
    }

    pub fn of_word(w: &[Letter]) -> KleeneExpr {
        KleeneExpr::concat(w.iter().map(|&a| KleeneExpr::Letter(a)).collect())
    }

    /// Maximum star nesting depth.
    pub fn star_height(&self) -> usize {
        match self {
            KleeneExpr::Empty | KleeneExpr::Letter(_) => 0,
            KleeneExpr::Concat(items) => items.iter().map(|e| e.star_height()).max().unwrap_or(0),
            KleeneExpr::Star(inner) => 1 + inner.star_height(),
        }
    }

    /// Canonical text: letters verbatim, concatenation by juxtaposition,
    /// star as `(…)*` with parentheses omitted around single letters.
    /// The empty expression prints as ε.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        fn go(e: &KleeneExpr, alphabet: &Alphabet, out: &mut String) {
            match e {
                KleeneExpr::Empty => {}
                KleeneExpr::Letter(a) => out.push_str(alphabet.name(*a)),
                KleeneExpr::Concat(items) => {
                    for item in items {
                        go(item, alphabet, out);
                    }
                }
                KleeneExpr::Star(inner) => {
                    match **inner {
                        KleeneExpr::Letter(a) => out.push_str(alphabet.name(a)),
                        ref other => {
                            out.push('(');
                            go(other, alphabet, out);
                            out.push(')');
                        }
                    }
                    out.push('*');
                }
            }
        }
        let mut out = String::new();
        go(self, alphabet, &mut out);
        if out.is_empty() {
            "ε".to_string()
        } else {
            out
        }
    }

    /// The exact set of denoted words of length at most `n` (including
    /// the empty word when denoted).
    pub fn language_upto(&self, n: usize) -> BTreeSet<Word> {
        match self {
            KleeneExpr::Empty => [Word::new()].into_iter().collect(),
            KleeneExpr::Letter(a) => {
                let mut out = BTreeSet::new();
                if n >= 1 {
                    out.insert(vec![*a]);
                }
                out
            }
            KleeneExpr::Concat(items) => {
                let mut acc: BTreeSet<Word> = [Word::new()].into_iter().collect();
                for item in items {
                    let rhs = item.language_upto(n);
                    let mut next = BTreeSet::new();
                    for l in &acc {
                        for r in &rhs {
                            if l.len() + r.len() <= n {
                                let mut w = l.clone();
                                w.extend_from_slice(r);
                                next.insert(w);
                            }
                        }
                    }
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            KleeneExpr::Star(inner) => {
                let base = inner.language_upto(n);
                let mut acc: BTreeSet<Word> = [Word::new()].into_iter().collect();
                loop {
                    let mut grew = false;
                    let snapshot: Vec<Word> = acc.iter().cloned().collect();
                    for l in &snapshot {
                        for r in &base {
                            if l.len() + r.len() <= n && !r.is_empty() {
                                let mut w = l.clone();
                                w.extend_from_slice(r);
                                grew |= acc.insert(w);
                            }
                        }
                    }
                    if !grew {
                        return acc;
                    }
                }
            }
        }
    }
}

/// Parses expression text over an alphabet.  Both bracket styles are
/// accepted for grouping; ε denotes the empty expression.
pub fn parse_expr(alphabet: &Alphabet, text: &str) -> Result<KleeneExpr, KleeneError> {
    #[derive(Debug, PartialEq)]
    enum Tok {
        Letter(Letter),
        Open,
        Close,
        Star,
        Epsilon,
    }
    let mut toks = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        match c {
            '(' | '[' => {
                toks.push(Tok::Open);
                rest = &rest[c.len_utf8()..];
            }
            ')' | ']' => {
                toks.push(Tok::Close);
                rest = &rest[c.len_utf8()..];
            }
            '*' => {
                toks.push(Tok::Star);
                rest = &rest[1..];
            }
            'ε' => {
                toks.push(Tok::Epsilon);
                rest = &rest['ε'.len_utf8()..];
            }
            _ if c.is_whitespace() => rest = &rest[c.len_utf8()..],
            _ => {
                let mut best: Option<(usize, Letter)> = None;
                for (i, n) in alphabet.names().iter().enumerate() {
                    if rest.starts_with(n.as_str()) && best.map_or(true, |(l, _)| n.len() > l) {
                        best = Some((n.len(), i as Letter));
                    }
                }
                let (len, l) =
                    best.ok_or_else(|| KleeneError::Parse(format!("unknown token at {rest:?}")))?;
                toks.push(Tok::Letter(l));
                rest = &rest[len..];
            }
        }
    }
    // expr := factor* ; factor := atom '*'* ; atom := letter | (expr) | ε
    fn parse_seq(toks: &[Tok], mut i: usize) -> Result<(KleeneExpr, usize), KleeneError> {
        let mut items = Vec::new();
        while i < toks.len() {
            let (atom, next) = match &toks[i] {
                Tok::Letter(l) => (KleeneExpr::Letter(*l), i + 1),
                Tok::Epsilon => (KleeneExpr::Empty, i + 1),
                Tok::Open => {
                    let (inner, after) = parse_seq(toks, i + 1)?;
                    if after >= toks.len() || toks[after] != Tok::Close {
                        return Err(KleeneError::Parse("unbalanced bracket".into()));
                    }
                    (inner, after + 1)
                }
                Tok::Close => break,
                Tok::Star => return Err(KleeneError::Parse("dangling star".into())),
            };
            let mut e = atom;
            i = next;
            while i < toks.len() && toks[i] == Tok::Star {
                e = KleeneExpr::star(e);
                i += 1;
            }
            items.push(e);
        }
        Ok((KleeneExpr::concat(items), i))
    }
    let (e, end) = parse_seq(&toks, 0)?;
    if end != toks.len() {
        return Err(KleeneError::Parse("unbalanced bracket".into()));
    }
    Ok(e)
}

struct View {
    g: DirectedGraph,
    labels: Vec<Letter>,
    root: usize,
    terminal: usize,
    /// Local edge id to the edge id of the original acceptor.
    orig: Vec<usize>,
}

impl View {
    fn sub_view(&self, sub: &Subgraph, root: usize, terminal: usize) -> View {
        let (g, vmap, emap) = sub.extract(&self.g);
        let labels = emap.iter().map(|&e| self.labels[e]).collect();
        let orig = emap.iter().map(|&e| self.orig[e]).collect();
        let root = vmap.iter().position(|&v| v == root).expect("root kept");
        let terminal = vmap.iter().position(|&v| v == terminal).expect("terminal kept");
        View { g, labels, root, terminal, orig }
    }
}

/// The standard union-free expression of a trim single-terminal
/// acceptor with the unique simple path property, for a given rank.
pub fn kleene(acc: &Acceptor, rank: &GeometricRank) -> Result<KleeneExpr, KleeneError> {
    if acc.terminals.len() != 1 {
        return Err(KleeneError::TerminalCount(acc.terminals.len()));
    }
    let terminal = *acc.terminals.iter().next().unwrap();
    if let Err(crate::automaton::AutomatonError::NotTrim(v)) = acc.is_trim() {
        return Err(KleeneError::NotTrim(v));
    }
    let rg = acc.pointed.rooted_graph();
    let u = has_uspp(&rg).map_err(|cx| KleeneError::NoUspp(cx.vertex))?;
    if let Err(crate::uspp::UsppError::BadRank(v)) =
        validate_rank(&acc.pointed.automaton.graph, &u, rank)
    {
        return Err(KleeneError::InvalidRank(v));
    }
    let g = acc.pointed.automaton.graph.clone();
    let view = View {
        labels: acc.pointed.automaton.labels.clone(),
        orig: g.edges().collect(),
        g,
        root: acc.pointed.root,
        terminal,
    };
    Ok(synth(view, rank))
}

fn synth(view: View, rank: &GeometricRank) -> KleeneExpr {
    let rg = RootedGraph::new(view.g.clone(), view.root)
        .expect("every synthesized view is rooted");
    let u = has_uspp(&rg).expect("every synthesized view keeps the property");

    if u.bold.is_empty() {
        let geo = u.geodesic(&view.g, view.terminal);
        let word: Word = geo.edges.iter().map(|&e| view.labels[e]).collect();
        return KleeneExpr::of_word(&word);
    }

    let frame = strong_components(&view.g);
    let k1 = frame.num_components();
    if k1 > 1 {
        // Split at the last transition edge.
        debug_assert!(frame.is_linear(&view.g));
        let mut transitions = frame.transition_edges.clone();
        transitions.sort_by_key(|&e| frame.component_of[view.g.term(e)]);
        let last = *transitions.last().unwrap();
        let q_prev = view.g.init(last);
        let p_last = view.g.term(last);
        debug_assert_eq!(frame.component_of[view.terminal], k1 - 1);

        let upper: Vec<usize> = (0..k1 - 1)
            .flat_map(|c| frame.components[c].vertices.iter().copied())
            .collect();
        let upper_view = view.sub_view(&Subgraph::full(&view.g, upper), view.root, q_prev);
        let bottom = Subgraph::full(&view.g, frame.components[k1 - 1].vertices.iter().copied());
        let bottom_view = view.sub_view(&bottom, p_last, view.terminal);
        let label = view.labels[last];
        return KleeneExpr::concat(vec![
            synth(upper_view, rank),
            KleeneExpr::Letter(label),
            synth(bottom_view, rank),
        ]);
    }

    // One strong component with bold arrows: peel the top-ranked bold
    // arrow into the root.
    let bundle = u.bold_into(&view.g, view.root);
    debug_assert!(!bundle.is_empty(), "a strongly connected component has a return to its root");
    let e = *bundle
        .iter()
        .max_by_key(|&&e| rank.rank[&view.orig[e]])
        .unwrap();

    // The component of the root once e is removed.
    let mut without = Subgraph::full(&view.g, view.g.vertices());
    without.edges.remove(&e);
    let (wg, wvmap, wemap) = without.extract(&view.g);
    let wframe = strong_components(&wg);
    let local_root = wvmap.iter().position(|&v| v == view.root).unwrap();
    let comp = &wframe.components[wframe.component_of[local_root]];
    let b_sub = Subgraph {
        vertices: comp.vertices.iter().map(|&v| wvmap[v]).collect(),
        edges: comp.edges.iter().map(|&x| wemap[x]).collect(),
    };
    let b_view = view.sub_view(&b_sub, view.root, view.root);
    let b_expr = synth(b_view, rank);

    let cs = cut_sloop(&view.g, &u, e).expect("the chosen arrow is bold");
    let cut_view = View {
        labels: cs.orig_edge.iter().map(|&x| view.labels[x]).collect(),
        orig: cs.orig_edge.iter().map(|&x| view.orig[x]).collect(),
        root: cs.graph.root,
        terminal: cs.u_prime,
        g: cs.graph.graph,
    };
    let cut_expr = synth(cut_view, rank);

    let geo = u.geodesic(&view.g, view.terminal);
    let closed = closure(&view.g, &u, &Subgraph::of_path(&view.g, &geo), view.root)
        .expect("geodesics lie below the root");
    let tail_view = view.sub_view(&closed, view.root, view.terminal);
    let tail_expr = synth(tail_view, rank);

    KleeneExpr::concat(vec![
        b_expr.clone(),
        KleeneExpr::star(KleeneExpr::concat(vec![cut_expr, b_expr])),
        tail_expr,
    ])
}

/// The seven worked acceptors, with the rank choices they assume.
pub mod fixtures {
    use super::*;
    use crate::automaton::{Automaton, PointedAutomaton};
    use crate::uspp::GeometricRank;

    pub struct Fixture {
        pub acceptor: Acceptor,
        pub rank: GeometricRank,
        /// The expression as typeset in the source material.
        pub expected: &'static str,
    }

    fn assemble(
        names: &[&str],
        n: usize,
        edges: &[(usize, &str, usize)],
        root: usize,
        terminal: usize,
        high_rank: Option<&str>,
        expected: &'static str,
    ) -> Fixture {
        let alphabet = Alphabet::of_strs(names);
        let mut g = DirectedGraph::new(n);
        let mut labels = Vec::new();
        for &(a, l, b) in edges {
            g.add_edge(a, b);
            labels.push(alphabet.index(l).unwrap());
        }
        let aut = Automaton::new(g, labels, alphabet).unwrap();
        let pointed = PointedAutomaton::new(aut, root).unwrap();
        let acc = Acceptor::new(pointed, [terminal].into_iter().collect());
        let u = has_uspp(&acc.pointed.rooted_graph()).unwrap();
        let mut rank =
            crate::uspp::default_rank(&acc.pointed.automaton.graph, &u, None);
        if let Some(name) = high_rank {
            // Promote the named bold arrow to the top of its bundle.
            let alphabet = &acc.pointed.automaton.alphabet;
            let l = alphabet.index(name).unwrap();
            let g = &acc.pointed.automaton.graph;
            let e = g
                .edges()
                .find(|&e| acc.pointed.automaton.labels[e] == l)
                .expect("named edge exists");
            let tip = g.term(e);
            let mut bundle = u.bold_into(g, tip);
            bundle.retain(|&f| f != e);
            bundle.push(e);
            for (i, &f) in bundle.iter().enumerate() {
                rank.rank.insert(f, i);
            }
        }
        validate_rank(&acc.pointed.automaton.graph, &u, &rank).unwrap();
        Fixture { acceptor: acc, rank, expected }
    }

    pub fn all() -> Vec<Fixture> {
        vec![
            assemble(
                &["Δ", "α"],
                2,
                &[(0, "Δ", 1), (1, "α", 1)],
                0,
                1,
                None,
                "Δα*",
            ),
            assemble(
                &["Δ", "α₁", "α₂"],
                3,
                &[(0, "Δ", 1), (1, "α₁", 2), (2, "α₂", 1)],
                0,
                2,
                None,
                "Δ(α₁α₂)*α₁",
            ),
            assemble(
                &["Δ", "a", "b", "c", "d"],
                4,
                &[(0, "Δ", 1), (1, "a", 2), (2, "b", 3), (3, "d", 2), (3, "c", 1)],
                0,
                1,
                None,
                "Δ(a(bd)*bc)*",
            ),
            assemble(
                &["Δ", "a", "b", "c", "d"],
                4,
                &[(0, "Δ", 1), (1, "a", 2), (2, "b", 3), (3, "d", 2), (3, "c", 1)],
                0,
                3,
                None,
                "Δ(a(bd)*bc)*a(bd)*b",
            ),
            assemble(
                &["Δ", "α", "β"],
                2,
                &[(0, "Δ", 1), (1, "α", 1), (1, "β", 1)],
                0,
                1,
                Some("β"),
                "Δα*(βα*)*",
            ),
            assemble(
                &["Δ", "α₁", "α₂", "β", "γ"],
                3,
                &[(0, "Δ", 1), (1, "α₁", 2), (2, "γ", 2), (2, "α₂", 1), (1, "β", 1)],
                0,
                1,
                Some("β"),
                "Δ(α₁γ*α₂)*[β(α₁γ*α₂)*]*",
            ),
            assemble(
                &["Δ", "α₁", "α₂", "α₃", "β", "γ"],
                4,
                &[
                    (0, "Δ", 1),
                    (1, "α₁", 2),
                    (2, "γ", 2),
                    (2, "α₂", 3),
                    (3, "α₃", 1),
                    (1, "β", 1),
                ],
                0,
                3,
                Some("α₃"),
                "Δβ*[(α₁γ*α₂α₃)β*]*α₁γ*α₂",
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_heights() {
        let al = Alphabet::of_strs(&["a", "b"]);
        assert_eq!(parse_expr(&al, "a").unwrap().star_height(), 0);
        assert_eq!(parse_expr(&al, "ab*").unwrap().star_height(), 1);
        let e = parse_expr(&al, "(ab*a)*[b(ab*a)*]*").unwrap();
        assert_eq!(e.star_height(), 3);
        let e = parse_expr(&al, "(aba)*[b(aba)*]*").unwrap();
        assert_eq!(e.star_height(), 2);
    }

    #[test]
    fn worked_example_star_height() {
        // The sixth worked expression: γ* sits inside (α₁γ*α₂)* which
        // sits inside the outer starred factor, so the nesting depth
        // counted by the oracle is three.
        let f = &fixtures::all()[5];
        let al = &f.acceptor.pointed.automaton.alphabet;
        assert_eq!(parse_expr(al, f.expected).unwrap().star_height(), 3);
    }

    #[test]
    fn language_of_empty_and_simple_concat() {
        let al = Alphabet::of_strs(&["a", "d"]);
        let e = KleeneExpr::Empty;
        assert_eq!(e.language_upto(5).len(), 1);
        let e = parse_expr(&al, "da*").unwrap();
        let lang = e.language_upto(3);
        let expect: BTreeSet<Word> = [
            al.parse_word("d").unwrap(),
            al.parse_word("da").unwrap(),
            al.parse_word("daa").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(lang, expect);
    }

    #[test]
    fn canonicalization_drops_empty_and_flattens() {
        let a = KleeneExpr::Letter(0);
        let e = KleeneExpr::concat(vec![
            KleeneExpr::Empty,
            KleeneExpr::concat(vec![a.clone(), KleeneExpr::Empty, a.clone()]),
            KleeneExpr::star(KleeneExpr::Empty),
        ]);
        assert_eq!(e, KleeneExpr::Concat(vec![a.clone(), a]));
    }

    #[test]
    fn parser_accepts_both_bracket_styles() {
        let al = Alphabet::of_strs(&["a", "b"]);
        let e1 = parse_expr(&al, "a[ba]*").unwrap();
        let e2 = parse_expr(&al, "a(ba)*").unwrap();
        assert_eq!(e1, e2);
        assert!(parse_expr(&al, "a(b").is_err());
        assert!(parse_expr(&al, "*a").is_err());
    }

    #[test]
    fn seven_worked_expressions() {
        for (i, f) in fixtures::all().iter().enumerate() {
            let got = kleene(&f.acceptor, &f.rank).unwrap();
            let al = &f.acceptor.pointed.automaton.alphabet;
            let want = parse_expr(al, f.expected).unwrap();
            assert_eq!(got, want, "example {}: got {}", i + 1, got.display(al));
            assert_eq!(got.display(al), want.display(al));
        }
    }

    #[test]
    fn worked_expressions_match_their_languages() {
        for f in fixtures::all() {
            let e = kleene(&f.acceptor, &f.rank).unwrap();
            let by_expr = e.language_upto(12);
            let by_acceptor = f.acceptor.language_upto(12, true);
            assert_eq!(by_expr, by_acceptor);
        }
    }

    #[test]
    fn language_equality_on_random_acceptors() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(163);
        for _ in 0..60 {
            let (acc, rank) = crate::gen::random_uspp_acceptor(&mut rng, 8, 4);
            let e = kleene(&acc, &rank).unwrap();
            assert_eq!(e.language_upto(10), acc.language_upto(10, true));
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(167);
        for _ in 0..20 {
            let (acc, rank) = crate::gen::random_uspp_acceptor(&mut rng, 7, 3);
            assert_eq!(kleene(&acc, &rank).unwrap(), kleene(&acc, &rank).unwrap());
        }
    }

    #[test]
    fn rank_changes_tree_but_not_language() {
        let mut fs = fixtures::all();
        let f = fs.remove(4);
        let e1 = kleene(&f.acceptor, &f.rank).unwrap();
        // Swap the two co-terminal loops.
        let mut swapped = f.rank.clone();
        let vals: Vec<(usize, usize)> = swapped.rank.iter().map(|(&k, &v)| (k, v)).collect();
        for (k, v) in vals {
            swapped.rank.insert(k, 1 - v);
        }
        let e2 = kleene(&f.acceptor, &swapped).unwrap();
        assert_ne!(e1, e2);
        assert_eq!(e1.language_upto(10), e2.language_upto(10));
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = &fixtures::all()[0];
        let mut two_terminals = f.acceptor.clone();
        two_terminals.terminals.insert(0);
        assert!(matches!(
            kleene(&two_terminals, &f.rank),
            Err(KleeneError::TerminalCount(2))
        ));

        // Not trim: an extra island below the terminal is impossible in
        // a rooted graph, so instead hang a dead branch off the root.
        let al = Alphabet::of_strs(&["Δ", "α", "x"]);
        let mut g = DirectedGraph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 1);
        g.add_edge(0, 2);
        let aut = crate::automaton::Automaton::new(
            g,
            vec![al.index("Δ").unwrap(), al.index("α").unwrap(), al.index("x").unwrap()],
            al,
        )
        .unwrap();
        let pointed = crate::automaton::PointedAutomaton::new(aut, 0).unwrap();
        let acc = Acceptor::new(pointed, [1].into_iter().collect());
        let u = has_uspp(&acc.pointed.rooted_graph()).unwrap();
        let rank = crate::uspp::default_rank(&acc.pointed.automaton.graph, &u, None);
        assert!(matches!(kleene(&acc, &rank), Err(KleeneError::NotTrim(2))));
    }

    #[test]
    fn rejects_non_uspp_acceptors() {
        let al = Alphabet::of_strs(&["a", "b"]);
        let mut g = DirectedGraph::new(2);
        g.add_edge(0, 1);
        g.add_edge(0, 1);
        let aut =
            crate::automaton::Automaton::new(g, vec![0, 1], al).unwrap();
        let pointed = crate::automaton::PointedAutomaton::new(aut, 0).unwrap();
        let acc = Acceptor::new(pointed, [1].into_iter().collect());
        let rank = GeometricRank::default();
        assert!(matches!(kleene(&acc, &rank), Err(KleeneError::NoUspp(1))));
    }
}
