//! File formats: JSON documents for graphs, automata and semigroups,
//! DOT export, and the line-oriented presentation format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Acceptor, Automaton, PointedAutomaton, Relation};
use crate::digraph::{DirectedGraph, Frame, RootedGraph};
use crate::semigroup::FiniteASemigroup;
use crate::uspp::UsppData;
use crate::words::{Alphabet, WordError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown vertex name {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("edge {0}: missing label (automaton documents label every edge)")]
    MissingLabel(usize),
    #[error("document has no {0} field")]
    MissingField(&'static str),
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("{0}")]
    Automaton(#[from] crate::automaton::AutomatonError),
    #[error("{0}")]
    Graph(#[from] crate::digraph::GraphError),
    #[error("{0}")]
    Semigroup(#[from] crate::semigroup::SemigroupError),
}

/// A graph or automaton document.  Automata carry `alphabet` and label
/// every edge; acceptors add `terminals`; rooted documents set `root`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub root: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alphabet: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub terminals: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeDoc {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id: Option<usize>,
    pub from: String,
    pub to: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

impl GraphDoc {
    pub fn parse(text: &str) -> Result<GraphDoc, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    fn vertex_index(&self) -> Result<BTreeMap<&str, usize>, IoError> {
        let mut index = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if index.insert(v.as_str(), i).is_some() {
                return Err(IoError::DuplicateVertex(v.clone()));
            }
        }
        Ok(index)
    }

    /// The underlying graph; edges are taken in `id` order when ids are
    /// present, in document order otherwise.
    pub fn to_graph(&self) -> Result<DirectedGraph, IoError> {
        let index = self.vertex_index()?;
        let mut g = DirectedGraph::new(self.vertices.len());
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| self.edges[i].id.unwrap_or(i));
        for &i in &order {
            let e = &self.edges[i];
            let from = *index
                .get(e.from.as_str())
                .ok_or_else(|| IoError::UnknownVertex(e.from.clone()))?;
            let to = *index
                .get(e.to.as_str())
                .ok_or_else(|| IoError::UnknownVertex(e.to.clone()))?;
            g.add_edge(from, to);
        }
        Ok(g)
    }

    pub fn root_index(&self) -> Result<usize, IoError> {
        let index = self.vertex_index()?;
        match &self.root {
            Some(name) => index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| IoError::UnknownVertex(name.clone())),
            None => {
                if self.vertices.is_empty() {
                    Err(IoError::MissingField("vertices"))
                } else {
                    Ok(0)
                }
            }
        }
    }

    pub fn to_rooted(&self) -> Result<RootedGraph, IoError> {
        Ok(RootedGraph::new(self.to_graph()?, self.root_index()?)?)
    }

    pub fn to_pointed_automaton(&self) -> Result<PointedAutomaton, IoError> {
        let names = self
            .alphabet
            .clone()
            .ok_or(IoError::MissingField("alphabet"))?;
        let alphabet = Alphabet::new(names)?;
        let g = self.to_graph()?;
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| self.edges[i].id.unwrap_or(i));
        let mut labels = Vec::with_capacity(self.edges.len());
        for &i in &order {
            let name = self.edges[i].label.as_ref().ok_or(IoError::MissingLabel(i))?;
            let l = alphabet
                .index(name)
                .ok_or_else(|| IoError::UnknownVertex(name.clone()))?;
            labels.push(l);
        }
        let aut = Automaton::new(g, labels, alphabet)?;
        Ok(PointedAutomaton::new(aut, self.root_index()?)?)
    }

    pub fn to_acceptor(&self) -> Result<Acceptor, IoError> {
        let pointed = self.to_pointed_automaton()?;
        let index = self.vertex_index()?;
        let mut terminals = std::collections::BTreeSet::new();
        for t in self.terminals.clone().unwrap_or_default() {
            terminals.insert(
                *index.get(t.as_str()).ok_or_else(|| IoError::UnknownVertex(t.clone()))?,
            );
        }
        Ok(Acceptor::new(pointed, terminals))
    }

    pub fn of_graph(g: &DirectedGraph, root: Option<usize>) -> GraphDoc {
        let vertices: Vec<String> = g.vertices().map(|v| format!("v{v}")).collect();
        let edges = g
            .edges()
            .map(|e| EdgeDoc {
                id: Some(e),
                from: vertices[g.init(e)].clone(),
                to: vertices[g.term(e)].clone(),
                label: None,
            })
            .collect();
        GraphDoc {
            root: root.map(|r| vertices[r].clone()),
            vertices,
            edges,
            alphabet: None,
            terminals: None,
        }
    }

    pub fn of_acceptor(acc: &Acceptor) -> GraphDoc {
        let aut = &acc.pointed.automaton;
        let mut doc = GraphDoc::of_graph(&aut.graph, Some(acc.pointed.root));
        doc.alphabet = Some(aut.alphabet.names().to_vec());
        for (e, edge) in doc.edges.iter_mut().enumerate() {
            edge.label = Some(aut.alphabet.name(aut.labels[e]).to_string());
        }
        doc.terminals =
            Some(acc.terminals.iter().map(|&t| doc.vertices[t].clone()).collect());
        doc
    }
}

/// Semigroup documents: named elements, a row-major table, and the
/// generator map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemigroupDoc {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub generators: BTreeMap<String, usize>,
}

impl SemigroupDoc {
    pub fn parse(text: &str) -> Result<SemigroupDoc, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn to_semigroup(&self) -> Result<FiniteASemigroup, IoError> {
        let n = self.elements.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &self.table {
            flat.extend_from_slice(row);
        }
        let names: Vec<String> = self.generators.keys().cloned().collect();
        let gens: Vec<usize> = self.generators.values().copied().collect();
        let alphabet = Alphabet::new(names)?;
        Ok(FiniteASemigroup::from_table(alphabet, gens, n, flat)?)
    }

    pub fn of_semigroup(s: &FiniteASemigroup) -> SemigroupDoc {
        let elements: Vec<String> =
            (0..s.len()).map(|x| s.alphabet().format_word(s.rep(x))).collect();
        let table = (0..s.len())
            .map(|x| (0..s.len()).map(|y| s.mul(x, y)).collect())
            .collect();
        let generators = s
            .alphabet()
            .letters()
            .map(|a| (s.alphabet().name(a).to_string(), s.gen_of(a)))
            .collect();
        SemigroupDoc { elements, table, generators }
    }
}

/// Presentation text: one relation per line, `u = v` or `u = #` (dead
/// end).  `1` denotes the empty word.  An optional first line
/// `alphabet: a b c` fixes the alphabet; otherwise the single-character
/// letters appearing in the file are used, sorted.
pub fn parse_presentation(text: &str) -> Result<(Alphabet, Vec<Relation>), IoError> {
    let mut lines = Vec::new();
    let mut alphabet: Option<Alphabet> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') && !line.contains('=') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            let names: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
            alphabet = Some(Alphabet::new(names)?);
            continue;
        }
        lines.push((no + 1, line.to_string()));
    }
    let alphabet = match alphabet {
        Some(a) => a,
        None => {
            let mut letters: Vec<char> = lines
                .iter()
                .flat_map(|(_, l)| l.chars())
                .filter(|c| !c.is_whitespace() && *c != '=' && *c != '#' && *c != '1')
                .collect();
            letters.sort_unstable();
            letters.dedup();
            Alphabet::new(letters.into_iter().map(String::from).collect())?
        }
    };
    let mut relations = Vec::new();
    for (no, line) in lines {
        let (lhs, rhs) = line
            .split_once('=')
            .ok_or_else(|| IoError::Line(no, "expected u = v".into()))?;
        let parse_side = |s: &str| -> Result<crate::words::Word, IoError> {
            let s = s.trim();
            if s == "1" {
                return Ok(Vec::new());
            }
            Ok(alphabet.parse_word(s)?)
        };
        let lhs = parse_side(lhs).map_err(|e| IoError::Line(no, e.to_string()))?;
        let rhs = rhs.trim();
        if rhs == "#" {
            relations.push(Relation::Dead(lhs));
        } else {
            let rhs = parse_side(rhs).map_err(|e| IoError::Line(no, e.to_string()))?;
            relations.push(Relation::Equal(lhs, rhs));
        }
    }
    Ok((alphabet, relations))
}

/// Rank files: a JSON object mapping edge ids to ranks.
pub fn parse_rank_file(text: &str) -> Result<crate::uspp::GeometricRank, IoError> {
    let raw: BTreeMap<String, usize> = serde_json::from_str(text)?;
    let mut rank = BTreeMap::new();
    for (k, v) in raw {
        let e: usize = k
            .parse()
            .map_err(|_| IoError::Line(0, format!("bad edge id {k:?}")))?;
        rank.insert(e, v);
    }
    Ok(crate::uspp::GeometricRank { rank })
}

/// DOT export.  Strong components become clusters, transition edges are
/// dashed; when spanning-tree data is supplied, bold arrows are drawn
/// doubled and tree edges solid.
pub fn to_dot(
    g: &DirectedGraph,
    names: &[String],
    edge_labels: Option<&[String]>,
    frame: &Frame,
    uspp: Option<&UsppData>,
) -> String {
    let mut out = String::from("digraph {\n  rankdir=LR;\n");
    for (i, comp) in frame.components.iter().enumerate() {
        out.push_str(&format!("  subgraph cluster_{i} {{\n    style=rounded;\n"));
        for &v in &comp.vertices {
            out.push_str(&format!("    \"{}\";\n", names[v]));
        }
        out.push_str("  }\n");
    }
    for e in g.edges() {
        let mut attrs: Vec<String> = Vec::new();
        if let Some(labels) = edge_labels {
            attrs.push(format!("label=\"{}\"", labels[e]));
        }
        if frame.is_transition(e) {
            attrs.push("style=dashed".into());
        }
        if let Some(u) = uspp {
            if u.is_bold(e) {
                attrs.push("color=\"black:invis:black\"".into());
            }
        }
        let attr = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(", "))
        };
        out.push_str(&format!(
            "  \"{}\" -> \"{}\"{};\n",
            names[g.init(e)],
            names[g.term(e)],
            attr
        ));
    }
    out.push_str("}\n");
    out
}
