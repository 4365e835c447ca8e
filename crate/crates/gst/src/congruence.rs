//! Bounded-word congruence closure.
//!
//! Words of length at most a bound are nodes of a union-find structure;
//! right extension by each letter (and left extension, for two-sided
//! congruences) acts as a partial unary function.  Relating two words
//! propagates through these functions, so the result is the restriction
//! to bounded words of the one-step derivation congruence generated by
//! the seeds.  A class is usable for further multiplication only if it
//! contains a word shorter than the bound; the `closed` certificate
//! records whether every class does.

use crate::words::{Letter, Word};

#[derive(Debug, Clone)]
pub struct Congruence {
    k: usize,
    bound: usize,
    base: Vec<usize>,
    pow: Vec<usize>,
    with_empty: bool,
    two_sided: bool,
    sink: Option<usize>,
    total: usize,
    parent: Vec<u32>,
    size: Vec<u32>,
    min_rep: Vec<u32>,
    ext_r: Vec<Option<u32>>,
    ext_l: Vec<Option<u32>>,
}

impl Congruence {
    /// `with_empty` admits the empty word as a node (automaton mode);
    /// `with_sink` adds an absorbing node for dead-end relations.
    pub fn new(
        alphabet_size: usize,
        bound: usize,
        with_empty: bool,
        two_sided: bool,
        with_sink: bool,
    ) -> Self {
        let k = alphabet_size;
        let mut base = vec![0usize; bound + 2];
        let mut pow = vec![1usize; bound + 1];
        for i in 1..=bound {
            pow[i] = pow[i - 1] * k;
        }
        // base[len] = id of the first word of this length, counting the
        // empty word when present.
        let start = usize::from(with_empty);
        base[0] = 0;
        base[1] = start;
        for len in 1..=bound {
            base[len + 1] = base[len] + pow[len];
        }
        let num_words = base[bound + 1];
        let sink = with_sink.then_some(num_words);
        let total = num_words + usize::from(with_sink);
        let mut c = Congruence {
            k,
            bound,
            base,
            pow,
            with_empty,
            two_sided,
            sink,
            total,
            parent: (0..total as u32).collect(),
            size: vec![1; total],
            min_rep: (0..total as u32).collect(),
            ext_r: vec![None; total * k],
            ext_l: if two_sided { vec![None; total * k] } else { Vec::new() },
        };
        for id in 0..num_words {
            let len = c.len_of(id);
            if len < bound {
                for a in 0..k {
                    c.ext_r[id * k + a] = Some(c.child_right(id, a as Letter) as u32);
                    if two_sided {
                        c.ext_l[id * k + a] = Some(c.child_left(id, a as Letter) as u32);
                    }
                }
            }
        }
        if let Some(s) = sink {
            for a in 0..k {
                c.ext_r[s * k + a] = Some(s as u32);
            }
        }
        c
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn sink_id(&self) -> Option<usize> {
        self.sink
    }

    pub fn len_of(&self, id: usize) -> usize {
        debug_assert!(Some(id) != self.sink);
        let mut len = 0;
        while self.base[len + 1] <= id {
            len += 1;
        }
        len
    }

    fn child_right(&self, id: usize, a: Letter) -> usize {
        let len = self.len_of(id);
        self.base[len + 1] + (id - self.base[len]) * self.k + a as usize
    }

    fn child_left(&self, id: usize, a: Letter) -> usize {
        let len = self.len_of(id);
        self.base[len + 1] + a as usize * self.pow[len] + (id - self.base[len])
    }

    pub fn word_id(&self, w: &[Letter]) -> Option<usize> {
        if w.len() > self.bound || (w.is_empty() && !self.with_empty) {
            return None;
        }
        let mut id = self.base[w.len()];
        let mut offset = 0usize;
        for &l in w {
            offset = offset * self.k + l as usize;
        }
        id += offset;
        Some(id)
    }

    pub fn id_word(&self, id: usize) -> Word {
        let len = self.len_of(id);
        let mut offset = id - self.base[len];
        let mut w = vec![0 as Letter; len];
        for i in (0..len).rev() {
            w[i] = (offset % self.k) as Letter;
            offset /= self.k;
        }
        w
    }

    pub fn find(&mut self, mut id: usize) -> usize {
        while self.parent[id] as usize != id {
            let gp = self.parent[self.parent[id] as usize];
            self.parent[id] = gp;
            id = gp as usize;
        }
        id
    }

    /// Shortlex-minimal member of the class (word ids are shortlex-ordered).
    pub fn min_member(&mut self, id: usize) -> usize {
        let r = self.find(id);
        self.min_rep[r] as usize
    }

    pub fn relate_words(&mut self, u: &[Letter], v: &[Letter]) {
        let ui = self.word_id(u).expect("seed word exceeds bound");
        let vi = self.word_id(v).expect("seed word exceeds bound");
        self.relate(ui, vi);
    }

    pub fn relate_to_sink(&mut self, u: &[Letter]) {
        let ui = self.word_id(u).expect("seed word exceeds bound");
        let s = self.sink.expect("congruence has no sink");
        self.relate(ui, s);
    }

    /// Unions two nodes and closes under the extension functions.
    pub fn relate(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((x, y)) = pending.pop() {
            let rx = self.find(x);
            let ry = self.find(y);
            if rx == ry {
                continue;
            }
            let (big, small) = if self.size[rx] >= self.size[ry] { (rx, ry) } else { (ry, rx) };
            self.parent[small] = big as u32;
            self.size[big] += self.size[small];
            self.min_rep[big] = self.min_rep[big].min(self.min_rep[small]);
            for a in 0..self.k {
                let eb = self.ext_r[big * self.k + a];
                let es = self.ext_r[small * self.k + a];
                match (eb, es) {
                    (Some(p), Some(q)) => pending.push((p as usize, q as usize)),
                    (None, Some(q)) => self.ext_r[big * self.k + a] = Some(q),
                    _ => {}
                }
                if self.two_sided {
                    let eb = self.ext_l[big * self.k + a];
                    let es = self.ext_l[small * self.k + a];
                    match (eb, es) {
                        (Some(p), Some(q)) => pending.push((p as usize, q as usize)),
                        (None, Some(q)) => self.ext_l[big * self.k + a] = Some(q),
                        _ => {}
                    }
                }
            }
        }
    }

    /// The class reached from this class by appending a letter, if the
    /// extension is known within the bound.
    pub fn step_right(&mut self, id: usize, a: Letter) -> Option<usize> {
        let r = self.find(id);
        let e = self.ext_r[r * self.k + a as usize]?;
        Some(self.find(e as usize))
    }

    /// Distinct class roots, ordered by their minimal member.
    pub fn class_roots(&mut self) -> Vec<usize> {
        let mut roots: Vec<usize> = (0..self.total).filter(|&i| self.find(i) == i).collect();
        roots.sort_by_key(|&r| self.min_rep[r]);
        roots
    }

    /// Every non-sink class has a member strictly shorter than the
    /// bound, so every class can be extended by every letter.
    pub fn is_closed(&mut self) -> bool {
        let roots = self.class_roots();
        roots.into_iter().all(|r| {
            Some(r) == self.sink.map(|s| self.find(s)) || {
                let m = self.min_rep[r] as usize;
                self.len_of(m) < self.bound
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        let c = Congruence::new(3, 4, true, false, false);
        let mut seen = std::collections::BTreeSet::new();
        for w in crate::words::words_up_to(3, 4) {
            let id = c.word_id(&w).unwrap();
            assert_eq!(c.id_word(id), w);
            assert!(seen.insert(id));
        }
        assert_eq!(c.word_id(&[]), Some(0));
    }

    #[test]
    fn idempotent_letter_collapses_powers() {
        // a·a = a makes every power of a equal to a.
        let mut c = Congruence::new(1, 6, false, true, false);
        c.relate_words(&[0, 0], &[0]);
        let a = c.word_id(&[0]).unwrap();
        for len in 2..=6 {
            let w = vec![0 as Letter; len];
            let id = c.word_id(&w).unwrap();
            assert_eq!(c.find(id), c.find(a));
        }
        assert!(c.is_closed());
    }

    #[test]
    fn one_sided_congruence_only_extends_right() {
        // With u = v as a right congruence, xu and xv stay distinct.
        let mut c = Congruence::new(2, 4, true, false, false);
        c.relate_words(&[0], &[0, 0]);
        let ba = c.word_id(&[1, 0]).unwrap();
        let baa = c.word_id(&[1, 0, 0]).unwrap();
        assert_ne!(c.find(ba), c.find(baa));
        // But right extensions collapse: a·b = aa·b.
        let ab = c.word_id(&[0, 1]).unwrap();
        let aab = c.word_id(&[0, 0, 1]).unwrap();
        assert_eq!(c.find(ab), c.find(aab));
    }

    #[test]
    fn two_sided_congruence_extends_both_ways() {
        let mut c = Congruence::new(2, 4, false, true, false);
        c.relate_words(&[0], &[0, 0]);
        let ba = c.word_id(&[1, 0]).unwrap();
        let baa = c.word_id(&[1, 0, 0]).unwrap();
        assert_eq!(c.find(ba), c.find(baa));
    }

    #[test]
    fn sink_absorbs_letters() {
        let mut c = Congruence::new(2, 3, true, false, true);
        c.relate_to_sink(&[0]);
        let sink = c.sink_id().unwrap();
        for w in [[0, 0].as_slice(), [0, 1].as_slice()] {
            let id = c.word_id(w).unwrap();
            assert_eq!(c.find(id), c.find(sink));
        }
        let b = c.word_id(&[1]).unwrap();
        assert_ne!(c.find(b), c.find(sink));
    }

    #[test]
    fn unclosed_when_classes_need_longer_words() {
        // The free semigroup on one letter truncated at length 3 has the
        // class {aaa} with no shorter member.
        let mut c = Congruence::new(1, 3, false, true, false);
        assert!(!c.is_closed());
    }
}
