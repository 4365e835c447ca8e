//! One-off search for regression fixtures.
use gst::mccammond::mac_semigroup;
use gst::semigroup::{a_morphism, quotient_by_pairs, table_as_a_semigroup};

fn main() {
    // Non-functoriality: pairs (S, S/θ) with no expanded morphism.
    'outer: for n in 2..=4usize {
        for (ti, table) in gst::gen::catalog(n).iter().enumerate() {
            let s = table_as_a_semigroup(n, table.clone(), None).unwrap();
            for x in 0..n {
                for y in (x + 1)..n {
                    let (t, _) = quotient_by_pairs(&s, &[(x, y)]);
                    if t.len() == s.len() {
                        continue;
                    }
                    let ms = mac_semigroup(&s, 100_000).unwrap();
                    let mt = mac_semigroup(&t, 100_000).unwrap();
                    if a_morphism(&ms.expanded, &mt.expanded).is_none() {
                        println!("WITNESS non-functorial: order {n} catalog index {ti} table {table:?} collapse ({x},{y}); sizes {} -> {}", ms.expanded.len(), mt.expanded.len());
                        break 'outer;
                    }
                }
            }
        }
    }
    // Cay(S^Mac) vs Cay(S)^Mac: try right zero on 3 letters.
    for k in 2..=3usize {
        let s = gst::semigroup::instances::right_zero(k);
        let mac = mac_semigroup(&s, 100_000).unwrap();
        let cover_states = mac.cover.words.len();
        let cayley_states = mac.expanded.len() + 1;
        println!("right_zero({k}): cover={cover_states} cayley of expansion={cayley_states}");
    }
}
