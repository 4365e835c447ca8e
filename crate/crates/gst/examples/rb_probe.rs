use gst::expansion::{malcev, IdentityBasis};
use gst::semigroup::instances;

fn main() {
    let s = instances::klein_four();
    for bound in [6usize, 8, 10, 12, 14] {
        let t = std::time::Instant::now();
        match malcev(&s, &IdentityBasis::rectangular_band(), bound) {
            Ok((r, _)) => println!("klein rb bound {bound}: {} elements ({:?})", r.expanded.len(), t.elapsed()),
            Err(e) => println!("klein rb bound {bound}: {e} ({:?})", t.elapsed()),
        }
    }
    let z2 = instances::cyclic(2);
    for bound in [6usize, 8, 10, 12] {
        match malcev(&z2, &IdentityBasis::rectangular_band(), bound) {
            Ok((r, _)) => println!("z2 rb bound {bound}: {} elements", r.expanded.len()),
            Err(e) => println!("z2 rb bound {bound}: {e}"),
        }
    }
}
