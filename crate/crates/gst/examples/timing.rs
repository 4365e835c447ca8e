use std::time::Instant;
use gst::verify::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");
    let mut run = |name: &str, f: &dyn Fn() -> SuiteReport| {
        if which != "all" && which != name { return; }
        let t = Instant::now();
        let r = f();
        println!("{name}: {:?} ok={}", t.elapsed(), r.ok());
    };
    run("uspp-equivalence(60)", &|| uspp_equivalence_suite(1, 60, 7));
    run("cut-closure(30)", &|| cut_closure_suite(1, 30));
    run("kleene-fixtures", &|| kleene_fixture_suite());
    run("kleene-correctness(25)", &|| kleene_random_suite(1, 25));
    run("red(500)", &|| red_suite(1, 500));
    run("band(3)", &|| band_suite(3));
    run("band(4)", &|| band_suite(4));
    run("mccammond", &|| mccammond_suite(1));
    run("expansions(3)", &|| expansions_suite(3, 6));
    run("expansions(4)", &|| expansions_suite(4, 6));
    run("stabilizers(10)", &|| stabilizers_suite(1, 10, 5));
    run("rank(4)", &|| rank_suite(1, 4, 30));
    run("rank(5)", &|| rank_suite(1, 5, 100));
    run("uspp-equivalence(1000)", &|| uspp_equivalence_suite(1, 1000, 8));
    run("cut-closure(300)", &|| cut_closure_suite(1, 300));
    run("kleene-correctness(500)", &|| kleene_random_suite(1, 500));
    run("red(10000)", &|| red_suite(1, 10_000));
    run("stabilizers(50)", &|| stabilizers_suite(1, 50, 5));
}
