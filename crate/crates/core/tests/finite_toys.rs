mod common;

use common::{check_toy, Toy};

#[test]
fn generated_sources_elaborate() {
    for seed in 0..20 {
        let src = Toy::random(seed).source();
        if let Err(d) = repinv::frontend::load(&src, &Default::default()) {
            panic!("{}", d.render("toy", &src));
        }
    }
}

#[test]
fn hanoi_matches_brute_force_on_random_toys() {
    let failures: Vec<String> = (0..120).filter_map(|seed| check_toy(seed).err()).collect();
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn both_outcomes_occur() {
    let violating = (0..120)
        .filter(|&seed| {
            let t = Toy::random(seed);
            let r = t.reachable();
            (0..t.n).any(|s| r[s] && !t.good[s])
        })
        .count();
    assert!(violating > 10 && violating < 110, "{violating} of 120 toys violate the spec");
}
