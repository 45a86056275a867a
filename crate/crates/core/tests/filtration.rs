mod common;

use std::cmp::Ordering;

use clannish::functor::walk_plus_minus;
use clannish::oracle::random_gp2;
use clannish::wordcore::compare;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `D⁻ ⊆ D⁺`, and `D_w⁺ ⊆ D_z⁻` whenever `w < z` in `H(ℓ,ε)`.
#[test]
fn one_sided_filtrations_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = 0;
    let mut strict = 0;
    let mut rays = 0;
    for name in ["e1", "gp2"] {
        let p = presentation(name);
        let lib = library(&p, 6);
        for round in 0..12 {
            let m = if name == "gp2" && round % 2 == 1 {
                random_gp2(&p, rng.gen_range(2..=6), &mut rng).unwrap()
            } else {
                random_sum(&p, &lib, 8, &mut rng).0
            };
            let fp = m.field.prime_field().clone();
            for v in 0..p.vertices.len() {
                for sign in [1i8, -1] {
                    let walks = random_h_walks(&p, v, sign, 8, &mut rng);
                    rays += walks.iter().filter(|(w, _)| !w.is_finite()).count();
                    let spaces: Vec<_> = walks.iter().map(|(_, d)| walk_plus_minus(&p, &m, d).unwrap()).collect();
                    for (plus, minus) in &spaces {
                        assert!(plus.contains_space(&fp, minus));
                    }
                    for i in 0..walks.len() {
                        for j in 0..walks.len() {
                            if compare(&p, &walks[i].0, &walks[j].0).unwrap() == Ordering::Less {
                                assert!(
                                    spaces[j].1.contains_space(&fp, &spaces[i].0),
                                    "{} < {}",
                                    walks[i].0.display(&p),
                                    walks[j].0.display(&p)
                                );
                                strict += 1;
                            }
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    println!("{pairs} pairs, {strict} strictly ordered, {rays} rays");
    assert!(strict >= 100 && rays > 0);
}
