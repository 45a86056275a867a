#![allow(dead_code)]

use clannish::presentation::{bundled, Letter, Presentation};
use clannish::walkmod::{build_module, parameter_library, Representation, Walk};
use clannish::wordcore::{enumerate_bands, enumerate_strings, Descriptor, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PRESENTATIONS: [&str; 4] = ["e1", "gp2", "a4", "dieudonne"];

pub fn presentation(name: &str) -> Presentation {
    bundled(name).unwrap()
}

/// Modules `M(C_w)⊗V` for strings of length ≤ 4 and bands of period ≤ 4 with
/// `dim V ≤ 2`, of total dimension at most `max_dim`.
pub fn library(p: &Presentation, max_dim: usize) -> Vec<(Descriptor, usize, Representation)> {
    let mut ds = enumerate_strings(p, 4);
    ds.extend(enumerate_bands(p, 4));
    let mut lib = Vec::new();
    for d in &ds {
        for v in parameter_library(p, d, 2).unwrap() {
            let m = build_module(p, d, &v).unwrap();
            if m.total_dim() <= max_dim {
                lib.push((d.clone(), v.dim(), m));
            }
        }
    }
    lib
}

/// A random direct sum of library modules of total dimension at most `max_dim`.
pub fn random_sum(
    p: &Presentation,
    lib: &[(Descriptor, usize, Representation)],
    max_dim: usize,
    rng: &mut ChaCha8Rng,
) -> (Representation, Vec<(Descriptor, usize)>) {
    let mut m = Representation::zero(p);
    let mut planted = Vec::new();
    loop {
        let (d, k, n) = &lib[rng.gen_range(0..lib.len())];
        if m.total_dim() + n.total_dim() > max_dim {
            break;
        }
        m = m.direct_sum(n).unwrap();
        planted.push((d.clone(), *k));
    }
    (m, planted)
}

fn oriented(l: Letter) -> Letter {
    match l {
        Letter::Star(s) => Letter::Direct(s),
        l => l,
    }
}

fn random_letters(p: &Presentation, start: Word, len: usize, rng: &mut ChaCha8Rng) -> Option<Word> {
    let mut w = start;
    for _ in 0..len {
        let mut options: Vec<Word> = p
            .letters()
            .iter()
            .copied()
            .filter(|&x| w.extends_by(p, x))
            .filter_map(|x| {
                let mut ls = w.letters.clone();
                ls.push(x);
                Word::new(p, w.v0, w.sign, ls).ok()
            })
            .collect();
        if options.is_empty() {
            return None;
        }
        options.shuffle(rng);
        w = options.swap_remove(0);
    }
    Some(w)
}

/// Random right-end-admissible finite words and eventually periodic rays of
/// `H(ℓ,ε)`, with the walks `D` reading special letters as direct letters.
pub fn random_h_walks(p: &Presentation, v: usize, sign: i8, count: usize, rng: &mut ChaCha8Rng) -> Vec<(Word, Walk)> {
    let bands = enumerate_bands(p, 4);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 50 * count {
        tries += 1;
        let len = rng.gen_range(0..=6);
        let Some(u) = random_letters(p, Word::trivial(v, sign), len, rng) else { continue };
        if rng.gen_bool(0.35) && !bands.is_empty() {
            let b = &bands[rng.gen_range(0..bands.len())].word;
            let n = b.letters.len();
            let r = rng.gen_range(0..n);
            let mut cycle: Vec<Letter> = b.letters[r..].iter().chain(&b.letters[..r]).copied().collect();
            if rng.gen_bool(0.5) {
                cycle = cycle.iter().rev().map(|l| l.inverse()).collect();
            }
            let Ok(ray) = Word::ray(p, u.letters.clone(), cycle.clone()) else { continue };
            if ray.v0 != v || ray.sign != sign {
                continue;
            }
            let walk = Walk::ray(p, u.letters.iter().map(|&l| oriented(l)).collect(), cycle.iter().map(|&l| oriented(l)).collect());
            if let Ok(walk) = walk {
                out.push((ray, walk));
            }
        } else if u.is_right_end_admissible(p) {
            let walk = Walk::finite(p, v, sign, u.letters.iter().map(|&l| oriented(l)).collect()).unwrap();
            out.push((u, walk));
        }
    }
    out
}
