use clannish::functor::{multiplicities, SearchOptions};
use clannish::presentation::bundled;
use clannish::walkmod::{build_module, parameter_library};
use clannish::wordcore::{enumerate_bands, enumerate_strings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn planted_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["e1", "gp2", "a4", "dieudonne"] {
        let p = bundled(name).unwrap();
        let mut lib = Vec::new();
        let mut ds = enumerate_strings(&p, 4);
        ds.extend(enumerate_bands(&p, 4));
        for d in &ds {
            for v in parameter_library(&p, d, 2).unwrap() {
                let m = build_module(&p, d, &v).unwrap();
                if m.total_dim() <= 6 {
                    lib.push((d.clone(), v.dim(), m));
                }
            }
        }
        let kinds: std::collections::BTreeSet<_> = lib.iter().map(|x| x.0.kind().name()).collect();
        println!("{name}: {} modules, kinds {:?}", lib.len(), kinds);
        for _ in 0..15 {
            let mut m = clannish::walkmod::Representation::zero(&p);
            let mut planted = Vec::new();
            while m.total_dim() < 10 {
                let (d, k, n) = &lib[rng.gen_range(0..lib.len())];
                if m.total_dim() + n.total_dim() > 10 {
                    break;
                }
                m = m.direct_sum(n).unwrap();
                planted.push((d.clone(), *k));
            }
            let t = std::time::Instant::now();
            let res = multiplicities(&p, &m, &SearchOptions { check_laws: true, ..Default::default() }).unwrap();
            println!("  dim {} checksum {} laws {} in {:?}", m.total_dim(), res.checksum, res.laws_checked, t.elapsed());
            assert!(res.complete, "{}", res.to_json(&p));
            for (d, _) in &planted {
                let want: usize = planted.iter().filter(|(z, _)| z.is_equivalent(&p, d)).map(|x| x.1).sum();
                assert_eq!(res.get(&p, d), want, "{}", d.display(&p));
            }
        }
    }
}
