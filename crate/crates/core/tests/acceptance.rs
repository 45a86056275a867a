mod common;

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::Instant;

use clannish::functor::{check_relation_laws, f_dim, multiplicities, walk_plus_minus, SearchOptions};
use clannish::oracle::{indecomposables_isomorphic, is_indecomposable, oracle_check, random_gp2, DEFAULT_LIMIT};
use clannish::presentation::{Letter, Presentation};
use clannish::scalars::aut::{Aut, SymAut};
use clannish::scalars::field::{FieldOps, FieldWithAut};
use clannish::scalars::matrix::Matrix;
use clannish::skewquad::{classify_quadratic, twist_quadratic, QuadCase, SkewQuadratic};
use clannish::walkmod::{
    build_module, canonical_walk, parameter_library, quiver_of_walk, rw_automorphisms, rw_descriptor, Walk, WalkArrow,
};
use clannish::wordcore::{compare, enumerate_bands, enumerate_strings, parse_word, Descriptor, DescriptorKind};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Relation laws verified while running the multiplicity searches of 5–7.
static LAWS: AtomicUsize = AtomicUsize::new(0);
static LAW_RUNS: AtomicUsize = AtomicUsize::new(0);
static SYMMETRIC_BANDS: AtomicUsize = AtomicUsize::new(0);
/// Law groups checked on the relations of every window descriptor, and failures.
static WINDOW_LAWS: AtomicUsize = AtomicUsize::new(0);
static LAW_FAILURES: Mutex<Vec<String>> = Mutex::new(Vec::new());

fn laws_on() -> SearchOptions {
    SearchOptions { check_laws: true, ..Default::default() }
}

fn record(m: &clannish::functor::Multiplicities) {
    LAWS.fetch_add(m.laws_checked, AtomicOrdering::Relaxed);
    LAW_RUNS.fetch_add(1, AtomicOrdering::Relaxed);
    let sym = m.entries.iter().filter(|e| e.descriptor.kind() == DescriptorKind::SymBand).count();
    SYMMETRIC_BANDS.fetch_add(sym, AtomicOrdering::Relaxed);
}

fn window_laws(p: &Presentation, m: &clannish::walkmod::Representation, window: &[Descriptor]) {
    for d in window {
        match check_relation_laws(p, m, d) {
            Ok(k) => {
                WINDOW_LAWS.fetch_add(k, AtomicOrdering::Relaxed);
            }
            Err(e) => LAW_FAILURES.lock().unwrap().push(format!("{}: {e}", d.display(p))),
        }
    }
}

fn gf(p: u32, n: u32) -> FieldWithAut {
    FieldWithAut::new(p, n, None).unwrap()
}

/// All `(η, μ)` with `η + σ(μ) = β` and `ημ = γ`.
fn brute_factors(q: &SkewQuadratic) -> Vec<(u32, u32)> {
    let f = &q.field;
    let mut out = Vec::new();
    for eta in f.elements() {
        for mu in f.elements() {
            if f.add(eta, q.sigma.on(f, mu)) == q.beta && f.mul(eta, mu) == q.gamma {
                out.push((eta, mu));
            }
        }
    }
    out
}

fn quadratic_examples() -> Outcome {
    let t = Instant::now();
    let f2 = gf(2, 1);
    let f4 = gf(2, 2);
    let f5 = gf(5, 1);
    let frob = Aut::frobenius(2);
    let cases = [
        (SkewQuadratic::new(&f2, Aut::identity(1), 1, 1).unwrap(), Some(QuadCase::Irreducible)),
        (SkewQuadratic::new(&f4, frob, 0, 1).unwrap(), Some(QuadCase::MatrixRing)),
        (SkewQuadratic::new(&f4, Aut::identity(2), 0, 1).unwrap(), Some(QuadCase::NonSemisimple)),
        (SkewQuadratic::new(&f5, Aut::identity(1), 0, 4).unwrap(), Some(QuadCase::Split)),
        (SkewQuadratic::new(&f5, Aut::identity(1), 0, 1).unwrap(), Some(QuadCase::Split)),
        (SkewQuadratic::new(&f4, frob, 1, 1).unwrap(), None),
    ];
    for (q, case) in &cases {
        let r = classify_quadratic(q);
        let brute = brute_factors(q);
        match case {
            Some(c) => {
                ensure!(r.is_normal, "expected a normal quadratic");
                ensure!(r.case == *c, "case {:?} instead of {:?}", r.case, c);
                ensure!(r.factorization.is_some() == !brute.is_empty(), "factor search disagrees");
                if let Some(fac) = r.factorization {
                    ensure!(brute.contains(&fac), "reported factorization {fac:?} does not expand to q");
                }
            }
            None => ensure!(!r.is_normal, "expected a non-normal quadratic"),
        }
    }
    let r = classify_quadratic(&cases[0].0);
    ensure!(r.is_central && r.is_nonsingular, "GF(2) case");
    ensure!(r.simple_modules == vec![Matrix::from_rows(&[vec![0, 1], vec![1, 1]]).unwrap()], "GF(2) simple module");
    let r = classify_quadratic(&cases[1].0);
    ensure!(r.is_central && r.factorization == Some((1, 1)) && r.simple_modules == vec![Matrix::scalar(1, 1)], "GF(4) matrix ring");
    ensure!(classify_quadratic(&cases[3].0).factorization == Some((1, 4)), "x²+4 over GF(5)");
    let r = classify_quadratic(&cases[4].0);
    ensure!(r.factorization == Some((2, 3)), "x²−4 over GF(5)");
    ensure!(r.simple_modules == vec![Matrix::scalar(1, 3), Matrix::scalar(1, 2)], "x²−4 simples");
    let elapsed = t.elapsed();
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("6 quadratics, brute-force factor search agrees, {elapsed:?}"))
}

fn e1() -> Presentation {
    presentation("e1")
}

fn walk_and_quiver() -> Outcome {
    let p = e1();
    let a = p.arrow_index("a").unwrap();
    let s = p.arrow_index("s").unwrap();
    let (si, ai, sd, ad) = (Letter::Inverse(s), Letter::Inverse(a), Letter::Direct(s), Letter::Direct(a));
    let c = Walk::finite(&p, 0, p.sign(Letter::Star(s)), vec![si, ai, si, ai, si, ad, sd, ad, sd]).map_err(|e| e.to_string())?;
    let star = c.star(&p);
    let expected = parse_word(&p, "s* a^-1 s* a^-1 s* a s* a s*").unwrap();
    ensure!(star == expected, "C* = {}", star.display(&p));
    let (verts, arrows) = quiver_of_walk(&c);
    ensure!(verts == (0..=9).collect::<Vec<i64>>(), "vertices {verts:?}");
    let labels = [s, a, s, a, s, a, s, a, s];
    let want: Vec<WalkArrow> = (0..9)
        .map(|i| if i < 5 { WalkArrow { from: i, to: i + 1, arrow: labels[i as usize] } } else { WalkArrow { from: i + 1, to: i, arrow: labels[i as usize] } })
        .collect();
    ensure!(arrows == want, "Q_C = {arrows:?}");
    Ok(format!("C* = {}, 10 vertices, 9 arrows as displayed", star.display(&p)))
}

fn sym(name: &str) -> SymAut {
    SymAut::parse(name).unwrap()
}

fn label(p: &Presentation) -> impl Fn(usize) -> SymAut + '_ {
    move |a| SymAut::symbol(if p.arrows[a].name == "s" { "σ" } else { "θ" })
}

fn numeric(x: &SymAut) -> Aut {
    x.evaluate(2, &|_| Some(Aut::frobenius(2))).unwrap()
}

fn symmetric_string() -> Outcome {
    let p = e1();
    let d = Descriptor::parse(&p, "s* a^-1 s* a s* a^-1 s* a s*").unwrap();
    ensure!(d.kind() == DescriptorKind::SymString, "kind {:?}", d.kind());
    let c = canonical_walk(&p, &d.word).unwrap();
    ensure!(c.display(&p) == "s^-1 a^-1 s^-1 a s^-1 a^-1 s a s", "C_w = {}", c.display(&p));
    let (pi, x, _) = rw_automorphisms(&p, &d, &label(&p)).unwrap();
    let x = x.unwrap();
    ensure!(pi[&1] == sym("σ") && pi[&2] == sym("θσ") && pi[&3] == sym("σθσ"), "π_1..π_3 = {} {} {}", pi[&1], pi[&2], pi[&3]);
    ensure!(pi[&4].abelian() == sym("σθσθ^-1").abelian(), "π_4 = {}", pi[&4]);
    let tau_text = sym("θσ^-1θ^-1σθσθ^-1");
    ensure!(x.abelian() == tau_text.abelian(), "τ = {x}");
    let spec = rw_descriptor(&p, &d).unwrap();
    let twist = spec.x.as_ref().unwrap();
    for k in 1..=4 {
        ensure!(spec.pi[&k] == numeric(&pi[&k]), "numeric π_{k}");
    }
    ensure!(numeric(&pi[&4]) == numeric(&sym("σθσθ^-1")), "numeric π_4");
    ensure!(twist.aut == numeric(&tau_text), "numeric τ");
    let q = p.quadratic(p.arrow_index("s").unwrap()).unwrap();
    let text_q = twist_quadratic(numeric(&sym("θσ^-1θ^-1")), q);
    let got = twist.quadratic.as_ref().unwrap();
    ensure!(
        (got.sigma, got.beta, got.gamma) == (text_q.sigma, text_q.beta, text_q.gamma),
        "twisted quadratic {:?} vs {:?}",
        (got.sigma, got.beta, got.gamma),
        (text_q.sigma, text_q.beta, text_q.gamma)
    );
    Ok(format!("π_1..π_3 exact, π_4 = {} and τ = {x} agree up to reordering; GF(4) values match", pi[&4]))
}

fn rw_examples() -> Outcome {
    let p = e1();
    let d = Descriptor::parse(&p, "band: s* a s* a s* a^-1").unwrap();
    ensure!(d.kind() == DescriptorKind::AsymBand, "kind {:?}", d.kind());
    let (_, x, _) = rw_automorphisms(&p, &d, &label(&p)).unwrap();
    ensure!(x.as_ref() == Some(&sym("σθσθσθ^-1")), "τ = {:?}", x);
    let spec = rw_descriptor(&p, &d).unwrap();
    ensure!(spec.n == 6 && spec.jw == (0..6).collect::<Vec<i64>>(), "period {} J_w {:?}", spec.n, spec.jw);
    let mut built = 0;
    for v in parameter_library(&p, &d, 2).unwrap() {
        let m = build_module(&p, &d, &v).unwrap();
        ensure!(m.total_dim() == 6 * v.dim(), "dim {}", m.total_dim());
        m.check(&p).map_err(|e| e.to_string())?;
        built += 1;
    }
    let d = Descriptor::parse(&p, "band: s* a s* a^-1 s* a^-1 s* a").unwrap();
    ensure!(d.kind() == DescriptorKind::SymBand, "kind {:?}", d.kind());
    let (_, x, y) = rw_automorphisms(&p, &d, &label(&p)).unwrap();
    ensure!(x.as_ref() == Some(&sym("σθσθ^-1σ^-1")), "ρ = {:?}", x);
    ensure!(y.as_ref().map(|y| y.abelian()) == Some(sym("θσθ^-1").abelian()), "τ = {:?}", y);
    let spec = rw_descriptor(&p, &d).unwrap();
    ensure!(spec.pr == Some((1, 2)) && spec.jw.len() == 4, "p, r = {:?}, J_w {:?}", spec.pr, spec.jw);
    for v in parameter_library(&p, &d, 2).unwrap() {
        let m = build_module(&p, &d, &v).unwrap();
        ensure!(m.total_dim() == 4 * v.dim(), "dim {}", m.total_dim());
        m.check(&p).map_err(|e| e.to_string())?;
        built += 1;
    }
    Ok(format!("τ, ρ, p = 1, r = 2, |J_w| = 6 and 4 reproduced; {built} modules checked"))
}

fn dimension_formula() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sums = 0;
    for name in PRESENTATIONS {
        let p = presentation(name);
        let lib = library(&p, 6);
        let mut window = enumerate_strings(&p, 5);
        window.extend(enumerate_bands(&p, 4));
        window.retain(|d| d.symmetric || d.word.is_band());
        for _ in 0..15 {
            let (m, planted) = random_sum(&p, &lib, 10, &mut rng);
            window_laws(&p, &m, &window);
            let res = multiplicities(&p, &m, &laws_on()).map_err(|e| format!("{name}: {e}"))?;
            record(&res);
            ensure!(res.complete && res.checksum == m.total_dim(), "{name}: checksum {} for dimension {}", res.checksum, m.total_dim());
            for (d, _) in &planted {
                let want: usize = planted.iter().filter(|(z, _)| z.is_equivalent(&p, d)).map(|x| x.1).sum();
                ensure!(res.get(&p, d) == want, "{name}: {} has multiplicity {} not {want}", d.display(&p), res.get(&p, d));
            }
            ensure!(res.entries.iter().map(|e| e.f_dim).sum::<usize>() == planted.iter().map(|x| x.1).sum::<usize>(), "{name}: extra multiplicities");
            sums += 1;
        }
    }
    let elapsed = t.elapsed();
    ensure!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    Ok(format!("{sums} planted sums over {} presentations, {elapsed:?}", PRESENTATIONS.len()))
}

fn evaluation_lemma() -> Outcome {
    let mut checked = 0;
    for name in PRESENTATIONS {
        let p = presentation(name);
        let mut window = enumerate_strings(&p, 4);
        window.extend(enumerate_bands(&p, 4));
        for (d, k, m) in library(&p, usize::MAX) {
            for z in &window {
                let got = f_dim(&p, &m, z).map_err(|e| format!("{name}: {e}"))?.f_dim;
                let want = if z.is_equivalent(&p, &d) { k } else { 0 };
                ensure!(got == want, "{name}: F_{}(M({})⊗V) has dimension {got}, expected {want}", z.display(&p), d.display(&p));
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} evaluations"))
}

fn oracle_agreement() -> Outcome {
    let p = presentation("gp2");
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut summands = 0;
    for k in 0..200 {
        let m = random_gp2(&p, 1 + k % 8, &mut rng).map_err(|e| e.to_string())?;
        let r = oracle_check(&p, &m, &laws_on(), DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        record(&r.multiplicities);
        ensure!(r.agree(), "sample {k}: {}", r.to_json(&p));
        summands += r.summands.len();
    }
    Ok(format!("200 samples, {summands} summands, all matched"))
}

fn relation_laws(previous: &[bool]) -> Outcome {
    ensure!(previous.iter().all(|&x| x), "a search in criteria 5–7 failed");
    let laws = LAWS.load(AtomicOrdering::Relaxed);
    let runs = LAW_RUNS.load(AtomicOrdering::Relaxed);
    let sym = SYMMETRIC_BANDS.load(AtomicOrdering::Relaxed);
    let window = WINDOW_LAWS.load(AtomicOrdering::Relaxed);
    let failures = LAW_FAILURES.lock().unwrap();
    ensure!(failures.is_empty(), "{} violations, first: {}", failures.len(), failures[0]);
    ensure!(laws > 0 && runs > 0 && window > 0, "no laws were checked");
    ensure!(sym > 0, "no symmetric band met");
    Ok(format!(
        "{laws} law groups inside {runs} searches ({sym} symmetric band multiplicities), {window} on window relations"
    ))
}

fn filtrations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut strict = 0;
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
                    let spaces = walks.iter().map(|(_, d)| walk_plus_minus(&p, &m, d)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
                    for (i, (plus, minus)) in spaces.iter().enumerate() {
                        ensure!(plus.contains_space(&fp, minus), "D⁻ ⊄ D⁺ for {}", walks[i].0.display(&p));
                    }
                    for i in 0..walks.len() {
                        for j in 0..walks.len() {
                            if compare(&p, &walks[i].0, &walks[j].0).map_err(|e| e.to_string())? == Ordering::Less {
                                ensure!(
                                    spaces[j].1.contains_space(&fp, &spaces[i].0),
                                    "{} < {} but D⁺ ⊄ D⁻",
                                    walks[i].0.display(&p),
                                    walks[j].0.display(&p)
                                );
                                strict += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    ensure!(strict >= 100, "only {strict} comparable pairs");
    Ok(format!("{strict} ordered pairs"))
}

fn indecomposability() -> Outcome {
    let mut modules = 0;
    let mut pairs = 0;
    for name in PRESENTATIONS {
        let p = presentation(name);
        let n = p.field.n() as usize;
        let mut ds = enumerate_strings(&p, 6);
        ds.extend(enumerate_bands(&p, 4));
        let mut built = Vec::new();
        for d in &ds {
            for v in parameter_library(&p, d, 2).unwrap() {
                let m = build_module(&p, d, &v).unwrap();
                if m.total_dim() * n <= DEFAULT_LIMIT {
                    ensure!(is_indecomposable(&p, &m).map_err(|e| e.to_string())?, "{name}: M({})⊗V decomposes", d.display(&p));
                    built.push((d.clone(), m));
                    modules += 1;
                }
            }
        }
        for (i, (d, m)) in built.iter().enumerate() {
            for (z, w) in &built[i + 1..] {
                if !d.is_equivalent(&p, z) && m.dims == w.dims {
                    let iso = indecomposables_isomorphic(&p, m, w).map_err(|e| e.to_string())?;
                    ensure!(!iso, "{name}: M({}) ≅ M({})", d.display(&p), z.display(&p));
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{modules} modules indecomposable, {pairs} inequivalent pairs non-isomorphic"))
}

fn run(number: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let elapsed = t.elapsed();
    match &outcome {
        Ok(detail) => println!("criterion {number:>2} PASS  {title}: {detail} [{elapsed:.2?}]"),
        Err(detail) => println!("criterion {number:>2} FAIL  {title}: {detail} [{elapsed:.2?}]"),
    }
    outcome.is_ok()
}

fn main() {
    let mut results = vec![
        run(1, "quadratic classification", quadratic_examples),
        run(2, "walk, word and quiver", walk_and_quiver),
        run(3, "symmetric string automorphisms", symmetric_string),
        run(4, "band rings and modules", rw_examples),
    ];
    let searches = [
        run(5, "dimension formula", dimension_formula),
        run(6, "evaluation on string and band modules", evaluation_lemma),
        run(7, "oracle agreement", oracle_agreement),
    ];
    results.extend(searches);
    results.push(run(8, "relation laws", || relation_laws(&searches)));
    results.push(run(9, "one-sided filtrations", filtrations));
    results.push(run(10, "indecomposability and non-isomorphism", indecomposability));
    let passed = results.iter().filter(|&&x| x).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
