//! Acceptance suite: twelve criteria, exact arithmetic, one line each.
//! Runs as a plain binary so the verdict lines always reach the output.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use shifted_manin::bialg::{
    build_double, check_shifted_bialgebra, cobracket_from_triple, same_cobracket, ManinTriple, ShiftedBialgebra, Side,
};
use shifted_manin::cli::{AlgebraFile, ModuleFile};
use shifted_manin::exactnum::{int, rat, Rational};
use shifted_manin::koszul::{build_twisted_complex, koszul_suite, KoszulBounds};
use shifted_manin::liealg::{check_jacobi, check_lagrangian_pair, check_metric, Subspace};
use shifted_manin::loopyang::{
    build_loop_double, build_meromorphic_tensor, check_module, check_module_associativity, check_module_commutativity,
    check_tensor, check_truncation_coherence, check_weak_associativity, level_deform, meromorphic_r, yang_bialgebra,
    BaseAlgebra, DifferenceRMatrix, FsfModule, PositiveLoop,
};
use shifted_manin::report::Report;
use shifted_manin::rmat::{canonical_r, check_coboundary, check_cybe, check_dr_identities, rmatrix_suite};
use shifted_manin::uea::{check_coalgebra_object, check_curvature, quantize, w_for_triple};

type Verdict = Result<String, String>;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn algebra(name: &str) -> AlgebraFile {
    AlgebraFile::load(&corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn module(name: &str, base: &BaseAlgebra) -> FsfModule {
    let text = std::fs::read_to_string(corpus(name)).expect("corpus module");
    ModuleFile::parse(&text).and_then(|m| m.to_module(base)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn sl2() -> BaseAlgebra {
    algebra("sl2.json").base_algebra().expect("sl2 base")
}

/// The shipped bialgebras: abelian, E1 with δ = 0, and the Yang cobracket on
/// the positive half of the N = 2 loop double.
fn bialgebras() -> Vec<(&'static str, ShiftedBialgebra)> {
    let ld = build_loop_double(&sl2(), 2).expect("loop double");
    vec![
        ("abelian", algebra("abelian2.json").bialgebra().unwrap()),
        ("E1", algebra("e1.json").bialgebra().unwrap()),
        ("Yang N=2", yang_bialgebra(&ld).expect("Yang bialgebra")),
    ]
}

fn doubles() -> Vec<(&'static str, ManinTriple)> {
    bialgebras().into_iter().map(|(n, h)| (n, build_double(&h))).collect()
}

fn e1_double() -> ManinTriple {
    algebra("e1_double.json").triple().unwrap()
}

fn passed(label: &str, rep: &Report) -> Result<usize, String> {
    match rep.checks.iter().find(|c| !c.passed()) {
        None => Ok(rep.checks.iter().map(|c| c.checked).sum()),
        Some(c) => Err(format!("{label}: {} failed: {}", c.name, c.witness.as_deref().unwrap_or("no witness"))),
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    if t < limit {
        Ok(())
    } else {
        Err(format!("{what} took {t:?}, limit {limit:?}"))
    }
}

fn c1_double_correspondence() -> Verdict {
    let mut out = Vec::new();
    for (name, h) in bialgebras() {
        let start = Instant::now();
        let t = build_double(&h);
        let mut n = passed(name, &check_metric(&t.double, &t.metric))?;
        n += passed(name, &check_lagrangian_pair(&t.double, &t.metric, &t.h_plus, &t.h_minus))?;
        let jac = check_jacobi(&t.double);
        if !jac.passed() {
            return Err(format!("{name}: jacobi: {}", jac.witness.unwrap_or_default()));
        }
        let back = cobracket_from_triple(&t, Side::Plus).map_err(|e| format!("{name}: {e}"))?;
        if !same_cobracket(&back, &h.cobracket) {
            return Err(format!("{name}: recovered cobracket differs from the input"));
        }
        within(start, Duration::from_secs(1), name)?;
        out.push(format!("{name} dim {} ({} checks)", t.dim(), n + jac.checked));
    }
    Ok(out.join(", "))
}

fn c2_cybe() -> Verdict {
    let start = Instant::now();
    let mut n = 0;
    for (name, t) in doubles() {
        let r = canonical_r(&t).map_err(|e| e.to_string())?;
        n += passed(name, &check_cybe(&t, &r))?;
        n += passed(name, &check_dr_identities(&t, &r))?;
    }
    within(start, Duration::from_secs(1), "CYBE")?;
    Ok(format!("{n} tensor entries"))
}

fn c3_coboundary() -> Verdict {
    let mut n = 0;
    for (name, t) in doubles() {
        let r = canonical_r(&t).map_err(|e| e.to_string())?;
        n += passed(name, &check_coboundary(&t, &r))?;
    }
    Ok(format!("{n} basis vectors"))
}

fn c4_curvature() -> Verdict {
    let start = Instant::now();
    let mut n = 0;
    for (name, t) in [("abelian", build_double(&bialgebras()[0].1)), ("E1", e1_double())] {
        let q = quantize(&t, 4, 6).map_err(|e| format!("{name}: {e}"))?;
        let rep = check_curvature(&q, &t);
        for want in ["sym2_zero", "w_central", "d2_curvature", "c_zero_without_g2"] {
            if rep.find(want).is_none() {
                return Err(format!("{name}: {want} missing"));
            }
        }
        n += passed(name, &rep)?;
    }
    within(start, Duration::from_secs(5), "curvature")?;
    Ok(format!("H=4 L=6, {n} checks"))
}

/// h₊′ = ⟨e, ε^f⟩ and h₋′ = ⟨f, ε^e⟩: both isotropic, closed, transverse.
fn e1_second_pair(t: &ManinTriple) -> ManinTriple {
    let b = t.double.basis();
    let v = |l: &str| t.double.vector(b.lookup(l).expect("label"));
    let plus = Subspace::new(vec![v("e"), v("ε^f")]);
    let minus = Subspace::new(vec![v("ε^e"), v("f")]);
    ManinTriple::from_pair(t.double.clone(), t.metric.clone(), plus, minus).expect("second pair")
}

fn c5_w() -> Verdict {
    let t = e1_double();
    let q = quantize(&t, 3, 6).map_err(|e| e.to_string())?;
    let rep = check_coalgebra_object(&q);
    let dw = rep.find("delta_w").ok_or("delta_w missing")?;
    if !dw.passed() {
        return Err(format!("ΔW: {}", dw.witness.clone().unwrap_or_default()));
    }
    let alt = e1_second_pair(&t);
    passed("second pair", &rmatrix_suite(&alt))?;
    let swapped = ManinTriple::from_pair(t.double.clone(), t.metric.clone(), t.h_minus.clone(), t.h_plus.clone())
        .map_err(|e| e.to_string())?;
    let w = &q.w;
    for (name, other) in [("⟨e,ε^f⟩ ⊕ ⟨f,ε^e⟩", &alt), ("swapped", &swapped)] {
        let w2 = w_for_triple(other, 3, 6).map_err(|e| e.to_string())?;
        if &w2 != w {
            return Err(format!("W differs for the pair {name}"));
        }
    }
    if w.is_zero() {
        return Err("W vanishes, so agreement says nothing".into());
    }
    Ok("ΔW identity exact; W equal for three pairs".into())
}

fn c6_coalgebra() -> Verdict {
    let mut n = 0;
    for (name, t) in doubles().into_iter().take(2) {
        let q = quantize(&t, 3, 5).map_err(|e| e.to_string())?;
        let rep = check_coalgebra_object(&q);
        for want in [
            "hbar_omega/connection",
            "hbar_omega/curvature",
            "minus_two_hbar_r/connection",
            "minus_two_hbar_r/curvature",
            "coassociative",
            "counit",
        ] {
            if rep.find(want).is_none() {
                return Err(format!("{name}: {want} missing"));
            }
        }
        n += passed(name, &rep)?;
    }
    Ok(format!("H=3 L=5, {n} checks"))
}

fn c7_koszul() -> Verdict {
    let start = Instant::now();
    let t = e1_double();
    let bounds = KoszulBounds { sym_weight: 4, word_len: 6, hbar_order: 3 };
    let rep = koszul_suite(&t, bounds);
    passed("koszul", &rep)?;
    if rep.find("hbar0_is_ce").is_none_or(|c| c.checked == 0) {
        return Err("ħ⁰ comparison with the CE complex did not run".into());
    }
    let c = build_twisted_complex(&t, bounds, true).map_err(|e| e.to_string())?;
    let want = BTreeMap::from([(0i64, 1usize)]);
    for j in 0..3 {
        let h = c.layer_cohomology(j);
        let h: BTreeMap<_, _> = h.into_iter().filter(|(_, r)| *r > 0).collect();
        if h != want {
            return Err(format!("ħ^{j} cohomology {h:?}"));
        }
    }
    within(start, Duration::from_secs(30), "koszul")?;
    Ok(format!("dimension {}, H = ℚ in degree 0 at each ħ-order", c.dim()))
}

struct Loop {
    base: BaseAlgebra,
    r: DifferenceRMatrix,
    pl: PositiveLoop,
}

fn sl2_loop(n: usize) -> Loop {
    let base = sl2();
    let r = DifferenceRMatrix::yang(&base);
    let pl = PositiveLoop::with_r(&r, n, 4, 6).expect("positive loop");
    Loop { base, r, pl }
}

/// d(z)² = 0, intertwining, and the swap, for a module pair under the given differential.
fn meromorphic(l: &Loop, mods: &[FsfModule], imgs: &[shifted_manin::uea::UElem], k: usize) -> Result<usize, String> {
    let mut n = 0;
    for m in mods {
        n += passed(&m.name, &check_module(&l.pl, m, imgs))?;
    }
    let t = build_meromorphic_tensor(&l.pl, &l.r, mods, k, 2).map_err(|e| e.to_string())?;
    n += passed("tensor", &check_tensor(&l.pl, &t, imgs, 2))?;
    let sw = check_module_commutativity(&l.pl, &l.r, &mods[0], &mods[1], k).map_err(|e| e.to_string())?;
    n += passed("swap", &sw)?;
    Ok(n)
}

fn gl1_loop() -> (Loop, FsfModule) {
    let base = algebra("gl1.json").base_algebra().expect("gl1");
    let r = DifferenceRMatrix::yang(&base);
    let pl = PositiveLoop::with_r(&r, 3, 4, 6).expect("positive loop");
    let m = module("gl1_eps.json", &base);
    (Loop { base, r, pl }, m)
}

fn c8_meromorphic() -> Verdict {
    let start = Instant::now();
    let l = sl2_loop(3);
    let ev = module("ev2.json", &l.base);
    let imgs = l.pl.dr_images().map_err(|e| e.to_string())?;
    let n = meromorphic(&l, &[ev.clone(), ev], &imgs, 3)?;
    // ε acts by 0 on evaluation modules; this pair makes d(z)² carry terms
    let (g, m) = gl1_loop();
    let gi = g.pl.dr_images().map_err(|e| e.to_string())?;
    let n2 = meromorphic(&g, &[m.clone(), m], &gi, 3)?;
    within(start, Duration::from_secs(30), "meromorphic")?;
    Ok(format!("sl2 N=3 ev2⊗ev2: {n} checks; gl1 with ε acting: {n2} checks"))
}

fn c9_associativity() -> Verdict {
    let l = sl2_loop(3);
    let ev = module("ev2.json", &l.base);
    let rz = meromorphic_r(&l.r, &l.pl, 3).map_err(|e| e.to_string())?;
    let imgs = l.pl.dr_images().map_err(|e| e.to_string())?;
    let mut n = passed("universal", &check_weak_associativity(&l.pl, &l.r, &rz, &imgs, 3, 2))?;
    let rep =
        check_module_associativity(&l.pl, &l.r, &[ev.clone(), ev.clone(), ev], 3, 2).map_err(|e| e.to_string())?;
    n += passed("ev2³", &rep)?;
    let (g, m) = gl1_loop();
    let rep = check_module_associativity(&g.pl, &g.r, &[m.clone(), m.clone(), m], 3, 2).map_err(|e| e.to_string())?;
    n += passed("gl1[ε]³", &rep)?;
    Ok(format!("{n} checks"))
}

fn c10_level() -> Verdict {
    let l = sl2_loop(3);
    let ev = module("ev2.json", &l.base);
    let rz = meromorphic_r(&l.r, &l.pl, 3).map_err(|e| e.to_string())?;
    let mut n = 0;
    for k in [int(1), rat(-2, 3)] {
        n += passed("level", &level_deform(&l.pl, &l.r, &rz, &k, 3).map_err(|e| e.to_string())?)?;
        let imgs = l.pl.level_images(&k).map_err(|e| e.to_string())?;
        n += meromorphic(&l, &[ev.clone(), ev.clone()], &imgs, 3)?;
    }
    Ok(format!("k ∈ {{1, −2/3}}, {n} checks"))
}

fn c11_coherence() -> Verdict {
    let base = sl2();
    let rep = check_truncation_coherence(&base, &DifferenceRMatrix::yang(&base), 2).map_err(|e| e.to_string())?;
    for want in ["structure constants", "𝐫 entries", "R(z) strata"] {
        if rep.find(want).is_none_or(|c| c.checked == 0) {
            return Err(format!("{want} not compared"));
        }
    }
    Ok(format!("{} entries", passed("coherence", &rep)?))
}

/// Runs a corrupted input; it must fail with a printed witness.
fn must_fail(name: &str, run: impl FnOnce() -> Result<Report, String>) -> Result<String, String> {
    match run() {
        Err(e) => Ok(format!("{name}: {e}")),
        Ok(rep) => match rep.checks.iter().find(|c| !c.passed() && c.witness.as_deref().is_some_and(|w| !w.is_empty()))
        {
            Some(c) => Ok(format!("{name}: {} ({})", c.name, c.witness.as_deref().unwrap())),
            None => Err(format!("{name} still passes")),
        },
    }
}

fn triple_report(f: &AlgebraFile) -> Result<Report, String> {
    let t = f.triple().map_err(|e| e.to_string())?;
    Ok(shifted_manin::bialg::check_triple(&t))
}

fn c12_mutations() -> Verdict {
    let d = algebra("e1_double.json");
    let sl = algebra("sl2.json");
    let base = sl2();
    let ev_text = std::fs::read_to_string(corpus("ev2.json")).unwrap();
    let ev = ModuleFile::parse(&ev_text).unwrap();
    let neg = |s: &str| crate_fmt(&-parse(s));
    let dbl = |s: &str| crate_fmt(&(parse(s) * int(2)));
    let module_report = |m: ModuleFile| -> Result<Report, String> {
        let m = m.to_module(&base).map_err(|e| e.to_string())?;
        let pl = PositiveLoop::new(&base, 2, 3, 6).map_err(|e| e.to_string())?;
        Ok(check_module(&pl, &m, &pl.dr_images().map_err(|e| e.to_string())?))
    };
    let mut lines = Vec::new();
    let mut m = d.clone();
    m.brackets[1].terms[0].1 = neg(&m.brackets[1].terms[0].1);
    lines.push(must_fail("E1 double, sign of [e, ε^f]", || triple_report(&m)));
    let mut m = d.clone();
    m.brackets[2].terms[0].1 = dbl(&m.brackets[2].terms[0].1);
    lines.push(must_fail("E1 double, doubled [f, ε^f]", || triple_report(&m)));
    let mut m = d.clone();
    m.kappa[3].value = neg(&m.kappa[3].value);
    lines.push(must_fail("E1 double, sign of κ(ε^f, f)", || triple_report(&m)));
    let mut m = d.clone();
    m.kappa[0].value = dbl(&m.kappa[0].value);
    lines.push(must_fail("E1 double, doubled κ(e, ε^e)", || triple_report(&m)));
    let mut m = sl.clone();
    m.brackets[2].terms[0].1 = neg(&m.brackets[2].terms[0].1);
    lines.push(must_fail("sl2, sign of [h, f]", || {
        let (l, _) = m.algebra().map_err(|e| e.to_string())?;
        let mut rep = Report::new("lie");
        rep.push(check_jacobi(&l));
        Ok(rep)
    }));
    let mut m = sl.clone();
    m.beta[0].value = neg(&m.beta[0].value);
    lines.push(must_fail("sl2, sign of β(e, f)", || {
        m.base_algebra().map(|_| Report::new("base")).map_err(|e| e.to_string())
    }));
    let mut m = ev.clone();
    m.action[2].matrix[1][1] = neg(&m.action[2].matrix[1][1]);
    lines.push(must_fail("ev2, sign of ρ(h)₂₂", || module_report(m)));
    let mut m = ev.clone();
    m.action[0].matrix[0][1] = dbl(&m.action[0].matrix[0][1]);
    lines.push(must_fail("ev2, doubled ρ(e)₁₂", || module_report(m)));
    let yang = &bialgebras()[2].1;
    let (x, (idx, c)) = yang
        .cobracket
        .delta
        .iter()
        .enumerate()
        .find_map(|(x, t)| t.iter().next().map(|(i, c)| (x, (i.clone(), c.clone()))))
        .expect("Yang cobracket is nonzero");
    let bad = yang.cobracket.with_entry(x, idx[0], idx[1], -c);
    lines.push(must_fail("Yang N=2 cobracket, one sign", || Ok(check_shifted_bialgebra(&yang.algebra, &bad))));
    let t = e1_double();
    let r = canonical_r(&t).unwrap();
    let (i, v) = r.tensor.iter().next().map(|(i, v)| (i.clone(), v.clone())).unwrap();
    let bad = r.with_entry(i[0], i[1], -v);
    lines.push(must_fail("E1 double 𝐫, one sign", || {
        let mut rep = check_cybe(&t, &bad);
        rep.extend(check_coboundary(&t, &bad));
        Ok(rep)
    }));
    let lines: Vec<String> = lines.into_iter().collect::<Result<_, _>>()?;
    if lines.len() != 10 {
        return Err(format!("{} mutations", lines.len()));
    }
    for l in &lines {
        println!("      {}", l.lines().next().unwrap_or_default());
    }
    Ok("10 of 10 corruptions caught".into())
}

fn parse(s: &str) -> Rational {
    shifted_manin::exactnum::parse_rational(s).expect("corpus rational")
}

fn crate_fmt(r: &Rational) -> String {
    shifted_manin::exactnum::fmt_rational(r)
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 12] = [
        ("double correspondence", c1_double_correspondence),
        ("1-shifted CYBE and d𝐫 identities", c2_cybe),
        ("coboundary formula", c3_coboundary),
        ("curvature structure", c4_curvature),
        ("ΔW and independence of W", c5_w),
        ("coalgebra-object identities", c6_coalgebra),
        ("Koszul complex", c7_koszul),
        ("meromorphic tensor complex", c8_meromorphic),
        ("weak associativity", c9_associativity),
        ("level deformation", c10_level),
        ("truncation coherence", c11_coherence),
        ("mutation sensitivity", c12_mutations),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let ms = start.elapsed().as_millis();
        match v {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({ms} ms): {detail}", i + 1),
            Err(w) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({ms} ms): {w}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
