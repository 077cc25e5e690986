//! The canonical r-matrix of a Manin triple: coboundary formula, the d-r
//! identities, the classical Yang-Baxter equation and the Casimir Ω.
//!
//! Commutators of embedded tensors follow the product rule of U(g)^{⊗n}:
//! for pure tensors u = u₁⊗…⊗uₙ and v = v₁⊗…⊗vₙ (units allowed),
//! uv = (−1)^{Σ_{i>j}|u_i||v_j|} (u₁v₁)⊗…⊗(uₙvₙ). When u and v share exactly
//! one non-unit slot k, [u, v] keeps the same sign and puts [u_k, v_k] in
//! slot k. Worked example in ⊗³:
//! [a⊗b⊗1, c⊗1⊗d] = (−1)^{|b||c|} [a, c]⊗b⊗d.

use thiserror::Error;

use crate::bialg::{cobracket_from_triple, BialgError, Cobracket, ManinTriple, Side};
use crate::exactnum::Rational;
use crate::graded::{is_odd, parity_sign, SparseTensor};
use crate::liealg::{GradedLieAlgebra, ShiftedMetric, Subspace};
use crate::report::{Check, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RMatError {
    #[error("triple has no dual matching ({0} plus vectors, {1} minus vectors)")]
    MissingMatching(usize, usize),
    #[error(transparent)]
    Bialg(#[from] BialgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    pub tensor: SparseTensor,
}

impl RMatrix {
    pub fn degree(&self) -> Option<i64> {
        self.tensor.iter().next().map(|(i, _)| self.tensor.entry_degree(i))
    }

    pub fn with_entry(&self, i: usize, j: usize, v: Rational) -> Self {
        let mut t = self.tensor.clone();
        let old = t.coeff(&[i, j]);
        t.add_term(vec![i, j], v - old);
        RMatrix { tensor: t }
    }
}

/// One pure tensor with optional unit slots.
type Embedded = Vec<(Vec<Option<usize>>, Rational)>;

/// Places an arity-k tensor into slots `pos` of an n-fold product.
pub fn embed(t: &SparseTensor, pos: &[usize], n: usize) -> Embedded {
    assert_eq!(t.arity(), pos.len());
    t.iter()
        .map(|(idx, c)| {
            let mut w = vec![None; n];
            for (k, &p) in pos.iter().enumerate() {
                w[p] = Some(idx[k]);
            }
            (w, c.clone())
        })
        .collect()
}

/// [X, Y] of embedded tensors whose terms share at most one non-unit slot.
/// The flag reports a bracket that left the algebra's window.
pub fn embedded_commutator(l: &GradedLieAlgebra, n: usize, x: &Embedded, y: &Embedded) -> (SparseTensor, bool) {
    let b = l.basis();
    let deg = |s: Option<usize>| s.map_or(0, |i| b.degree(i));
    let mut out = SparseTensor::zero(n, b.clone());
    let mut overflow = false;
    for (u, cu) in x {
        for (v, cv) in y {
            let shared: Vec<usize> = (0..n).filter(|&k| u[k].is_some() && v[k].is_some()).collect();
            if shared.is_empty() {
                continue;
            }
            assert_eq!(shared.len(), 1, "commutator of tensors sharing more than one slot");
            let k = shared[0];
            let mut s = 0i64;
            for i in 0..n {
                for j in 0..i {
                    s += deg(u[i]) * deg(v[j]);
                }
            }
            let (ua, va) = (u[k].unwrap(), v[k].unwrap());
            if l.overflows(ua, va) {
                overflow = true;
                continue;
            }
            let sign = parity_sign(is_odd(s));
            for (c, f) in l.bracket_basis(ua, va) {
                let idx: Vec<usize> = (0..n)
                    .map(|i| if i == k { c } else { u[i].or(v[i]).expect("every slot of the result is filled") })
                    .collect();
                out.add_term(idx, &f * cu * cv * &sign);
            }
        }
    }
    (out, overflow)
}

/// [a, Δ(x)] = [a, x⊗1] + [a, 1⊗x] for a 2-tensor a and a vector x.
pub fn adjoint_commutator_2slot(l: &GradedLieAlgebra, a: &SparseTensor, x: &SparseTensor) -> (SparseTensor, bool) {
    let ea = embed(a, &[0, 1], 2);
    let (t1, o1) = embedded_commutator(l, 2, &ea, &embed(x, &[0], 2));
    let (t2, o2) = embedded_commutator(l, 2, &ea, &embed(x, &[1], 2));
    (t1.add(&t2), o1 || o2)
}

/// 𝐫 = Σ_a x_a ⊗ ε^a over the stored matching.
pub fn canonical_r(t: &ManinTriple) -> Result<RMatrix, RMatError> {
    let (p, m) = (t.h_plus.dim(), t.h_minus.dim());
    if p != m || p == 0 && t.dim() != 0 {
        return Err(RMatError::MissingMatching(p, m));
    }
    let mut r = SparseTensor::zero(2, t.double.basis().clone());
    for (x, e) in t.h_plus.span.iter().zip(&t.h_minus.span) {
        r = r.add(&x.tensor(e));
    }
    Ok(RMatrix { tensor: r })
}

/// Degree and the two contraction identities of 𝐫.
pub fn check_r_invariants(t: &ManinTriple, r: &RMatrix) -> Report {
    let mut rep = Report::new("r_matrix");
    let bad_deg = r.tensor.iter().find(|(i, _)| r.tensor.entry_degree(i) != 1);
    rep.push(match bad_deg {
        Some((i, _)) => Check::fail("degree", format!("entry {i:?} has degree {}", r.tensor.entry_degree(i))),
        None => Check::pass("degree", r.tensor.len()),
    });
    let kt = t.metric.as_tensor(t.double.basis().clone());
    let mut fail = None;
    for x in &t.h_plus.span {
        let c = r.tensor.contract(&kt, 1, x).expect("arity 2");
        if c != x.neg() {
            fail = Some(format!("1⊗κ(r, {}) = {}", x.pretty(), c.pretty()));
            break;
        }
    }
    rep.push(match fail {
        Some(w) => Check::fail("contract_plus", w),
        None => Check::pass("contract_plus", t.h_plus.dim()),
    });
    let mut fail = None;
    for y in &t.h_minus.span {
        let d = y.iter().next().map_or(0, |(i, _)| y.entry_degree(i));
        let c = r.tensor.contract(&kt, 0, y).expect("arity 2");
        if c != y.scale(&parity_sign(is_odd(d))) {
            fail = Some(format!("κ⊗1(r, {}) = {}", y.pretty(), c.pretty()));
            break;
        }
    }
    rep.push(match fail {
        Some(w) => Check::fail("contract_minus", w),
        None => Check::pass("contract_minus", t.h_minus.dim()),
    });
    rep
}

/// δ_𝔤 on the double's basis: δ on h₊ and −δ* on h₋.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCobracket {
    pub delta_g: Cobracket,
}

fn push_side(t: &ManinTriple, side: Side, d: &Cobracket) -> Vec<SparseTensor> {
    let sp = match side {
        Side::Plus => &t.h_plus,
        Side::Minus => &t.h_minus,
    };
    d.delta
        .iter()
        .map(|dt| {
            let mut out = SparseTensor::zero(2, t.double.basis().clone());
            for (i, c) in dt.iter() {
                out.add_scaled(&sp.span[i[0]].tensor(&sp.span[i[1]]), c);
            }
            out
        })
        .collect()
}

pub fn double_cobracket(t: &ManinTriple) -> Result<DoubleCobracket, RMatError> {
    let dp = push_side(t, Side::Plus, &cobracket_from_triple(t, Side::Plus)?);
    let dm = push_side(t, Side::Minus, &cobracket_from_triple(t, Side::Minus)?);
    let basis = t.double.basis().clone();
    let mut delta = Vec::with_capacity(basis.len());
    for v in 0..basis.len() {
        let (alpha, beta) = t.split(&t.double.vector(v));
        let mut out = SparseTensor::zero(2, basis.clone());
        for (a, c) in alpha.iter().enumerate() {
            out.add_scaled(&dp[a], c);
        }
        for (b, c) in beta.iter().enumerate() {
            out.add_scaled(&dm[b], &-c.clone());
        }
        delta.push(out);
    }
    Ok(DoubleCobracket { delta_g: Cobracket { basis, delta } })
}

/// [−𝐫, Δ(v)] = δ_𝔤(v) for every basis vector v.
pub fn check_coboundary(t: &ManinTriple, r: &RMatrix) -> Report {
    let mut rep = Report::new("coboundary");
    let dg = match double_cobracket(t) {
        Ok(d) => d,
        Err(e) => {
            rep.push(Check::fail("coboundary", e.to_string()));
            return rep;
        }
    };
    let g = &t.double;
    let neg_r = r.tensor.neg();
    let (mut checked, mut boundary) = (0, 0);
    let mut fail = None;
    for v in 0..g.dim() {
        let (lhs, of) = adjoint_commutator_2slot(g, &neg_r, &g.vector(v));
        if of {
            boundary += 1;
            continue;
        }
        checked += 1;
        if lhs != dg.delta_g.delta[v] {
            fail = Some(format!(
                "v = {}: [−r, Δv] = {} but δ_g(v) = {}",
                g.basis().label(v),
                lhs.pretty(),
                dg.delta_g.delta[v].pretty()
            ));
            break;
        }
    }
    rep.push(match fail {
        Some(w) => Check::fail("coboundary", w),
        None => Check::pass("coboundary", checked).with_boundary(boundary),
    });
    rep
}

/// The three commutators [𝐫¹², 𝐫¹³], [𝐫¹², 𝐫²³], [𝐫¹³, 𝐫²³].
pub fn cybe_terms(g: &GradedLieAlgebra, r: &RMatrix) -> ([SparseTensor; 3], bool) {
    let r12 = embed(&r.tensor, &[0, 1], 3);
    let r13 = embed(&r.tensor, &[0, 2], 3);
    let r23 = embed(&r.tensor, &[1, 2], 3);
    let (a, o1) = embedded_commutator(g, 3, &r12, &r13);
    let (b, o2) = embedded_commutator(g, 3, &r12, &r23);
    let (c, o3) = embedded_commutator(g, 3, &r13, &r23);
    ([a, b, c], o1 || o2 || o3)
}

pub fn check_cybe(t: &ManinTriple, r: &RMatrix) -> Report {
    let mut rep = Report::new("cybe");
    let ([a, b, c], of) = cybe_terms(&t.double, r);
    let res = a.add(&b).add(&c);
    let n = t.dim();
    let check = if of {
        Check::skipped("cybe", "a commutator left the truncation window")
    } else if res.is_zero() {
        Check::pass("cybe", n * n * n)
    } else {
        let (i, v) = res.iter().next().unwrap();
        let lab: Vec<&str> = i.iter().map(|&k| t.double.basis().label(k)).collect();
        Check::fail("cybe", format!("coefficient {} on {}", crate::exactnum::fmt_rational(v), lab.join("⊗")))
    };
    rep.push(check);
    rep
}

fn delta_slot(d: &Cobracket, r: &SparseTensor, slot: usize) -> SparseTensor {
    let b = r.basis().clone();
    let mut out = SparseTensor::zero(3, b.clone());
    for (idx, c) in r.iter() {
        let (i, j) = (idx[0], idx[1]);
        if slot == 0 {
            for (di, dc) in d.delta[i].iter() {
                out.add_term(vec![di[0], di[1], j], dc * c);
            }
        } else {
            let s = parity_sign(is_odd(b.degree(i)));
            for (dj, dc) in d.delta[j].iter() {
                out.add_term(vec![i, dj[0], dj[1]], dc * c * &s);
            }
        }
    }
    out
}

/// δ_𝔤⊗1(𝐫) = [𝐫¹³, 𝐫²³] and 1⊗δ_𝔤(𝐫) = [𝐫¹², 𝐫¹³].
pub fn check_dr_identities(t: &ManinTriple, r: &RMatrix) -> Report {
    let mut rep = Report::new("dr");
    let dg = match double_cobracket(t) {
        Ok(d) => d.delta_g,
        Err(e) => {
            rep.push(Check::fail("dr_left", e.to_string()));
            return rep;
        }
    };
    let ([r12_13, _, r13_23], of) = cybe_terms(&t.double, r);
    let n = t.dim();
    for (name, lhs, rhs) in
        [("dr_left", delta_slot(&dg, &r.tensor, 0), r13_23), ("dr_right", delta_slot(&dg, &r.tensor, 1), r12_13)]
    {
        let c = if of {
            Check::skipped(name, "a commutator left the truncation window")
        } else if lhs == rhs {
            Check::pass(name, n * n * n)
        } else {
            Check::fail(name, format!("residual {}", lhs.sub(&rhs).pretty()))
        };
        rep.push(c);
    }
    rep
}

/// Ω = 𝐫 − σ𝐫.
pub fn omega_of(r: &RMatrix) -> SparseTensor {
    r.tensor.sub(&r.tensor.braid().expect("arity 2"))
}

/// σΩ = −Ω and [Ω, Δ(v)] = 0 for all basis v.
pub fn check_omega(t: &ManinTriple, omega: &SparseTensor) -> Report {
    let mut rep = Report::new("omega");
    let sw = omega.braid().expect("arity 2");
    rep.push(if sw == omega.neg() {
        Check::pass("antisymmetric", omega.len())
    } else {
        Check::fail("antisymmetric", format!("σΩ + Ω = {}", sw.add(omega).pretty()))
    });
    let g = &t.double;
    let (mut checked, mut boundary) = (0, 0);
    let mut fail = None;
    for v in 0..g.dim() {
        let (c, of) = adjoint_commutator_2slot(g, omega, &g.vector(v));
        if of {
            boundary += 1;
            continue;
        }
        checked += 1;
        if !c.is_zero() {
            fail = Some(format!("[Ω, Δ{}] = {}", g.basis().label(v), c.pretty()));
            break;
        }
    }
    rep.push(match fail {
        Some(w) => Check::fail("invariant", w),
        None => Check::pass("invariant", checked).with_boundary(boundary),
    });
    rep
}

/// Ω from a second transverse Lagrangian pair of the same (𝔤, κ).
pub fn omega_for_pair(
    t: &ManinTriple,
    metric: &ShiftedMetric,
    h_plus: Subspace,
    h_minus: Subspace,
) -> Result<SparseTensor, RMatError> {
    let t2 = ManinTriple::from_pair(t.double.clone(), metric.clone(), h_plus, h_minus)?;
    Ok(omega_of(&canonical_r(&t2)?))
}

/// Every check of this module on one triple.
pub fn rmatrix_suite(t: &ManinTriple) -> Report {
    let mut rep = Report::new("rmat");
    let r = match canonical_r(t) {
        Ok(r) => r,
        Err(e) => {
            rep.push(Check::fail("canonical_r", e.to_string()));
            return rep;
        }
    };
    rep.extend(check_r_invariants(t, &r));
    rep.extend(check_coboundary(t, &r));
    rep.extend(check_cybe(t, &r));
    rep.extend(check_dr_identities(t, &r));
    rep.extend(check_omega(t, &omega_of(&r)));
    if let Ok(d) = double_cobracket(t) {
        let mut b = crate::bialg::check_shifted_bialgebra(&t.double, &d.delta_g);
        b.suite = "double_bialgebra".into();
        rep.extend(b);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bialg::build_double;
    use crate::bialg::tests::{abelian, e1};
    use crate::exactnum::int;

    #[test]
    fn e1_r_matrix() {
        let t = build_double(&e1());
        let r = canonical_r(&t).unwrap();
        // basis e, f, ε^e, ε^f
        assert_eq!(r.tensor.pretty(), "1*e⊗ε^e + 1*f⊗ε^f");
        assert_eq!(r.degree(), Some(1));
        assert!(check_r_invariants(&t, &r).all_pass());
        let rep = rmatrix_suite(&t);
        assert!(rep.all_pass(), "{}", rep.to_text());
    }

    #[test]
    fn abelian_r_matrix() {
        let t = build_double(&abelian(1));
        let r = canonical_r(&t).unwrap();
        assert_eq!(r.tensor.pretty(), "1*a0⊗ε^a0");
        let ([a, b, c], _) = cybe_terms(&t.double, &r);
        assert!(a.is_zero() && b.is_zero() && c.is_zero());
        assert!(rmatrix_suite(&t).all_pass());
    }

    #[test]
    fn commutator_worked_example() {
        // [e⊗ε^e⊗1, ε^f⊗1⊗f] = (−1)^{|ε^e||ε^f|} [e, ε^f]⊗ε^e⊗f
        let t = build_double(&e1());
        let g = &t.double;
        let b = g.basis().clone();
        let x = SparseTensor::from_entries(2, b.clone(), [(vec![0, 2], int(1))]);
        let y = SparseTensor::from_entries(2, b.clone(), [(vec![3, 1], int(1))]);
        let (c, of) = embedded_commutator(g, 3, &embed(&x, &[0, 1], 3), &embed(&y, &[0, 2], 3));
        assert!(!of);
        // the sign is −1 and [e, ε^f] = −ε^f
        assert_eq!(c.pretty(), "1*ε^f⊗ε^e⊗f");
    }

    #[test]
    fn adjoint_commutator_example() {
        let t = build_double(&e1());
        let g = &t.double;
        let b = g.basis().clone();
        let a = SparseTensor::from_entries(2, b.clone(), [(vec![0, 2], int(1))]);
        let (c, _) = adjoint_commutator_2slot(g, &a, &g.vector(1));
        // [e, f]⊗ε^e + e⊗[ε^e, f], and f acts trivially on ε^e
        let expect = SparseTensor::from_entries(2, b.clone(), [(vec![1, 2], int(1))]);
        assert_eq!(c, expect);
        let om = omega_of(&canonical_r(&t).unwrap());
        assert!(check_omega(&t, &om).all_pass());
    }

    #[test]
    fn coboundary_on_minus_side_is_minus_dual_cobracket() {
        let t = build_double(&e1());
        let dg = double_cobracket(&t).unwrap().delta_g;
        assert!(dg.delta[0].is_zero() && dg.delta[1].is_zero());
        // δ*(ε^f) = −ε^e⊗ε^f + ε^f⊗ε^e, so δ_g(ε^f) = ε^e⊗ε^f − ε^f⊗ε^e
        assert_eq!(dg.delta[3].pretty(), "1*ε^e⊗ε^f + -1*ε^f⊗ε^e");
    }

    #[test]
    fn corrupted_r_fails_cybe() {
        let t = build_double(&e1());
        let r = canonical_r(&t).unwrap().with_entry(1, 3, int(2));
        let rep = check_cybe(&t, &r);
        assert!(!rep.all_pass());
        assert!(rep.checks[0].witness.is_some());
    }

    #[test]
    fn omega_is_pair_independent() {
        let t = build_double(&abelian(2));
        let om = omega_of(&canonical_r(&t).unwrap());
        // the swapped pair (h₋, h₊) is another transverse Lagrangian pair
        let om2 = omega_for_pair(&t, &t.metric, t.h_minus.clone(), t.h_plus.clone()).unwrap();
        assert_eq!(om, om2);
    }
}
