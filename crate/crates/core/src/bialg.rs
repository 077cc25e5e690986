//! 1-shifted cobrackets: well-formedness, the bialgebra axioms, extraction
//! from a Manin triple, dualization and the double construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::linalg::Matrix;
use crate::exactnum::{fmt_rational, Rational};
use crate::graded::{is_odd, parity_sign, GradedBasis, SparseTensor};
use crate::liealg::{
    check_jacobi, check_lagrangian_pair, check_metric, dual_basis, GradedLieAlgebra, ShiftedMetric, Subspace, Terms,
};
use crate::report::{Check, Report};
use crate::rmat::adjoint_commutator_2slot;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BialgError {
    #[error("the pairing between the two Lagrangians is not invertible")]
    SingularPairing,
    #[error("subspace vector {0} is not homogeneous")]
    Inhomogeneous(String),
    #[error("cobracket has {got} entries for a {expected}-dimensional algebra")]
    Size { expected: usize, got: usize },
}

/// δ(x_a) for every basis vector, as arity-2 tensors over the same basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Cobracket {
    pub basis: Arc<GradedBasis>,
    pub delta: Vec<SparseTensor>,
}

impl Cobracket {
    pub fn zero(basis: Arc<GradedBasis>) -> Self {
        let delta = (0..basis.len()).map(|_| SparseTensor::zero(2, basis.clone())).collect();
        Cobracket { basis, delta }
    }

    pub fn is_zero(&self) -> bool {
        self.delta.iter().all(SparseTensor::is_zero)
    }

    /// δ extended linearly to an arity-1 tensor.
    pub fn apply(&self, x: &SparseTensor) -> SparseTensor {
        let mut out = SparseTensor::zero(2, self.basis.clone());
        for (i, c) in x.iter() {
            out.add_scaled(&self.delta[i[0]], c);
        }
        out
    }

    /// g^{bc}_a: the coefficient of x_b⊗x_c in δ(x_a), signed as in the
    /// dual bracket [ε^b, ε^c] = Σ_a g^{bc}_a ε^a.
    pub fn dual_constant(&self, a: usize, b: usize, c: usize) -> Rational {
        let d = self.delta[a].coeff(&[b, c]);
        let s = parity_sign(is_odd(self.basis.degree(c) * (self.basis.degree(b) + 1)));
        d * s
    }

    pub fn with_entry(&self, a: usize, b: usize, c: usize, v: Rational) -> Self {
        let mut out = self.clone();
        let old = out.delta[a].coeff(&[b, c]);
        out.delta[a].add_term(vec![b, c], v - old);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedBialgebra {
    pub algebra: GradedLieAlgebra,
    pub cobracket: Cobracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// (g, h₊, h₋) with matched bases: κ(h_plus[a], h_minus[b]) = δ_ab.
#[derive(Debug, Clone, PartialEq)]
pub struct ManinTriple {
    pub double: GradedLieAlgebra,
    pub metric: ShiftedMetric,
    pub h_plus: Subspace,
    pub h_minus: Subspace,
    pub plus_basis: Arc<GradedBasis>,
    pub minus_basis: Arc<GradedBasis>,
}

fn vector_degree_weight(v: &SparseTensor) -> Result<(i64, i64), BialgError> {
    let mut it = v.iter();
    let Some((i0, _)) = it.next() else {
        return Err(BialgError::Inhomogeneous("0".into()));
    };
    let b = v.basis();
    let d = b.degree(i0[0]);
    if v.iter().any(|(i, _)| b.degree(i[0]) != d) {
        return Err(BialgError::Inhomogeneous(v.pretty()));
    }
    Ok((d, b.weight(i0[0])))
}

fn side_basis(s: &Subspace) -> Result<Arc<GradedBasis>, BialgError> {
    let mut entries = Vec::new();
    for (k, v) in s.span.iter().enumerate() {
        let (d, w) = vector_degree_weight(v)?;
        let single = v.len() == 1 && v.iter().next().map(|(_, c)| c.is_one()).unwrap_or(false);
        let label = if single { v.basis().label(v.iter().next().unwrap().0[0]).to_string() } else { format!("u{k}") };
        entries.push((label, d, w));
    }
    let mut b = GradedBasis::with_weights(entries.clone());
    if b.is_err() {
        let e = entries.into_iter().enumerate().map(|(k, (_, d, w))| (format!("u{k}"), d, w)).collect();
        b = GradedBasis::with_weights(e);
    }
    Ok(Arc::new(b.expect("generated labels are unique")))
}

impl ManinTriple {
    /// Re-bases h₋ so that κ(h_plus[a], h_minus[b]) = δ_ab.
    pub fn from_pair(
        double: GradedLieAlgebra,
        metric: ShiftedMetric,
        h_plus: Subspace,
        h_minus: Subspace,
    ) -> Result<Self, BialgError> {
        let n = h_plus.dim();
        if h_minus.dim() != n {
            return Err(BialgError::SingularPairing);
        }
        let p = Matrix::from_rows(
            h_plus.span.iter().map(|x| h_minus.span.iter().map(|y| metric.pair(x, y)).collect()).collect(),
        );
        let pinv = p.inverse().ok_or(BialgError::SingularPairing)?;
        // m'_b = Σ_d (P^{-1})_{db} m_d
        let mut matched = Vec::with_capacity(n);
        for b in 0..n {
            let mut v = SparseTensor::zero(1, double.basis().clone());
            for d in 0..n {
                let c = pinv.get(d, b);
                if !c.is_zero() {
                    v.add_scaled(&h_minus.span[d], c);
                }
            }
            matched.push(v);
        }
        let h_minus = Subspace::new(matched);
        let plus_basis = side_basis(&h_plus)?;
        let minus_basis = side_basis(&h_minus)?;
        Ok(ManinTriple { double, metric, h_plus, h_minus, plus_basis, minus_basis })
    }

    pub fn dim(&self) -> usize {
        self.double.dim()
    }

    fn side(&self, side: Side) -> (&Subspace, &Subspace, &Arc<GradedBasis>) {
        match side {
            Side::Plus => (&self.h_plus, &self.h_minus, &self.plus_basis),
            Side::Minus => (&self.h_minus, &self.h_plus, &self.minus_basis),
        }
    }

    /// Coordinates of a vector of the chosen side in its matched basis.
    pub fn side_coordinates(&self, side: Side, w: &SparseTensor) -> Vec<Rational> {
        let (_, opp, _) = self.side(side);
        // κ(u_c, v_d) = ±δ_cd, so w_c = ±κ(w, v_c)
        let s = match side {
            Side::Plus => Rational::one(),
            Side::Minus => -Rational::one(),
        };
        opp.span.iter().map(|v| self.metric.pair(w, v) * &s).collect()
    }

    /// The Lie algebra structure on one Lagrangian, over its own basis.
    pub fn side_algebra(&self, side: Side) -> GradedLieAlgebra {
        let (sp, _, basis) = self.side(side);
        let n = sp.dim();
        let mut upper: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
        for a in 0..n {
            for b in a..n {
                if a == b && !is_odd(basis.degree(a)) {
                    continue;
                }
                let w = self.double.bracket(&sp.span[a], &sp.span[b]).expect("same basis");
                let coords = self.side_coordinates(side, &w);
                let t: Terms = coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
                if !t.is_empty() {
                    upper.insert((a, b), t);
                }
            }
        }
        let l = GradedLieAlgebra::new(basis.clone(), upper).expect("valid storage");
        match self.double.window() {
            Some((lo, hi)) => l.with_window(lo, hi),
            None => l,
        }
    }

    /// Decomposes a vector of g into its h₊ and h₋ coordinates.
    pub fn split(&self, v: &SparseTensor) -> (Vec<Rational>, Vec<Rational>) {
        // v = Σ α_a x_a + Σ β_b ε^b; κ(v, ε^b) = α_b, κ(v, x_b) = −β_b
        let alpha = self.h_minus.span.iter().map(|e| self.metric.pair(v, e)).collect();
        let beta = self.h_plus.span.iter().map(|x| -self.metric.pair(v, x)).collect();
        (alpha, beta)
    }

    pub fn project(&self, side: Side, v: &SparseTensor) -> SparseTensor {
        let (alpha, beta) = self.split(v);
        let (coords, sp) = match side {
            Side::Plus => (alpha, &self.h_plus),
            Side::Minus => (beta, &self.h_minus),
        };
        let mut out = SparseTensor::zero(1, self.double.basis().clone());
        for (c, u) in coords.iter().zip(&sp.span) {
            if !c.is_zero() {
                out.add_scaled(u, c);
            }
        }
        out
    }
}

/// Each δ(x_a) lies in Sym² and has total degree |x_a| + 1.
pub fn check_well_formed(h: &GradedLieAlgebra, d: &Cobracket) -> Check {
    if d.delta.len() != h.dim() {
        return Check::fail("well_formed", format!("{} cobracket entries for dimension {}", d.delta.len(), h.dim()));
    }
    for (a, t) in d.delta.iter().enumerate() {
        for (idx, _) in t.iter() {
            let deg = t.entry_degree(idx);
            if deg != h.degree(a) + 1 {
                return Check::fail(
                    "well_formed",
                    format!(
                        "δ({}) has a term {} of degree {} (expected {})",
                        h.basis().label(a),
                        t.pretty(),
                        deg,
                        h.degree(a) + 1
                    ),
                );
            }
        }
        if !t.sym2_check() {
            return Check::fail(
                "well_formed",
                format!("δ({}) = {} is not graded-symmetric", h.basis().label(a), t.pretty()),
            );
        }
    }
    Check::pass("well_formed", h.dim())
}

fn apply_delta_slot(d: &Cobracket, t: &SparseTensor, slot: usize) -> SparseTensor {
    // (δ⊗1)(a⊗b) = δ(a)⊗b and (1⊗δ)(a⊗b) = (−1)^{|a|} a⊗δ(b)
    let b = t.basis().clone();
    let mut out = SparseTensor::zero(3, b.clone());
    for (idx, c) in t.iter() {
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

/// (δ⊗1 + 1⊗δ)δ(x), symmetrized over S₃ with Koszul signs.
pub fn co_jacobi_residual(d: &Cobracket, a: usize) -> SparseTensor {
    let t = &d.delta[a];
    apply_delta_slot(d, t, 0).add(&apply_delta_slot(d, t, 1)).symmetrize_sum()
}

/// The two defining identities, with boundary bookkeeping for windowed algebras.
pub fn check_shifted_bialgebra(h: &GradedLieAlgebra, d: &Cobracket) -> Report {
    let mut rep = Report::new("bialgebra");
    let wf = check_well_formed(h, d);
    let ok = wf.passed();
    rep.push(wf);
    if !ok {
        rep.push(Check::skipped("co_jacobi", "cobracket not well formed"));
        rep.push(Check::skipped("cocycle", "cobracket not well formed"));
        return rep;
    }
    let mut cj = Check::pass("co_jacobi", h.dim());
    for a in 0..h.dim() {
        let r = co_jacobi_residual(d, a);
        if !r.is_zero() {
            cj = Check::fail("co_jacobi", format!("x = {}: residual {}", h.basis().label(a), r.pretty()));
            break;
        }
    }
    rep.push(cj);
    rep.push(check_cocycle(h, d));
    rep
}

/// δ([X,Y]) = [δ(X), Δ(Y)] + (−1)^{|X|}[Δ(X), δ(Y)] on basis pairs.
pub fn check_cocycle(h: &GradedLieAlgebra, d: &Cobracket) -> Check {
    let n = h.dim();
    let mut checked = 0;
    let mut boundary = 0;
    for x in 0..n {
        for y in 0..n {
            let (xy, o1) = h.bracket_vec(x, y);
            let lhs = d.apply(&xy);
            let (t1, o2) = adjoint_commutator_2slot(h, &d.delta[x], &h.vector(y));
            // [Δ(X), δ(Y)] = −(−1)^{|X|(|Y|+1)} [δ(Y), Δ(X)]
            let (t2, o3) = adjoint_commutator_2slot(h, &d.delta[y], &h.vector(x));
            if o1 || o2 || o3 {
                boundary += 1;
                continue;
            }
            checked += 1;
            let s2 = -parity_sign(is_odd(h.degree(x) * (h.degree(y) + 1))) * parity_sign(is_odd(h.degree(x)));
            let rhs = t1.add(&t2.scale(&s2));
            let res = lhs.sub(&rhs);
            if !res.is_zero() {
                return Check::fail(
                    "cocycle",
                    format!("X = {}, Y = {}: residual {}", h.basis().label(x), h.basis().label(y), res.pretty()),
                );
            }
        }
    }
    Check::pass("cocycle", checked).with_boundary(boundary)
}

/// δ on one Lagrangian from κ⊗κ(δ(X))(Y⊗Y') = κ(X, [Y, Y']) over the opposite one.
pub fn cobracket_from_triple(t: &ManinTriple, side: Side) -> Result<Cobracket, BialgError> {
    let (sp, opp, basis) = t.side(side);
    let n = sp.dim();
    let p = Matrix::from_rows(sp.span.iter().map(|u| opp.span.iter().map(|v| t.metric.pair(u, v)).collect()).collect());
    let pinv = p.inverse().ok_or(BialgError::SingularPairing)?;
    // brackets of the opposite side, computed once
    let mut vb = vec![vec![None; n]; n];
    for dd in 0..n {
        for e in 0..n {
            vb[dd][e] = Some(t.double.bracket(&opp.span[dd], &opp.span[e]).expect("same basis"));
        }
    }
    let mut out = Cobracket::zero(basis.clone());
    for a in 0..n {
        let k = Matrix::from_rows(
            (0..n)
                .map(|dd| (0..n).map(|e| t.metric.pair(&sp.span[a], vb[dd][e].as_ref().unwrap())).collect())
                .collect(),
        );
        if k.is_zero() {
            continue;
        }
        // D̃ = P^{−T} K P^{−1}, D^{bc} = (−1)^{|u_c|(1+|u_b|)} D̃^{bc}
        let dt = pinv.transpose().mul(&k).mul(&pinv);
        for b in 0..n {
            for c in 0..n {
                let v = dt.get(b, c);
                if v.is_zero() {
                    continue;
                }
                let s = parity_sign(is_odd(basis.degree(c) * (1 + basis.degree(b))));
                out.delta[a].add_term(vec![b, c], v * s);
            }
        }
    }
    Ok(out)
}

/// The bialgebra on h*[−1]: bracket from g^{bc}_a, cobracket
/// δ*(ε^a) = −Σ (−1)^{|x_b|(|x_c|+1)} f^a_{bc} ε^b⊗ε^c.
pub fn dualize(h: &ShiftedBialgebra) -> ShiftedBialgebra {
    let l = &h.algebra;
    let d = &h.cobracket;
    let n = l.dim();
    let dual = dual_basis(l.basis());
    let mut upper: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
    for b in 0..n {
        for c in b..n {
            if b == c && !is_odd(dual.degree(b)) {
                continue;
            }
            let t: Terms = (0..n).map(|a| (a, d.dual_constant(a, b, c))).filter(|(_, v)| !v.is_zero()).collect();
            if !t.is_empty() {
                upper.insert((b, c), t);
            }
        }
    }
    let mut algebra = GradedLieAlgebra::new(dual.clone(), upper).expect("valid storage");
    if let Some((lo, hi)) = l.window() {
        algebra = algebra.with_window(-1 - hi, -1 - lo);
    }
    let mut cob = Cobracket::zero(dual);
    for b in 0..n {
        for c in 0..n {
            for (a, f) in l.bracket_basis(b, c) {
                let s = -parity_sign(is_odd(l.degree(b) * (l.degree(c) + 1)));
                cob.delta[a].add_term(vec![b, c], f * s);
            }
        }
    }
    ShiftedBialgebra { algebra, cobracket: cob }
}

/// g = h ⊕ h*[−1] with κ(x_a, ε^b) = δ_ab; mixed brackets solved from κ-invariance.
pub fn build_double(h: &ShiftedBialgebra) -> ManinTriple {
    let l = &h.algebra;
    let d = &h.cobracket;
    let n = l.dim();
    let dual = dual_basis(l.basis());
    let mut entries = Vec::with_capacity(2 * n);
    for v in l.basis().vectors().iter().chain(dual.vectors()) {
        entries.push((v.label.clone(), v.degree, v.weight));
    }
    let basis = Arc::new(GradedBasis::with_weights(entries).expect("labels of h and its dual are distinct"));
    let deg = |i: usize| basis.degree(i);
    let metric = ShiftedMetric::antisymmetric((0..n).map(|a| ((a, n + a), Rational::one())));
    let kmat = metric.matrix(2 * n);
    let kt_inv = kmat.transpose().inverse().expect("canonical pairing is invertible");

    let mut upper: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
    for ((a, b), t) in l.upper_table() {
        upper.insert((*a, *b), t.clone());
    }
    for b in 0..n {
        for c in b..n {
            if b == c && !is_odd(deg(n + b)) {
                continue;
            }
            let t: Terms = (0..n).map(|a| (n + a, d.dual_constant(a, b, c))).filter(|(_, v)| !v.is_zero()).collect();
            if !t.is_empty() {
                upper.insert((n + b, n + c), t);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            // rhs_w = κ([x_a, ε^b], w) for every basis w
            let mut rhs = vec![Rational::zero(); 2 * n];
            let eb = deg(n + b);
            for c in 0..n {
                // w = ε^c: (−1)^{|ε^b|} κ(x_a, [ε^b, ε^c]) = (−1)^{|ε^b|} g^{bc}_a
                rhs[n + c] = d.dual_constant(a, b, c) * parity_sign(is_odd(eb));
                // w = x_c: −(−1)^{|a||ε^b| + |a|} κ(ε^b, [x_a, x_c]), κ(ε^b, x_b) = −1
                let f = l.structure_constant(a, c, b);
                let s = -parity_sign(is_odd(deg(a) * eb + deg(a)));
                rhs[c] = s * (-f);
            }
            let u = kt_inv.mul_vec(&rhs);
            let t: Terms = u.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
            if !t.is_empty() {
                upper.insert((a, n + b), t);
            }
        }
    }
    let mut double = GradedLieAlgebra::new(basis.clone(), upper).expect("valid storage");
    if let Some((lo, hi)) = l.window() {
        double = double.with_window(lo.min(-1 - hi), hi.max(-1 - lo));
    }
    let hp = Subspace::of_basis(&basis, &(0..n).collect::<Vec<_>>());
    let hm = Subspace::of_basis(&basis, &(n..2 * n).collect::<Vec<_>>());
    ManinTriple::from_pair(double, metric, hp, hm).expect("canonical pairing is invertible")
}

/// Metric, Lagrangian pair and Jacobi checks on a triple.
pub fn check_triple(t: &ManinTriple) -> Report {
    let mut rep = Report::new("triple");
    rep.push(check_jacobi(&t.double));
    rep.extend(check_metric(&t.double, &t.metric));
    rep.extend(check_lagrangian_pair(&t.double, &t.metric, &t.h_plus, &t.h_minus));
    let mut matched = true;
    for (a, x) in t.h_plus.span.iter().enumerate() {
        for (b, y) in t.h_minus.span.iter().enumerate() {
            let v = t.metric.pair(x, y);
            if v != if a == b { Rational::one() } else { Rational::zero() } {
                matched = false;
            }
        }
    }
    rep.push(if matched {
        Check::pass("dual_matching", t.h_plus.dim())
    } else {
        Check::fail("dual_matching", "κ(x_a, ε^b) ≠ δ_ab")
    });
    rep
}

/// The two projected Jacobi identities for ▷ and ◁, and the coadjoint
/// description of ▷ against κ.
pub fn verify_prop_delta(t: &ManinTriple) -> Report {
    let mut rep = Report::new("prop_delta");
    let g = &t.double;
    let hp = &t.h_plus.span;
    let hm = &t.h_minus.span;
    let br = |x: &SparseTensor, y: &SparseTensor| g.bracket_tracked(x, y).expect("same basis");
    let tri = |x: &SparseTensor, y: &SparseTensor| -> (SparseTensor, SparseTensor, bool) {
        let (b, of) = br(x, y);
        (t.project(Side::Minus, &b), t.project(Side::Plus, &b), of)
    };
    let dgv = |v: &SparseTensor| -> i64 { vector_degree_weight(v).map(|p| p.0).unwrap_or(0) };

    // X ▷ [Z,W] = [X▷Z, W] + (X◁Z)▷W − (−1)^{|Z||W|}([X▷W, Z] + (X◁W)▷Z)
    let (mut checked, mut boundary) = (0, 0);
    let mut failure = None;
    'outer: for x in hp {
        for z in hm {
            for w in hm {
                let (zw, o1) = br(z, w);
                let (lhs, _, o2) = tri(x, &zw);
                let (xz_r, xz_l, o3) = tri(x, z);
                let (xw_r, xw_l, o4) = tri(x, w);
                let (a1, o5) = br(&xz_r, w);
                let (a2, _, o6) = tri(&xz_l, w);
                let (b1, o7) = br(&xw_r, z);
                let (b2, _, o8) = tri(&xw_l, z);
                if o1 || o2 || o3 || o4 || o5 || o6 || o7 || o8 {
                    boundary += 1;
                    continue;
                }
                checked += 1;
                let s = parity_sign(is_odd(dgv(z) * dgv(w)));
                let rhs = a1.add(&a2).sub(&b1.add(&b2).scale(&s));
                if lhs != rhs {
                    failure = Some(format!(
                        "X={}, Z={}, W={}: {} vs {}",
                        x.pretty(),
                        z.pretty(),
                        w.pretty(),
                        lhs.pretty(),
                        rhs.pretty()
                    ));
                    break 'outer;
                }
            }
        }
    }
    rep.push(match failure {
        Some(w) => Check::fail("triangle_left", w),
        None => Check::pass("triangle_left", checked).with_boundary(boundary),
    });

    // Z ◁ [X,Y] = (Z◁X)◁Y − (−1)^{|X||Y|} (Z◁Y)◁X, Z ∈ h₊, X, Y ∈ h₋
    let (mut checked, mut boundary) = (0, 0);
    let mut failure = None;
    'outer2: for z in hp {
        for x in hm {
            for y in hm {
                let (xy, o1) = br(x, y);
                let (_, lhs, o2) = tri(z, &xy);
                let (_, zx, o3) = tri(z, x);
                let (_, zxy, o4) = tri(&zx, y);
                let (_, zy, o5) = tri(z, y);
                let (_, zyx, o6) = tri(&zy, x);
                if o1 || o2 || o3 || o4 || o5 || o6 {
                    boundary += 1;
                    continue;
                }
                checked += 1;
                let rhs = zxy.sub(&zyx.scale(&parity_sign(is_odd(dgv(x) * dgv(y)))));
                if lhs != rhs {
                    failure = Some(format!(
                        "Z={}, X={}, Y={}: {} vs {}",
                        z.pretty(),
                        x.pretty(),
                        y.pretty(),
                        lhs.pretty(),
                        rhs.pretty()
                    ));
                    break 'outer2;
                }
            }
        }
    }
    rep.push(match failure {
        Some(w) => Check::fail("triangle_right", w),
        None => Check::pass("triangle_right", checked).with_boundary(boundary),
    });

    // κ(Y, [X', X]) = (−1)^{|X|} κ(X▷Y, X')
    let (mut checked, mut boundary) = (0, 0);
    let mut failure = None;
    'outer3: for x in hp {
        for y in hm {
            let (xy, _, o1) = tri(x, y);
            for xp in hp {
                let (xpx, o2) = br(xp, x);
                if o1 || o2 {
                    boundary += 1;
                    continue;
                }
                checked += 1;
                let lhs = t.metric.pair(y, &xpx);
                let rhs = t.metric.pair(&xy, xp) * parity_sign(is_odd(dgv(x)));
                if lhs != rhs {
                    failure = Some(format!(
                        "X={}, Y={}, X'={}: {} vs {}",
                        x.pretty(),
                        y.pretty(),
                        xp.pretty(),
                        fmt_rational(&lhs),
                        fmt_rational(&rhs)
                    ));
                    break 'outer3;
                }
            }
        }
    }
    rep.push(match failure {
        Some(w) => Check::fail("coadjoint_triangle", w),
        None => Check::pass("coadjoint_triangle", checked).with_boundary(boundary),
    });
    rep
}

/// Whether two cobrackets agree entry for entry (bases compared by shape).
pub fn same_cobracket(a: &Cobracket, b: &Cobracket) -> bool {
    a.delta.len() == b.delta.len() && a.delta.iter().zip(&b.delta).all(|(x, y)| x.entries() == y.entries())
}
