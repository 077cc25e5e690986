//! Graded Lie algebras given by structure constants, degree-1 invariant
//! antisymmetric pairings, Lagrangian subspaces and their verification.
//!
//! Structure constants are stored for `a < b`, and for `a == b` when `|a|` is
//! odd; the other triangle follows from `f_ba^c = −(−1)^{|a||b|} f_ab^c`.
//! An algebra may carry a loop-weight window: a bracket whose weight sum
//! falls outside it is not representable, evaluates to zero and is flagged.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::linalg::Matrix;
use crate::exactnum::{fmt_rational, Rational};
use crate::graded::{is_odd, parity_sign, GradedBasis, SparseTensor};
use crate::report::{Check, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("bracket entry ({0},{1}) must be stored with first index < second (or equal and odd)")]
    Storage(usize, usize),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error("degenerate pairing: radical vector {0}")]
    Degenerate(String),
    #[error("bracket [{0}, {1}] escapes the subspace")]
    NotSubalgebra(String, String),
    #[error("tensor over a different basis")]
    BasisMismatch,
}

pub type Terms = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedLieAlgebra {
    basis: Arc<GradedBasis>,
    f: BTreeMap<(usize, usize), Terms>,
    window: Option<(i64, i64)>,
}

/// Bracket table as supplied by a user, possibly listing both orders.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawBrackets {
    pub entries: Vec<(usize, usize, Terms)>,
}

fn clean(terms: &Terms) -> Terms {
    let mut m: BTreeMap<usize, Rational> = BTreeMap::new();
    for (c, v) in terms {
        *m.entry(*c).or_insert_with(Rational::zero) += v;
    }
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

impl GradedLieAlgebra {
    /// Builds from upper-triangle entries (a < b, or a == b with |a| odd).
    pub fn new(basis: Arc<GradedBasis>, upper: BTreeMap<(usize, usize), Terms>) -> Result<Self, LieError> {
        let mut f = BTreeMap::new();
        for ((a, b), t) in upper {
            if a >= basis.len() || b >= basis.len() {
                return Err(LieError::BadIndex(a.max(b)));
            }
            if let Some((c, _)) = t.iter().find(|(c, _)| *c >= basis.len()) {
                return Err(LieError::BadIndex(*c));
            }
            if a > b || (a == b && !is_odd(basis.degree(a))) {
                return Err(LieError::Storage(a, b));
            }
            let t = clean(&t);
            if !t.is_empty() {
                f.insert((a, b), t);
            }
        }
        Ok(GradedLieAlgebra { basis, f, window: None })
    }

    pub fn abelian(basis: Arc<GradedBasis>) -> Self {
        GradedLieAlgebra { basis, f: BTreeMap::new(), window: None }
    }

    /// Builds from a raw table: the stored triangle wins; lower entries are
    /// used only when the upper one is absent. Even self-brackets are dropped
    /// (and reported by [`check_antisymmetry`]).
    pub fn from_raw(basis: Arc<GradedBasis>, raw: &RawBrackets) -> Result<Self, LieError> {
        let mut upper: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
        let mut lower: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
        for (a, b, t) in &raw.entries {
            let (a, b) = (*a, *b);
            if a >= basis.len() || b >= basis.len() {
                return Err(LieError::BadIndex(a.max(b)));
            }
            if a < b || (a == b && is_odd(basis.degree(a))) {
                upper.entry((a, b)).or_default().extend(t.iter().cloned());
            } else if a > b {
                let s = -parity_sign(is_odd(basis.degree(a) * basis.degree(b)));
                lower.entry((b, a)).or_default().extend(t.iter().map(|(c, v)| (*c, v * &s)));
            }
        }
        for (k, t) in lower {
            upper.entry(k).or_insert(t);
        }
        Self::new(basis, upper)
    }

    pub fn with_window(mut self, lo: i64, hi: i64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        self.window
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, a: usize) -> i64 {
        self.basis.degree(a)
    }

    pub fn upper_table(&self) -> &BTreeMap<(usize, usize), Terms> {
        &self.f
    }

    pub fn is_abelian(&self) -> bool {
        self.f.is_empty()
    }

    /// Whether [x_a, x_b] leaves the weight window.
    pub fn overflows(&self, a: usize, b: usize) -> bool {
        match self.window {
            None => false,
            Some((lo, hi)) => {
                let w = self.basis.weight(a) + self.basis.weight(b);
                w < lo || w > hi
            }
        }
    }

    /// [x_a, x_b] as a list of (c, f_ab^c).
    pub fn bracket_basis(&self, a: usize, b: usize) -> Terms {
        if a < b || (a == b && is_odd(self.degree(a))) {
            self.f.get(&(a, b)).cloned().unwrap_or_default()
        } else if a == b {
            Vec::new()
        } else {
            let s = -parity_sign(is_odd(self.degree(a) * self.degree(b)));
            self.f.get(&(b, a)).map(|t| t.iter().map(|(c, v)| (*c, v * &s)).collect()).unwrap_or_default()
        }
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> Rational {
        self.bracket_basis(a, b).into_iter().find(|(k, _)| *k == c).map(|(_, v)| v).unwrap_or_else(Rational::zero)
    }

    pub fn vector(&self, a: usize) -> SparseTensor {
        SparseTensor::basis_vector(self.basis.clone(), a)
    }

    /// Bilinear bracket plus a flag recording whether any contributing basis
    /// bracket left the window.
    pub fn bracket_tracked(&self, x: &SparseTensor, y: &SparseTensor) -> Result<(SparseTensor, bool), LieError> {
        if !x.same_basis(&SparseTensor::zero(1, self.basis.clone()))
            || !y.same_basis(&SparseTensor::zero(1, self.basis.clone()))
            || x.arity() != 1
            || y.arity() != 1
        {
            return Err(LieError::BasisMismatch);
        }
        let mut out = SparseTensor::zero(1, self.basis.clone());
        let mut overflow = false;
        for (ia, ca) in x.iter() {
            for (ib, cb) in y.iter() {
                if self.overflows(ia[0], ib[0]) {
                    overflow = true;
                }
                let k = ca * cb;
                for (c, v) in self.bracket_basis(ia[0], ib[0]) {
                    out.add_term(vec![c], v * &k);
                }
            }
        }
        Ok((out, overflow))
    }

    pub fn bracket(&self, x: &SparseTensor, y: &SparseTensor) -> Result<SparseTensor, LieError> {
        Ok(self.bracket_tracked(x, y)?.0)
    }

    /// Bracket of basis vectors as a tensor, with overflow flag.
    pub fn bracket_vec(&self, a: usize, b: usize) -> (SparseTensor, bool) {
        let mut out = SparseTensor::zero(1, self.basis.clone());
        for (c, v) in self.bracket_basis(a, b) {
            out.add_term(vec![c], v);
        }
        (out, self.overflows(a, b))
    }

    /// Returns a copy with one upper-triangle structure constant replaced.
    pub fn with_constant(&self, a: usize, b: usize, c: usize, v: Rational) -> Self {
        let mut out = self.clone();
        let e = out.f.entry((a, b)).or_default();
        e.retain(|(k, _)| *k != c);
        if !v.is_zero() {
            e.push((c, v));
            e.sort_by_key(|(k, _)| *k);
        }
        if e.is_empty() {
            out.f.remove(&(a, b));
        }
        out
    }
}

fn fmt_terms(basis: &GradedBasis, t: &Terms) -> String {
    if t.is_empty() {
        return "0".into();
    }
    t.iter().map(|(c, v)| format!("{}*{}", fmt_rational(v), basis.label(*c))).collect::<Vec<_>>().join(" + ")
}

/// Graded antisymmetry and degree preservation of a raw bracket table.
pub fn check_antisymmetry(basis: &GradedBasis, raw: &RawBrackets) -> Check {
    let mut table: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
    for (a, b, t) in &raw.entries {
        table.entry((*a, *b)).or_default().extend(t.iter().cloned());
    }
    let table: BTreeMap<(usize, usize), Terms> = table.into_iter().map(|(k, t)| (k, clean(&t))).collect();
    let mut n = 0;
    for (&(a, b), t) in &table {
        n += 1;
        for (c, _) in t {
            if basis.degree(*c) != basis.degree(a) + basis.degree(b) {
                return Check::fail(
                    "degree",
                    format!(
                        "[{}, {}] has a {} component of the wrong degree",
                        basis.label(a),
                        basis.label(b),
                        basis.label(*c)
                    ),
                );
            }
        }
        let s = -parity_sign(is_odd(basis.degree(a) * basis.degree(b)));
        if a == b {
            if !is_odd(basis.degree(a)) && !t.is_empty() {
                return Check::fail(
                    "antisymmetry",
                    format!("[{0}, {0}] = {1} for even {0}", basis.label(a), fmt_terms(basis, t)),
                );
            }
            continue;
        }
        if let Some(other) = table.get(&(b, a)) {
            let expect: Terms = t.iter().map(|(c, v)| (*c, v * &s)).collect();
            if clean(&expect) != *other {
                return Check::fail(
                    "antisymmetry",
                    format!(
                        "[{0}, {1}] = {2} but [{1}, {0}] = {3}",
                        basis.label(a),
                        basis.label(b),
                        fmt_terms(basis, t),
                        fmt_terms(basis, other)
                    ),
                );
            }
        }
    }
    Check::pass("antisymmetry", n)
}

/// Degree preservation of stored structure constants.
pub fn check_degrees(l: &GradedLieAlgebra) -> Check {
    for (&(a, b), t) in &l.f {
        for (c, _) in t {
            if l.degree(*c) != l.degree(a) + l.degree(b) {
                return Check::fail(
                    "degree",
                    format!(
                        "f_{{{},{}}}^{{{}}} ≠ 0 but degrees do not add",
                        l.basis.label(a),
                        l.basis.label(b),
                        l.basis.label(*c)
                    ),
                );
            }
        }
    }
    Check::pass("degree", l.f.len())
}

/// Graded Jacobi identity
/// (−1)^{|z||x|}[[z,w],x] + (−1)^{|z||w|}[[w,x],z] + (−1)^{|w||x|}[[x,z],w] = 0
/// over all ordered basis triples; triples touching the window edge are
/// counted as boundary.
pub fn check_jacobi(l: &GradedLieAlgebra) -> Check {
    let n = l.dim();
    let mut checked = 0;
    let mut boundary = 0;
    for z in 0..n {
        for w in 0..n {
            for x in 0..n {
                let (res, of) = jacobi_residual(l, z, w, x);
                if of {
                    boundary += 1;
                    continue;
                }
                checked += 1;
                if !res.is_zero() {
                    return Check::fail(
                        "jacobi",
                        format!(
                            "triple ({}, {}, {}) residual {}",
                            l.basis.label(z),
                            l.basis.label(w),
                            l.basis.label(x),
                            res.pretty()
                        ),
                    );
                }
            }
        }
    }
    Check::pass("jacobi", checked).with_boundary(boundary)
}

pub fn jacobi_residual(l: &GradedLieAlgebra, z: usize, w: usize, x: usize) -> (SparseTensor, bool) {
    let d = |i| l.degree(i);
    let mut res = SparseTensor::zero(1, l.basis.clone());
    let mut of = false;
    for (p, q, r, s) in [(z, w, x, d(z) * d(x)), (w, x, z, d(z) * d(w)), (x, z, w, d(w) * d(x))] {
        let (pq, o1) = l.bracket_vec(p, q);
        let (t, o2) = l.bracket_tracked(&pq, &l.vector(r)).expect("same basis");
        of |= o1 || o2;
        res.add_scaled(&t, &parity_sign(is_odd(s)));
    }
    (res, of)
}

/// Degree-1 antisymmetric pairing κ.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMetric {
    kappa: BTreeMap<(usize, usize), Rational>,
}

impl ShiftedMetric {
    pub fn new(entries: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut kappa = BTreeMap::new();
        for (k, v) in entries {
            if !v.is_zero() {
                kappa.insert(k, v);
            }
        }
        ShiftedMetric { kappa }
    }

    /// Fills in κ_ba = −κ_ab for every supplied κ_ab.
    pub fn antisymmetric(entries: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut m = BTreeMap::new();
        for ((a, b), v) in entries {
            if v.is_zero() {
                continue;
            }
            m.insert((b, a), -v.clone());
            m.insert((a, b), v);
        }
        ShiftedMetric { kappa: m }
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.kappa
    }

    pub fn get(&self, a: usize, b: usize) -> Rational {
        self.kappa.get(&(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn pair(&self, x: &SparseTensor, y: &SparseTensor) -> Rational {
        let mut acc = Rational::zero();
        for (ia, ca) in x.iter() {
            for (ib, cb) in y.iter() {
                if let Some(k) = self.kappa.get(&(ia[0], ib[0])) {
                    acc += k * ca * cb;
                }
            }
        }
        acc
    }

    pub fn as_tensor(&self, basis: Arc<GradedBasis>) -> SparseTensor {
        SparseTensor::from_entries(2, basis, self.kappa.iter().map(|(&(a, b), v)| (vec![a, b], v.clone())))
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for (&(a, b), v) in &self.kappa {
            m.set(a, b, v.clone());
        }
        m
    }

    pub fn with_entry(&self, a: usize, b: usize, v: Rational) -> Self {
        let mut out = self.clone();
        if v.is_zero() {
            out.kappa.remove(&(a, b));
        } else {
            out.kappa.insert((a, b), v);
        }
        out
    }
}

/// Degree-1 support, antisymmetry, invariance and nondegeneracy of κ.
pub fn check_metric(l: &GradedLieAlgebra, k: &ShiftedMetric) -> Report {
    let mut rep = Report::new("metric");
    let b = l.basis();
    // degree support
    let bad = k.kappa.keys().find(|(x, y)| b.degree(*x) + b.degree(*y) != 1);
    rep.push(match bad {
        Some((x, y)) => Check::fail(
            "degree",
            format!("κ({}, {}) ≠ 0 with degrees summing to {}", b.label(*x), b.label(*y), b.degree(*x) + b.degree(*y)),
        ),
        None => Check::pass("degree", k.kappa.len()),
    });
    // antisymmetry
    let bad = k.kappa.iter().find(|(&(x, y), v)| k.get(y, x) != -(*v).clone());
    rep.push(match bad {
        Some((&(x, y), v)) => Check::fail(
            "antisymmetry",
            format!(
                "κ({0}, {1}) = {2} but κ({1}, {0}) = {3}",
                b.label(x),
                b.label(y),
                fmt_rational(v),
                fmt_rational(&k.get(y, x))
            ),
        ),
        None => Check::pass("antisymmetry", k.kappa.len()),
    });
    rep.push(check_invariance(l, k));
    rep.push(check_nondegenerate(l, k));
    rep
}

/// κ([y,x],z) = (−1)^{|x|} κ(y,[x,z]) for all basis triples.
pub fn check_invariance(l: &GradedLieAlgebra, k: &ShiftedMetric) -> Check {
    let n = l.dim();
    let mut checked = 0;
    let mut boundary = 0;
    for y in 0..n {
        for x in 0..n {
            let (yx, o1) = l.bracket_vec(y, x);
            for z in 0..n {
                let (xz, o2) = l.bracket_vec(x, z);
                if o1 || o2 {
                    boundary += 1;
                    continue;
                }
                checked += 1;
                let lhs = k.pair(&yx, &l.vector(z));
                let rhs = k.pair(&l.vector(y), &xz) * parity_sign(is_odd(l.degree(x)));
                if lhs != rhs {
                    let bl = l.basis();
                    return Check::fail(
                        "invariance",
                        format!(
                            "y={}, x={}, z={}: κ([y,x],z) = {} vs (−1)^|x| κ(y,[x,z]) = {}",
                            bl.label(y),
                            bl.label(x),
                            bl.label(z),
                            fmt_rational(&lhs),
                            fmt_rational(&rhs)
                        ),
                    );
                }
            }
        }
    }
    Check::pass("invariance", checked).with_boundary(boundary)
}

/// Each block g_n × g_{1−n} must be square and invertible.
pub fn check_nondegenerate(l: &GradedLieAlgebra, k: &ShiftedMetric) -> Check {
    match radical_vector(l, k) {
        None => Check::pass("nondegeneracy", l.dim()),
        Some(v) => Check::fail("nondegeneracy", format!("radical vector {}", v.pretty())),
    }
}

fn radical_vector(l: &GradedLieAlgebra, k: &ShiftedMetric) -> Option<SparseTensor> {
    let b = l.basis();
    let m = k.matrix(l.dim());
    let kern = m.kernel();
    kern.into_iter().next().map(|v| SparseTensor::from_dense(b.clone(), &v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub span: Vec<SparseTensor>,
}

impl Subspace {
    pub fn new(span: Vec<SparseTensor>) -> Self {
        Subspace { span }
    }

    pub fn of_basis(basis: &Arc<GradedBasis>, idx: &[usize]) -> Self {
        Subspace { span: idx.iter().map(|&i| SparseTensor::basis_vector(basis.clone(), i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        Matrix::from_rows(
            self.span
                .iter()
                .map(|v| {
                    let mut row = vec![Rational::zero(); n];
                    for (i, c) in v.iter() {
                        row[i[0]] = c.clone();
                    }
                    row
                })
                .collect(),
        )
    }

    pub fn rank(&self, n: usize) -> usize {
        if self.span.is_empty() {
            0
        } else {
            self.matrix(n).rank()
        }
    }

    pub fn contains(&self, v: &SparseTensor, n: usize) -> bool {
        if v.is_zero() {
            return true;
        }
        let mut s = self.clone();
        s.span.push(v.clone());
        s.rank(n) == self.rank(n)
    }
}

pub fn orthogonal_complement(s: &Subspace, k: &ShiftedMetric, l: &GradedLieAlgebra) -> Result<Subspace, LieError> {
    if let Some(v) = radical_vector(l, k) {
        return Err(LieError::Degenerate(v.pretty()));
    }
    let n = l.dim();
    if s.span.is_empty() {
        return Ok(Subspace::of_basis(l.basis(), &(0..n).collect::<Vec<_>>()));
    }
    let rows: Vec<Vec<Rational>> = s.span.iter().map(|v| (0..n).map(|c| k.pair(v, &l.vector(c))).collect()).collect();
    let kern = Matrix::from_rows(rows).kernel();
    Ok(Subspace::new(kern.iter().map(|v| SparseTensor::from_dense(l.basis().clone(), v)).collect()))
}

fn check_closure(name: &str, l: &GradedLieAlgebra, s: &Subspace) -> Check {
    let n = l.dim();
    let mut checked = 0;
    let mut boundary = 0;
    for (i, x) in s.span.iter().enumerate() {
        for y in &s.span[i..] {
            let (br, of) = l.bracket_tracked(x, y).expect("same basis");
            if of {
                boundary += 1;
                continue;
            }
            checked += 1;
            if !s.contains(&br, n) {
                return Check::fail(
                    name,
                    format!("[{}, {}] = {} leaves the subspace", x.pretty(), y.pretty(), br.pretty()),
                );
            }
        }
    }
    Check::pass(name, checked).with_boundary(boundary)
}

fn check_lagrangian(name: &str, l: &GradedLieAlgebra, k: &ShiftedMetric, s: &Subspace) -> Check {
    let n = l.dim();
    for x in &s.span {
        for y in &s.span {
            let v = k.pair(x, y);
            if !v.is_zero() {
                return Check::fail(name, format!("κ({}, {}) = {}", x.pretty(), y.pretty(), fmt_rational(&v)));
            }
        }
    }
    let r = s.rank(n);
    if r != s.dim() {
        return Check::fail(name, "spanning vectors are linearly dependent");
    }
    if 2 * r != n {
        return Check::fail(
            name,
            format!("isotropic of dimension {r} in a {n}-dimensional space is not its own orthogonal"),
        );
    }
    Check::pass(name, s.dim() * s.dim())
}

pub fn check_lagrangian_pair(l: &GradedLieAlgebra, k: &ShiftedMetric, hp: &Subspace, hm: &Subspace) -> Report {
    let mut rep = Report::new("lagrangian");
    rep.push(check_closure("plus_subalgebra", l, hp));
    rep.push(check_closure("minus_subalgebra", l, hm));
    rep.push(check_lagrangian("plus_lagrangian", l, k, hp));
    rep.push(check_lagrangian("minus_lagrangian", l, k, hm));
    let n = l.dim();
    let mut all = hp.clone();
    all.span.extend(hm.span.iter().cloned());
    rep.push(if all.span.len() == n && all.rank(n) == n {
        Check::pass("transversality", n)
    } else {
        Check::fail("transversality", format!("h₊ + h₋ has rank {} (dimension {} expected)", all.rank(n), n))
    });
    rep
}

/// Degree split: h₊ = ⊕_{n≤0} g_n, h₋ = ⊕_{n≥1} g_n.
pub fn canonical_lagrangians(l: &GradedLieAlgebra) -> Result<(Subspace, Subspace), LieError> {
    let plus: Vec<usize> = (0..l.dim()).filter(|&i| l.degree(i) <= 0).collect();
    let minus: Vec<usize> = (0..l.dim()).filter(|&i| l.degree(i) >= 1).collect();
    for side in [&plus, &minus] {
        for &a in side.iter() {
            for &b in side.iter() {
                for (c, _) in l.bracket_basis(a, b) {
                    if !side.contains(&c) {
                        return Err(LieError::NotSubalgebra(l.basis().label(a).into(), l.basis().label(b).into()));
                    }
                }
            }
        }
    }
    Ok((Subspace::of_basis(l.basis(), &plus), Subspace::of_basis(l.basis(), &minus)))
}

/// Dual basis ε^a with |ε^a| = 1 − |x_a| and weight −1 − w_a.
///
/// A dual label that would clash with a label of `basis` (as when dualizing
/// a double) is primed until it is fresh.
pub fn dual_basis(basis: &GradedBasis) -> Arc<GradedBasis> {
    let mut taken: std::collections::BTreeSet<String> = basis.vectors().iter().map(|v| v.label.clone()).collect();
    let entries = basis
        .vectors()
        .iter()
        .map(|v| {
            let mut label = format!("ε^{}", v.label);
            while taken.contains(&label) {
                label.push('′');
            }
            taken.insert(label.clone());
            (label, 1 - v.degree, -1 - v.weight)
        })
        .collect();
    Arc::new(GradedBasis::with_weights(entries).expect("dual labels are unique"))
}

/// x_a · ε^b = Σ_c f_{ca}^b ε^c, as a tensor over the dual basis.
pub fn coadjoint_action(l: &GradedLieAlgebra, a: usize, b: usize) -> SparseTensor {
    let dual = dual_basis(l.basis());
    let mut out = SparseTensor::zero(1, dual);
    for c in 0..l.dim() {
        let v = l.structure_constant(c, a, b);
        out.add_term(vec![c], v);
    }
    out
}

/// One-line summary of a bracket table, for diagnostics.
pub fn describe(l: &GradedLieAlgebra) -> String {
    let b = l.basis();
    l.f.iter()
        .map(|(&(x, y), t)| format!("[{}, {}] = {}", b.label(x), b.label(y), fmt_terms(b, t)))
        .collect::<Vec<_>>()
        .join("; ")
}
