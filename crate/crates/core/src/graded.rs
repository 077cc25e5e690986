//! ℤ-graded bases, the Koszul sign engine and sparse tensors of small arity.
//!
//! Slots are 0-based throughout. A tensor entry `[i, j]` stands for
//! `v_i ⊗ v_j`; moving homogeneous factors past each other costs
//! `(−1)^{|v||w|}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::{fmt_rational, HbarPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("expected arity {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("permutation of length {perm} does not match {degrees} degrees")]
    LengthMismatch { perm: usize, degrees: usize },
    #[error("not a permutation: {0:?}")]
    NotPermutation(Vec<usize>),
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("tensors live over different bases")]
    BasisMismatch,
    #[error("index {0} is not a basis vector")]
    BadIndex(usize),
    #[error("entry {0:?} has degree {1}, declared homogeneous degree {2}")]
    Inhomogeneous(Vec<usize>, i64, i64),
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisVector {
    pub id: usize,
    pub label: String,
    pub degree: i64,
    /// Power of the loop variable t carried by this vector; zero outside loop algebras.
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    vectors: Vec<BasisVector>,
    index: HashMap<String, usize>,
}

impl GradedBasis {
    pub fn new(entries: Vec<(String, i64)>) -> Result<Self, GradedError> {
        Self::with_weights(entries.into_iter().map(|(l, d)| (l, d, 0)).collect())
    }

    pub fn with_weights(entries: Vec<(String, i64, i64)>) -> Result<Self, GradedError> {
        let mut index = HashMap::new();
        let mut vectors = Vec::new();
        for (id, (label, degree, weight)) in entries.into_iter().enumerate() {
            if index.insert(label.clone(), id).is_some() {
                return Err(GradedError::DuplicateLabel(label));
            }
            vectors.push(BasisVector { id, label, degree, weight });
        }
        Ok(GradedBasis { vectors, index })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[BasisVector] {
        &self.vectors
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.vectors[i].degree
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.vectors[i].weight
    }

    pub fn label(&self, i: usize) -> &str {
        &self.vectors[i].label
    }

    pub fn lookup(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// Sign of permuting homogeneous factors. Output slot `i` receives input
/// slot `perm[i]`; each inverted pair contributes `(−1)^{deg·deg}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i32, GradedError> {
    if perm.len() != degrees.len() {
        return Err(GradedError::LengthMismatch { perm: perm.len(), degrees: degrees.len() });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(GradedError::NotPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(koszul_sign_unchecked(perm, degrees))
}

pub(crate) fn koszul_sign_unchecked(perm: &[usize], degrees: &[i64]) -> i32 {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && (degrees[perm[i]] * degrees[perm[j]]).rem_euclid(2) == 1 {
                odd = !odd;
            }
        }
    }
    if odd {
        -1
    } else {
        1
    }
}

pub fn parity_sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

pub fn is_odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Coefficient ring of a sparse tensor.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn scale(&self, r: &Rational) -> Self;
    fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }
}

impl Coeff for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Coeff for HbarPoly {
    fn is_zero(&self) -> bool {
        HbarPoly::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        HbarPoly::add_assign(self, o)
    }
    fn scale(&self, r: &Rational) -> Self {
        HbarPoly::scale(self, r)
    }
}

#[derive(Clone, PartialEq)]
pub struct SparseTensor<C: Coeff = Rational> {
    arity: usize,
    basis: Arc<GradedBasis>,
    entries: BTreeMap<Vec<usize>, C>,
    homogeneous_degree: Option<i64>,
}

impl<C: Coeff> fmt::Debug for SparseTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<C: Coeff> fmt::Display for SparseTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(idx, c)| {
                let word: Vec<&str> = idx.iter().map(|&i| self.basis.label(i)).collect();
                format!("({c}) {}", word.join("⊗"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coeff> SparseTensor<C> {
    pub fn zero(arity: usize, basis: Arc<GradedBasis>) -> Self {
        SparseTensor { arity, basis, entries: BTreeMap::new(), homogeneous_degree: None }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, C> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &C)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> Option<&C> {
        self.entries.get(idx)
    }

    pub fn homogeneous_degree(&self) -> Option<i64> {
        self.homogeneous_degree
    }

    /// Declares a common total degree and checks every entry against it.
    pub fn with_homogeneous_degree(mut self, d: i64) -> Result<Self, GradedError> {
        for idx in self.entries.keys() {
            let e = self.entry_degree(idx);
            if e != d {
                return Err(GradedError::Inhomogeneous(idx.clone(), e, d));
            }
        }
        self.homogeneous_degree = Some(d);
        Ok(self)
    }

    pub fn entry_degree(&self, idx: &[usize]) -> i64 {
        idx.iter().map(|&i| self.basis.degree(i)).sum()
    }

    pub fn same_basis(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.basis, &o.basis) || *self.basis == *o.basis
    }

    pub fn add_term(&mut self, idx: Vec<usize>, c: C) {
        assert_eq!(idx.len(), self.arity, "index tuple length differs from arity");
        assert!(idx.iter().all(|&i| i < self.basis.len()), "index out of basis range");
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&idx) {
            Some(e) => {
                e.add_assign(&c);
                if e.is_zero() {
                    self.entries.remove(&idx);
                }
            }
            None => {
                self.entries.insert(idx, c);
            }
        }
    }

    pub fn try_add_term(&mut self, idx: Vec<usize>, c: C) -> Result<(), GradedError> {
        if idx.len() != self.arity {
            return Err(GradedError::Arity { expected: self.arity, got: idx.len() });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.basis.len()) {
            return Err(GradedError::BadIndex(bad));
        }
        self.add_term(idx, c);
        Ok(())
    }

    pub fn add_scaled(&mut self, o: &Self, r: &Rational) {
        assert_eq!(self.arity, o.arity);
        for (idx, c) in &o.entries {
            self.add_term(idx.clone(), c.scale(r));
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, GradedError> {
        if !self.same_basis(o) {
            return Err(GradedError::BasisMismatch);
        }
        if self.arity != o.arity {
            return Err(GradedError::Arity { expected: self.arity, got: o.arity });
        }
        let mut out = self.clone();
        out.homogeneous_degree = None;
        out.add_scaled(o, &Rational::one());
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible tensors")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.arity, self.basis.clone());
        for (idx, c) in &self.entries {
            out.add_term(idx.clone(), c.scale(r));
        }
        out.homogeneous_degree = self.homogeneous_degree;
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Output slot `i` receives input slot `perm[i]`, with the Koszul sign.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, GradedError> {
        if perm.len() != self.arity {
            return Err(GradedError::LengthMismatch { perm: perm.len(), degrees: self.arity });
        }
        let mut out = Self::zero(self.arity, self.basis.clone());
        for (idx, c) in &self.entries {
            let degs: Vec<i64> = idx.iter().map(|&i| self.basis.degree(i)).collect();
            let s = koszul_sign(perm, &degs)?;
            let new: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            out.add_term(new, if s < 0 { c.neg() } else { c.clone() });
        }
        out.homogeneous_degree = self.homogeneous_degree;
        Ok(out)
    }

    /// The braiding σ(v⊗w) = (−1)^{|v||w|} w⊗v.
    pub fn braid(&self) -> Result<Self, GradedError> {
        if self.arity != 2 {
            return Err(GradedError::Arity { expected: 2, got: self.arity });
        }
        self.permute(&[1, 0])
    }

    /// True iff σt = t.
    pub fn sym2_check(&self) -> bool {
        match self.braid() {
            Ok(b) => b == *self,
            Err(_) => false,
        }
    }

    /// Sum over all permutations with Koszul signs (no 1/n! factor).
    pub fn symmetrize_sum(&self) -> Self {
        let mut out = Self::zero(self.arity, self.basis.clone());
        for p in permutations(self.arity) {
            out = out.add(&self.permute(&p).expect("valid permutation"));
        }
        out
    }

    /// Outer product a⊗b (no sign: factors stay in order).
    pub fn tensor(&self, o: &SparseTensor<Rational>) -> Self {
        let mut out = Self::zero(self.arity + o.arity, self.basis.clone());
        for (ia, ca) in &self.entries {
            for (ib, cb) in &o.entries {
                let mut idx = ia.clone();
                idx.extend(ib);
                out.add_term(idx, ca.scale(cb));
            }
        }
        out
    }

    /// Evaluates the bilinear form `pairing` between slot `slot` of `self`
    /// and `arg`. The argument is first moved from the far right to sit just
    /// after the slot, costing `(−1)^{|arg|·Σ_{j>slot}|v_j|}`.
    pub fn contract(
        &self,
        pairing: &SparseTensor<Rational>,
        slot: usize,
        arg: &SparseTensor<Rational>,
    ) -> Result<Self, GradedError> {
        if slot >= self.arity {
            return Err(GradedError::SlotOutOfRange { slot, arity: self.arity });
        }
        if pairing.arity != 2 {
            return Err(GradedError::Arity { expected: 2, got: pairing.arity });
        }
        if arg.arity != 1 {
            return Err(GradedError::Arity { expected: 1, got: arg.arity });
        }
        let mut out = Self::zero(self.arity - 1, self.basis.clone());
        for (idx, c) in &self.entries {
            let after: i64 = idx[slot + 1..].iter().map(|&i| self.basis.degree(i)).sum();
            for (aidx, ac) in &arg.entries {
                let b = aidx[0];
                let Some(k) = pairing.get(&[idx[slot], b]) else { continue };
                let sign = parity_sign(is_odd(after * arg.basis.degree(b)));
                let mut rest = idx.clone();
                rest.remove(slot);
                out.add_term(rest, c.scale(&(k * ac * sign)));
            }
        }
        Ok(out)
    }
}

impl SparseTensor<Rational> {
    /// The basis vector v_i as an arity-1 tensor.
    pub fn basis_vector(basis: Arc<GradedBasis>, i: usize) -> Self {
        let mut t = Self::zero(1, basis);
        t.add_term(vec![i], Rational::one());
        t
    }

    pub fn from_entries(
        arity: usize,
        basis: Arc<GradedBasis>,
        entries: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Self {
        let mut t = Self::zero(arity, basis);
        for (i, c) in entries {
            t.add_term(i, c);
        }
        t
    }

    /// Dense coefficient vector of an arity-1 tensor.
    pub fn to_dense(&self) -> Vec<Rational> {
        assert_eq!(self.arity, 1);
        let mut v = vec![Rational::zero(); self.basis.len()];
        for (idx, c) in &self.entries {
            v[idx[0]] = c.clone();
        }
        v
    }

    pub fn from_dense(basis: Arc<GradedBasis>, v: &[Rational]) -> Self {
        Self::from_entries(1, basis, v.iter().enumerate().map(|(i, c)| (vec![i], c.clone())))
    }

    pub fn coeff(&self, idx: &[usize]) -> Rational {
        self.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    /// Human-readable form with "p/q" coefficients.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|(idx, c)| {
                let word: Vec<&str> = idx.iter().map(|&i| self.basis.label(i)).collect();
                format!("{}*{}", fmt_rational(c), word.join("⊗"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;
    use proptest::prelude::*;

    fn basis() -> Arc<GradedBasis> {
        Arc::new(
            GradedBasis::new(vec![("e".into(), 0), ("f".into(), 0), ("ε^e".into(), 1), ("ε^f".into(), 1)]).unwrap(),
        )
    }

    fn kappa(b: &Arc<GradedBasis>) -> SparseTensor {
        SparseTensor::from_entries(
            2,
            b.clone(),
            vec![(vec![0, 2], int(1)), (vec![1, 3], int(1)), (vec![2, 0], int(-1)), (vec![3, 1], int(-1))],
        )
    }

    fn r(b: &Arc<GradedBasis>) -> SparseTensor {
        SparseTensor::from_entries(2, b.clone(), vec![(vec![0, 2], int(1)), (vec![1, 3], int(1))])
    }

    #[test]
    fn koszul_sign_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&[1, 0], &[0, 1]).unwrap(), 1);
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]).unwrap(), 1);
        assert!(koszul_sign(&[0, 1], &[1]).is_err());
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
        assert_eq!(koszul_sign(&[1, 0], &[-1, 3]).unwrap(), -1);
    }

    #[test]
    fn braid_examples() {
        let b = basis();
        let t = SparseTensor::from_entries(2, b.clone(), vec![(vec![0, 2], int(1))]);
        assert_eq!(t.braid().unwrap(), SparseTensor::from_entries(2, b.clone(), vec![(vec![2, 0], int(1))]));
        let u = SparseTensor::from_entries(2, b.clone(), vec![(vec![2, 3], int(1))]);
        assert_eq!(u.braid().unwrap(), SparseTensor::from_entries(2, b.clone(), vec![(vec![3, 2], int(-1))]));
        assert!(SparseTensor::basis_vector(b, 0).braid().is_err());
    }

    #[test]
    fn sym2_examples() {
        let b = basis();
        let s = SparseTensor::from_entries(2, b.clone(), vec![(vec![0, 1], int(1)), (vec![1, 0], int(1))]);
        assert!(s.sym2_check());
        assert!(!SparseTensor::from_entries(2, b.clone(), vec![(vec![2, 2], int(1))]).sym2_check());
        assert!(SparseTensor::<Rational>::zero(2, b).sym2_check());
    }

    #[test]
    fn contraction_identities() {
        let b = basis();
        let k = kappa(&b);
        let rr = r(&b);
        for x in 0..2 {
            let xv = SparseTensor::basis_vector(b.clone(), x);
            assert_eq!(rr.contract(&k, 1, &xv).unwrap(), xv.neg());
        }
        for y in 2..4 {
            let yv = SparseTensor::basis_vector(b.clone(), y);
            // (−1)^{|Y|} Y with |Y| = 1
            assert_eq!(rr.contract(&k, 0, &yv).unwrap(), yv.neg());
        }
        let z = SparseTensor::<Rational>::zero(2, b.clone());
        assert!(z.contract(&k, 0, &SparseTensor::basis_vector(b.clone(), 0)).unwrap().is_zero());
        assert!(rr.contract(&k, 2, &SparseTensor::basis_vector(b, 0)).is_err());
    }

    #[test]
    fn homogeneous_degree_checked() {
        let b = basis();
        assert!(r(&b).with_homogeneous_degree(1).is_ok());
        let mixed = SparseTensor::from_entries(2, b.clone(), vec![(vec![0, 2], int(1)), (vec![0, 0], int(1))]);
        assert!(mixed.with_homogeneous_degree(1).is_err());
    }

    #[test]
    fn koszul_sign_is_multiplicative() {
        for p in permutations(3) {
            for q in permutations(3) {
                for mask in 0..8 {
                    let deg: Vec<i64> = (0..3).map(|i| (mask >> i) & 1).collect();
                    let dq: Vec<i64> = q.iter().map(|&i| deg[i]).collect();
                    let r: Vec<usize> = p.iter().map(|&i| q[i]).collect();
                    let lhs = koszul_sign(&r, &deg).unwrap();
                    let rhs = koszul_sign(&p, &dq).unwrap() * koszul_sign(&q, &deg).unwrap();
                    assert_eq!(lhs, rhs, "p={p:?} q={q:?} deg={deg:?}");
                }
            }
        }
    }

    fn random_tensor() -> impl Strategy<Value = SparseTensor> {
        proptest::collection::vec(((0usize..4, 0usize..4), -5i64..5), 0..8)
            .prop_map(|v| SparseTensor::from_entries(2, basis(), v.into_iter().map(|((i, j), c)| (vec![i, j], int(c)))))
    }

    proptest! {
        #[test]
        fn braid_is_involution(t in random_tensor()) {
            prop_assert_eq!(t.braid().unwrap().braid().unwrap(), t);
        }

        #[test]
        fn symmetrization_lands_in_sym2(t in random_tensor()) {
            prop_assert!(t.add(&t.braid().unwrap()).sym2_check());
        }
    }
}
