//! Exact scalars and truncated series: rationals, ħ-truncated polynomials,
//! Laurent polynomials in an auxiliary variable, and polynomials in loop
//! variables t₁, t₂, ...

pub mod linalg;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("exponent {exp} outside window [{lo}, {hi}] of variable {var}")]
    OutOfWindow { var: String, exp: i64, lo: i64, hi: i64 },
    #[error("Laurent variable or window mismatch: {0}")]
    LaurentMismatch(String),
    #[error("negative expansion order {0}")]
    NegativeOrder(i64),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("truncation order must be positive")]
    ZeroOrder,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses "3", "-3/7" or "  2/4 " (normalized to lowest terms).
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let bad = || NumError::Parse(s.to_string());
    match t.split_once('/') {
        None => t.parse::<BigInt>().map(Rational::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// "p/q" or "p" when the denominator is one.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rational_arith(a: &Rational, b: &Rational, op: ArithOp) -> Result<Rational, NumError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            a / b
        }
    })
}

/// (−1)^n as a rational.
pub fn sign_rat(negative: bool) -> Rational {
    if negative {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Binomial coefficient C(n, k) for n ≥ 0.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial C(m, j) for any integer m and j ≥ 0.
pub fn gen_binomial(m: i64, j: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..j {
        acc = acc * int(m - i as i64) / int(i as i64 + 1);
    }
    acc
}

/// Polynomial in ħ truncated at ħ^H.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HbarPoly {
    coeffs: Vec<Rational>,
}

impl HbarPoly {
    pub fn zero(order: usize) -> Self {
        assert!(order > 0, "ħ truncation order must be positive");
        HbarPoly { coeffs: vec![Rational::zero(); order] }
    }

    pub fn try_zero(order: usize) -> Result<Self, NumError> {
        if order == 0 {
            return Err(NumError::ZeroOrder);
        }
        Ok(Self::zero(order))
    }

    pub fn constant(r: Rational, order: usize) -> Self {
        let mut p = Self::zero(order);
        p.coeffs[0] = r;
        p
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// c·ħ^k, which is zero when k ≥ H.
    pub fn monomial(k: usize, c: Rational, order: usize) -> Self {
        let mut p = Self::zero(order);
        if k < order {
            p.coeffs[k] = c;
        }
        p
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order, Rational::zero());
        coeffs.truncate(order);
        HbarPoly { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest ħ-power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn same_order(&self, o: &Self) -> Result<(), NumError> {
        if self.order() != o.order() {
            Err(NumError::OrderMismatch(self.order(), o.order()))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, NumError> {
        self.same_order(o)?;
        Ok(HbarPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, NumError> {
        self.same_order(o)?;
        Ok(HbarPoly { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, NumError> {
        self.same_order(o)?;
        let h = self.order();
        let mut out = Self::zero(h);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(h - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// In-place addition; both operands must share H.
    pub fn add_assign(&mut self, o: &Self) {
        assert_eq!(self.order(), o.order(), "ħ truncation order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("ħ truncation order mismatch")
    }

    pub fn scale(&self, r: &Rational) -> Self {
        HbarPoly { coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn neg(&self) -> Self {
        HbarPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Multiplication by ħ^k.
    pub fn shift(&self, k: usize) -> Self {
        let h = self.order();
        let mut out = Self::zero(h);
        for i in 0..h.saturating_sub(k) {
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Same values, different truncation (drops or zero-pads).
    pub fn retruncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order)
    }
}

impl fmt::Debug for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = fmt_rational(c);
            parts.push(match k {
                0 => s,
                1 => format!("{s}ħ"),
                _ => format!("{s}ħ^{k}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Laurent polynomial in one auxiliary variable with an explicit exponent window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    var: String,
    lo: i64,
    hi: i64,
    order: usize,
    coeffs: BTreeMap<i64, HbarPoly>,
}

impl LaurentPoly {
    pub fn zero(var: &str, lo: i64, hi: i64, order: usize) -> Self {
        LaurentPoly { var: var.to_string(), lo, hi, order, coeffs: BTreeMap::new() }
    }

    pub fn monomial(var: &str, lo: i64, hi: i64, exp: i64, c: HbarPoly) -> Result<Self, NumError> {
        let mut p = Self::zero(var, lo, hi, c.order());
        p.add_term(exp, &c)?;
        Ok(p)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, exp: i64) -> HbarPoly {
        self.coeffs.get(&exp).cloned().unwrap_or_else(|| HbarPoly::zero(self.order))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &HbarPoly)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, exp: i64, c: &HbarPoly) -> Result<(), NumError> {
        if exp < self.lo || exp > self.hi {
            return Err(NumError::OutOfWindow { var: self.var.clone(), exp, lo: self.lo, hi: self.hi });
        }
        if c.order() != self.order {
            return Err(NumError::OrderMismatch(self.order, c.order()));
        }
        let e = self.coeffs.entry(exp).or_insert_with(|| HbarPoly::zero(c.order()));
        e.add_assign(c);
        if e.is_zero() {
            self.coeffs.remove(&exp);
        }
        Ok(())
    }

    fn compatible(&self, o: &Self) -> Result<(), NumError> {
        if self.var != o.var || self.lo != o.lo || self.hi != o.hi {
            return Err(NumError::LaurentMismatch(format!(
                "{}[{},{}] vs {}[{},{}]",
                self.var, self.lo, self.hi, o.var, o.lo, o.hi
            )));
        }
        if self.order != o.order {
            return Err(NumError::OrderMismatch(self.order, o.order));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, NumError> {
        self.compatible(o)?;
        let mut out = self.clone();
        for (e, c) in &o.coeffs {
            out.add_term(*e, c)?;
        }
        Ok(out)
    }

    /// Product inside the shared window; any product exponent outside it is an error.
    pub fn checked_mul(&self, o: &Self) -> Result<Self, NumError> {
        self.compatible(o)?;
        let mut out = Self::zero(&self.var, self.lo, self.hi, self.order);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                let c = ca.mul(cb);
                if !c.is_zero() {
                    out.add_term(ea + eb, &c)?;
                }
            }
        }
        Ok(out)
    }
}

/// Polynomial with rational coefficients in loop variables t₁..tₙ.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LoopPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl LoopPoly {
    pub fn zero(nvars: usize) -> Self {
        LoopPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], Rational::one());
        p
    }

    /// The single variable t_i (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * r);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Substitutes the given values for all variables.
    pub fn evaluate(&self, vals: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (v, k) in vals.iter().zip(e) {
                for _ in 0..*k {
                    m *= v;
                }
            }
            acc += m;
        }
        acc
    }
}

/// One term of 1/(t₁+z−t₂) = Σ_k (t₂−t₁)^k z^{−k−1}, valid for |z| large.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseShiftTerm {
    pub k: u32,
    /// (t₂ − t₁)^k in the variables (t₁, t₂).
    pub numerator: LoopPoly,
    pub z_exp: i64,
}

pub fn expand_inverse_shift(k_max: i64) -> Result<Vec<InverseShiftTerm>, NumError> {
    if k_max < 0 {
        return Err(NumError::NegativeOrder(k_max));
    }
    let diff = LoopPoly::var(2, 1).add(&LoopPoly::var(2, 0).scale(&int(-1)));
    Ok((0..=k_max as u32).map(|k| InverseShiftTerm { k, numerator: diff.pow(k), z_exp: -(k as i64) - 1 }).collect())
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}
