//! Exact multilinear polynomials over binary variables.
//!
//! A [`Polynomial`] lives in one of two domains: spin variables take values
//! in {-1, +1} so `s*s = 1`, Boolean variables take values in {0, 1} so
//! `q*q = q`. Every arithmetic operation reduces exponents immediately, so a
//! stored monomial never repeats a variable. Coefficients are exact
//! rationals and zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

/// Exact coefficient type used throughout the crate.
pub type Coeff = BigRational;

/// Shorthand for an integral coefficient.
pub fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `p` or `p/q`.
pub fn format_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Parses `p` or `p/q`.
pub fn parse_coeff(s: &str) -> Option<Coeff> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("domain mismatch: {left:?} vs {right:?}")]
    DomainMismatch { left: Domain, right: Domain },
    #[error("ancilla {0} already occurs in the polynomial")]
    AncillaInUse(VarId),
    #[error("variables must be distinct, got {0:?}")]
    DuplicateVars(Vec<VarId>),
    #[error("assignment has no value for {0}")]
    MissingVariable(VarId),
    #[error("value {value} of {var} is outside the {domain:?} domain")]
    OutOfDomain { var: VarId, value: i8, domain: Domain },
}

/// Global variable index within a layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Values in {-1, +1}.
    Spin,
    /// Values in {0, 1}.
    Boolean,
}

impl Domain {
    pub fn symbol(self) -> char {
        match self {
            Domain::Spin => 's',
            Domain::Boolean => 'q',
        }
    }

    pub fn contains(self, value: i8) -> bool {
        match self {
            Domain::Spin => value == 1 || value == -1,
            Domain::Boolean => value == 0 || value == 1,
        }
    }
}

/// A product of distinct variables, stored as a strictly increasing index
/// list. The empty list is the constant monomial.
///
/// Ordering is graded-lexicographic: lower degree first, then by indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId) -> Self {
        let mut s = SmallVec::new();
        s.push(v.0);
        Monomial(s)
    }

    /// Builds a canonical monomial from arbitrary (possibly repeated)
    /// indices, reducing repeats according to `domain`.
    pub fn from_indices(domain: Domain, indices: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 4]> = indices.iter().copied().collect();
        v.sort_unstable();
        let mut out: SmallVec<[u32; 4]> = SmallVec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            let mut j = i;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            let count = j - i;
            let keep = match domain {
                Domain::Spin => count % 2 == 1,
                Domain::Boolean => true,
            };
            if keep {
                out.push(v[i]);
            }
            i = j;
        }
        Monomial(out)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&i| VarId(i))
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v.0).is_ok()
    }

    fn without(&self, v: VarId) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&i| i != v.0).collect())
    }

    /// Product of two canonical monomials with per-domain reduction.
    pub fn mul(&self, other: &Monomial, domain: Domain) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[u32; 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    if domain == Domain::Boolean {
                        out.push(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }
}

/// Summary numbers for a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyStats {
    /// Number of stored terms, constant included when nonzero.
    pub term_count: usize,
    pub degree: usize,
    pub constant: Coeff,
    /// Largest non-constant coefficient magnitude.
    pub max_abs_coefficient: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    domain: Domain,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero(domain: Domain) -> Self {
        Polynomial {
            domain,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(domain: Domain, c: Coeff) -> Self {
        let mut p = Self::zero(domain);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(domain: Domain, v: VarId) -> Self {
        let mut p = Self::zero(domain);
        p.add_term(Monomial::var(v), Coeff::one());
        p
    }

    /// `c * x[indices]`, with repeated indices reduced.
    pub fn term(domain: Domain, c: Coeff, indices: &[u32]) -> Self {
        let mut p = Self::zero(domain);
        p.add_term(Monomial::from_indices(domain, indices), c);
        p
    }

    pub fn from_terms<I>(domain: Domain, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Coeff)>,
    {
        let mut p = Self::zero(domain);
        for (idx, c) in terms {
            p.add_term(Monomial::from_indices(domain, &idx), c);
        }
        p
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Same terms, different domain tag. Only meaningful when the caller
    /// knows the reinterpretation is valid (e.g. multilinear, no products
    /// left to reduce).
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Coefficient of the monomial built from `indices`.
    pub fn coeff_of(&self, indices: &[u32]) -> Coeff {
        self.coefficient(&Monomial::from_indices(self.domain, indices))
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Monomial::one())
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// One past the largest variable index used, or 0.
    pub fn var_bound(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.indices().last())
            .map(|&i| i as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn occurs(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.contains(v))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_domain(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.domain != other.domain {
            return Err(PolyError::DomainMismatch {
                left: self.domain,
                right: other.domain,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_domain(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Coeff::one())
    }

    pub fn scale(&self, k: &Coeff) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero(self.domain);
        }
        Polynomial {
            domain: self.domain,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * k))
                .collect(),
        }
    }

    /// Distributive product with exponent reduction.
    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_domain(other)?;
        let mut out = Polynomial::zero(self.domain);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb, self.domain), ca * cb);
            }
        }
        Ok(out)
    }

    /// Replaces every occurrence of `v` by `c0 + c1 * w`, reducing in
    /// `result_domain`.
    pub fn substitute_affine(
        &self,
        v: VarId,
        c0: &Coeff,
        c1: &Coeff,
        w: VarId,
        result_domain: Domain,
    ) -> Polynomial {
        let mut out = Polynomial::zero(result_domain);
        let wm = Monomial::var(w);
        for (m, c) in &self.terms {
            if m.contains(v) {
                let rest = m.without(v);
                out.add_term(rest.mul(&wm, result_domain), c * c1);
                out.add_term(rest, c * c0);
            } else {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Applies `x <- c0 + c1 * x` to every variable at once.
    ///
    /// Each monomial of degree d expands into its 2^d sub-monomials; no two
    /// variables of the image coincide, so no reduction is needed.
    pub fn map_affine_all(&self, c0: &Coeff, c1: &Coeff, result_domain: Domain) -> Polynomial {
        let max_deg = self.degree();
        let mut p0 = Vec::with_capacity(max_deg + 1);
        let mut p1 = Vec::with_capacity(max_deg + 1);
        p0.push(Coeff::one());
        p1.push(Coeff::one());
        for k in 1..=max_deg {
            p0.push(&p0[k - 1] * c0);
            p1.push(&p1[k - 1] * c1);
        }
        let mut out = Polynomial::zero(result_domain);
        for (m, c) in &self.terms {
            let idx = m.indices();
            let d = idx.len();
            for mask in 0u64..(1u64 << d) {
                let picked = mask.count_ones() as usize;
                let k = &p0[d - picked] * &p1[picked];
                if k.is_zero() {
                    continue;
                }
                let sub: SmallVec<[u32; 4]> = idx
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect();
                out.add_term(Monomial(sub), c * k);
            }
        }
        out
    }

    /// Replaces the pair `vi * vj` by `vk` in every monomial containing both.
    pub fn substitute_pair(&self, vi: VarId, vj: VarId, vk: VarId) -> Result<Polynomial, PolyError> {
        if self.domain != Domain::Boolean {
            return Err(PolyError::DomainMismatch {
                left: self.domain,
                right: Domain::Boolean,
            });
        }
        if vi == vj || vi == vk || vj == vk {
            return Err(PolyError::DuplicateVars(vec![vi, vj, vk]));
        }
        if self.occurs(vk) {
            return Err(PolyError::AncillaInUse(vk));
        }
        let km = Monomial::var(vk);
        let mut out = Polynomial::zero(Domain::Boolean);
        for (m, c) in &self.terms {
            if m.contains(vi) && m.contains(vj) {
                let rest = m.without(vi).without(vj);
                out.add_term(rest.mul(&km, Domain::Boolean), c.clone());
            } else {
                out.add_term(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn stats(&self) -> PolyStats {
        let max_abs = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() > 0)
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(Coeff::zero);
        PolyStats {
            term_count: self.terms.len(),
            degree: self.degree(),
            constant: self.constant_term(),
            max_abs_coefficient: max_abs,
        }
    }

    fn check_assignment(&self, assignment: &[i8]) -> Result<(), PolyError> {
        for (i, &value) in assignment.iter().enumerate() {
            if !self.domain.contains(value) {
                return Err(PolyError::OutOfDomain {
                    var: VarId(i as u32),
                    value,
                    domain: self.domain,
                });
            }
        }
        if let Some(m) = self.terms.keys().find(|m| {
            m.indices()
                .last()
                .is_some_and(|&i| i as usize >= assignment.len())
        }) {
            let missing = m
                .vars()
                .find(|v| v.index() >= assignment.len())
                .expect("monomial has an out-of-range variable");
            return Err(PolyError::MissingVariable(missing));
        }
        Ok(())
    }

    /// Exact value at `assignment`, indexed by variable id.
    pub fn evaluate(&self, assignment: &[i8]) -> Result<Coeff, PolyError> {
        self.check_assignment(assignment)?;
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut v = 1i8;
            for &i in m.indices() {
                v *= assignment[i as usize];
                if v == 0 {
                    break;
                }
            }
            match v {
                1 => acc += c,
                -1 => acc -= c,
                _ => {}
            }
        }
        Ok(acc)
    }

    /// Integer copy for fast repeated evaluation; `None` if any coefficient
    /// is fractional or does not fit in an `i128`.
    pub fn to_integer_form(&self) -> Option<IntegerPolynomial> {
        let mut constant = 0i128;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if !c.is_integer() {
                return None;
            }
            let k = c.numer().to_i128()?;
            if m.degree() == 0 {
                constant = k;
            } else {
                terms.push((m.indices().iter().copied().collect(), k));
            }
        }
        Some(IntegerPolynomial {
            domain: self.domain,
            constant,
            terms,
        })
    }
}

impl fmt::Display for Polynomial {
    /// `28 + 6*s0 - 12*s4 + 2*s0*s1`, terms in graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let sym = self.domain.symbol();
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m.indices().iter().map(|i| format!("{sym}{i}")).collect();
            if vars.is_empty() {
                write!(f, "{}", format_coeff(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_coeff(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Multiplies two polynomials of the same domain.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    a.try_mul(b)
}

/// Integer-coefficient snapshot of a [`Polynomial`] for hot evaluation loops.
#[derive(Clone, Debug)]
pub struct IntegerPolynomial {
    domain: Domain,
    constant: i128,
    terms: Vec<(SmallVec<[u32; 4]>, i128)>,
}

impl IntegerPolynomial {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Unchecked evaluation: the assignment must cover every variable and
    /// hold in-domain values.
    pub fn evaluate(&self, assignment: &[i8]) -> i128 {
        let mut acc = self.constant;
        for (idx, c) in &self.terms {
            let mut v = 1i8;
            for &i in idx {
                v *= assignment[i as usize];
            }
            acc += *c * v as i128;
        }
        acc
    }
}
