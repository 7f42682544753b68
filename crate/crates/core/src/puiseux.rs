//! Sparse polynomials in one variable `t` with exact rational exponents and
//! arbitrary-precision integer coefficients, together with matrices of them,
//! exact determinants, and determinant-preserving column reductions.
//!
//! Exponent sets are finite, so these are Laurent-style polynomials rather
//! than full Puiseux series; everything the verifier needs is a finite sum.
//! The valuation of a polynomial is its least exponent, with `val(0) = inf`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rational, ExtRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuiseuxError {
    #[error("matrix is not square ({n_rows}x{n_cols})")]
    NonSquare { n_rows: usize, n_cols: usize },
    #[error("invalid column reduction: {0}")]
    InvalidReduction(#[from] ReductionError),
}

/// Why a column reduction sequence is not valid for an n-column matrix.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("step {step}: column {column} out of range 1..={n_cols}")]
    IndexOutOfRange {
        step: usize,
        column: usize,
        n_cols: usize,
    },
    #[error("step {step}: target column {column} was already reduced")]
    RepeatedTarget { step: usize, column: usize },
    #[error("step {step}: source column {column} is a reduced target")]
    SourceAlreadyReduced { step: usize, column: usize },
}

/// A polynomial stored as ascending `(exponent, coefficient)` pairs with no
/// zero coefficients; the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PuiseuxPoly {
    terms: Vec<(BigRational, BigInt)>,
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        PuiseuxPoly::default()
    }

    pub fn one() -> Self {
        PuiseuxPoly::constant(BigInt::one())
    }

    pub fn constant(value: BigInt) -> Self {
        PuiseuxPoly::monomial(value, BigRational::zero())
    }

    pub fn monomial(coefficient: BigInt, exponent: BigRational) -> Self {
        if coefficient.is_zero() {
            return PuiseuxPoly::zero();
        }
        PuiseuxPoly {
            terms: vec![(exponent, coefficient)],
        }
    }

    /// Canonicalizes arbitrary terms: merges equal exponents and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (BigRational, BigInt)>) -> Self {
        let mut map: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        for (exponent, coefficient) in terms {
            let entry = map.entry(exponent).or_insert_with(BigInt::zero);
            *entry += coefficient;
        }
        PuiseuxPoly {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent present; `inf` for the zero polynomial.
    pub fn valuation(&self) -> ExtRational {
        match self.terms.first() {
            Some((exponent, _)) => ExtRational::Finite(exponent.clone()),
            None => ExtRational::Infinity,
        }
    }

    pub fn terms(&self) -> &[(BigRational, BigInt)] {
        &self.terms
    }

    pub fn coefficient(&self, exponent: &BigRational) -> Option<&BigInt> {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(exponent))
            .ok()
            .map(|i| &self.terms[i].1)
    }

    pub fn exponents(&self) -> impl Iterator<Item = &BigRational> {
        self.terms.iter().map(|(e, _)| e)
    }
}

impl std::ops::Add for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn add(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        merge(self, rhs, false)
    }
}

impl std::ops::Sub for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn sub(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        merge(self, rhs, true)
    }
}

impl std::ops::Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn neg(self) -> PuiseuxPoly {
        PuiseuxPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }
}

impl std::ops::Mul for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn mul(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        if self.is_zero() || rhs.is_zero() {
            return PuiseuxPoly::zero();
        }
        let mut map: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let entry = map.entry(ea + eb).or_insert_with(BigInt::zero);
                *entry += ca * cb;
            }
        }
        PuiseuxPoly {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

/// Merges two ascending term lists, adding or subtracting coefficients.
fn merge(a: &PuiseuxPoly, b: &PuiseuxPoly, subtract: bool) -> PuiseuxPoly {
    let mut terms = Vec::with_capacity(a.terms.len() + b.terms.len());
    let mut ia = 0;
    let mut ib = 0;
    while ia < a.terms.len() || ib < b.terms.len() {
        let take_a = match (a.terms.get(ia), b.terms.get(ib)) {
            (Some((ea, _)), Some((eb, _))) => match ea.cmp(eb) {
                std::cmp::Ordering::Less => Some(true),
                std::cmp::Ordering::Greater => Some(false),
                std::cmp::Ordering::Equal => None,
            },
            (Some(_), None) => Some(true),
            (None, Some(_)) => Some(false),
            (None, None) => unreachable!(),
        };
        match take_a {
            Some(true) => {
                terms.push(a.terms[ia].clone());
                ia += 1;
            }
            Some(false) => {
                let (e, c) = &b.terms[ib];
                terms.push((e.clone(), if subtract { -c } else { c.clone() }));
                ib += 1;
            }
            None => {
                let (e, ca) = &a.terms[ia];
                let cb = &b.terms[ib].1;
                let c = if subtract { ca - cb } else { ca + cb };
                if !c.is_zero() {
                    terms.push((e.clone(), c));
                }
                ia += 1;
                ib += 1;
            }
        }
    }
    PuiseuxPoly { terms }
}

impl fmt::Display for PuiseuxPoly {
    /// Ascending sum of `c*t^(e)` terms, e.g. `-3*t^(-9) + 1*t^(-1/2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let rendered = self
            .terms
            .iter()
            .map(|(e, c)| format!("{}*t^({})", c, format_rational(e)))
            .join(" + ");
        write!(f, "{rendered}")
    }
}

impl fmt::Debug for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rectangular matrix of polynomials; rows and columns are 0-based here,
/// while [`ColumnReduction`] speaks the 1-based column language of the
/// reduction calculus.
#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<PuiseuxPoly>,
}

impl PuiseuxMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        PuiseuxMatrix {
            n_rows,
            n_cols,
            entries: vec![PuiseuxPoly::zero(); n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxPoly>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == n_cols),
            "rows must have equal length"
        );
        PuiseuxMatrix {
            n_rows,
            n_cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn entry(&self, row: usize, col: usize) -> &PuiseuxPoly {
        assert!(row < self.n_rows && col < self.n_cols, "index out of bounds");
        &self.entries[row * self.n_cols + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: PuiseuxPoly) {
        assert!(row < self.n_rows && col < self.n_cols, "index out of bounds");
        self.entries[row * self.n_cols + col] = value;
    }

    /// Valuation of every entry.
    pub fn valuations(&self) -> Vec<Vec<ExtRational>> {
        (0..self.n_rows)
            .map(|r| (0..self.n_cols).map(|c| self.entry(r, c).valuation()).collect())
            .collect()
    }

    /// Exact determinant by Laplace expansion over column subsets with
    /// memoized minors: O(n * 2^n) polynomial operations and no division.
    /// Intended for n up to about 16.
    pub fn determinant(&self) -> Result<PuiseuxPoly, PuiseuxError> {
        if self.n_rows != self.n_cols {
            return Err(PuiseuxError::NonSquare {
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            });
        }
        let n = self.n_rows;
        if n == 0 {
            return Ok(PuiseuxPoly::one());
        }
        // minors[mask] = det of the first k rows on the k columns in mask
        let mut previous: HashMap<u32, PuiseuxPoly> = HashMap::new();
        previous.insert(0, PuiseuxPoly::one());
        for k in 1..=n {
            let mut current: HashMap<u32, PuiseuxPoly> = HashMap::new();
            for cols in (0..n).combinations(k) {
                let mask: u32 = cols.iter().map(|&c| 1u32 << c).sum();
                let mut det = PuiseuxPoly::zero();
                for (pos, &col) in cols.iter().enumerate() {
                    let entry = self.entry(k - 1, col);
                    if entry.is_zero() {
                        continue;
                    }
                    let minor = &previous[&(mask & !(1 << col))];
                    let product = entry * minor;
                    det = if (k - 1 + pos) % 2 == 0 {
                        &det + &product
                    } else {
                        &det - &product
                    };
                }
                current.insert(mask, det);
            }
            previous = current;
        }
        Ok(previous.remove(&((1u32 << n) - 1)).expect("full mask computed"))
    }

    /// Applies the steps of a validated reduction in order, column `a` minus
    /// column `b`, leaving `self` untouched.
    pub fn apply_reduction(&self, reduction: &ColumnReduction) -> Result<Self, PuiseuxError> {
        reduction.validate(self.n_cols)?;
        let mut out = self.clone();
        for &(a, b) in reduction.steps() {
            for row in 0..out.n_rows {
                let reduced = out.entry(row, a - 1) - out.entry(row, b - 1);
                out.set_entry(row, a - 1, reduced);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for PuiseuxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PuiseuxMatrix {}x{} [", self.n_rows, self.n_cols)?;
        for r in 0..self.n_rows {
            let row = (0..self.n_cols).map(|c| self.entry(r, c).to_string()).join(", ");
            writeln!(f, "  [{row}]")?;
        }
        write!(f, "]")
    }
}

/// An ordered list of column operations `(a_k, b_k)`, 1-based: subtract
/// column `b_k` from column `a_k`. A sequence is valid when all indices are
/// in range, the targets `a_1..a_l` are pairwise distinct, and each source
/// `b_k` avoids `{a_1..a_k}`. The empty sequence is valid (every matrix is a
/// reduction of itself).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColumnReduction {
    steps: Vec<(usize, usize)>,
}

impl ColumnReduction {
    pub fn new(steps: Vec<(usize, usize)>) -> Self {
        ColumnReduction { steps }
    }

    pub fn steps(&self) -> &[(usize, usize)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks the three validity conditions against an n-column matrix,
    /// reporting the first failing step.
    pub fn validate(&self, n_cols: usize) -> Result<(), ReductionError> {
        let mut targets = Vec::with_capacity(self.steps.len());
        for (index, &(a, b)) in self.steps.iter().enumerate() {
            let step = index + 1;
            for column in [a, b] {
                if column == 0 || column > n_cols {
                    return Err(ReductionError::IndexOutOfRange {
                        step,
                        column,
                        n_cols,
                    });
                }
            }
            if targets.contains(&a) {
                return Err(ReductionError::RepeatedTarget { step, column: a });
            }
            targets.push(a);
            if targets.contains(&b) {
                return Err(ReductionError::SourceAlreadyReduced { step, column: b });
            }
        }
        Ok(())
    }
}
