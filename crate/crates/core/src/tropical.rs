//! Min-plus machinery: tropical evaluation of polynomials, hypersurface
//! membership (minimum attained at least twice), the classical three-term
//! relations on m-subset coordinates, and a tropical lower bound for the
//! valuation of a determinant.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::assignment::min_cost_assignment;
use crate::dissimilarity::DissimilarityVector;
use crate::rational::ExtRational;
use crate::subsets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("point has {got} coordinates, expected C({n},{m}) = {expected}")]
    CoordinateCount { n: usize, m: usize, expected: usize, got: usize },
    #[error("polynomial lives in dimension {poly}, point in {point}")]
    DimensionMismatch { poly: usize, point: usize },
    #[error("term exponent vectors must be distinct")]
    RepeatedTerm,
    #[error("parameters m={m}, n={n} out of range (need 2 <= m <= n)")]
    ParameterRange { m: usize, n: usize },
    #[error("matrix is not square")]
    NonSquare,
}

/// Whether a point is checked as handed in or with every coordinate negated.
///
/// Coordinatewise valuations of lifted dissimilarity vectors carry a minus
/// sign, so min-plus membership evidence lives on the negated vector; that
/// is the default everywhere downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    AsGiven,
    #[default]
    Negated,
}

/// A point of the m-subset coordinate space: one extended-rational value per
/// m-subset of {1..n}, in lexicographic subset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPoint {
    n: usize,
    m: usize,
    coords: Vec<ExtRational>,
}

impl TropicalPoint {
    pub fn new(n: usize, m: usize, coords: Vec<ExtRational>) -> Result<Self, TropicalError> {
        if m < 2 || m > n {
            return Err(TropicalError::ParameterRange { m, n });
        }
        let expected = subsets::binomial(n, m);
        if coords.len() != expected {
            return Err(TropicalError::CoordinateCount {
                n,
                m,
                expected,
                got: coords.len(),
            });
        }
        Ok(TropicalPoint { n, m, coords })
    }

    /// The coordinates of a dissimilarity vector, all finite.
    pub fn from_dissimilarity(vector: &DissimilarityVector) -> Self {
        TropicalPoint {
            n: vector.n(),
            m: vector.m(),
            coords: vector
                .values()
                .iter()
                .map(|v| ExtRational::Finite(v.clone()))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coords(&self) -> &[ExtRational] {
        &self.coords
    }

    pub fn signed(&self, sign: Sign) -> TropicalPoint {
        match sign {
            Sign::AsGiven => self.clone(),
            Sign::Negated => TropicalPoint {
                n: self.n,
                m: self.m,
                coords: self.coords.iter().map(|c| -c).collect(),
            },
        }
    }
}

/// One term of a tropical polynomial: the valuation of its coefficient plus
/// a sparse exponent vector over the coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalTerm {
    pub coefficient_valuation: BigRational,
    /// `(coordinate index, exponent)` pairs, sorted, exponents positive.
    pub exponents: Vec<(usize, u32)>,
}

/// A tropicalized polynomial: the minimum over its terms of
/// `val(c) + sum(exponent * coordinate)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    dimension: usize,
    terms: Vec<TropicalTerm>,
}

impl TropicalPolynomial {
    pub fn new(dimension: usize, terms: Vec<TropicalTerm>) -> Result<Self, TropicalError> {
        let mut seen: Vec<&[(usize, u32)]> = Vec::with_capacity(terms.len());
        for term in &terms {
            if seen.contains(&term.exponents.as_slice()) {
                return Err(TropicalError::RepeatedTerm);
            }
            seen.push(&term.exponents);
        }
        Ok(TropicalPolynomial { dimension, terms })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[TropicalTerm] {
        &self.terms
    }
}

/// Evaluates the tropical polynomial: the exact minimum over terms and how
/// many terms attain it. A term touching an infinite coordinate with
/// positive exponent is infinite; if every term is infinite the minimum is
/// infinity and all terms attain it.
pub fn trop_eval(
    polynomial: &TropicalPolynomial,
    point: &[ExtRational],
) -> Result<(ExtRational, usize), TropicalError> {
    if polynomial.dimension != point.len() {
        return Err(TropicalError::DimensionMismatch {
            poly: polynomial.dimension,
            point: point.len(),
        });
    }
    let mut best: Option<(ExtRational, usize)> = None;
    for term in &polynomial.terms {
        let mut value = ExtRational::Finite(term.coefficient_valuation.clone());
        for &(index, exponent) in &term.exponents {
            value = &value + &point[index].scale(exponent);
        }
        best = Some(match best {
            None => (value, 1),
            Some((current, count)) => {
                if value < current {
                    (value, 1)
                } else if value == current {
                    (current, count + 1)
                } else {
                    (current, count)
                }
            }
        });
    }
    Ok(best.expect("polynomial has at least one term"))
}

/// Membership in the tropical hypersurface: the minimum is attained at
/// least twice.
pub fn hypersurface_member(
    polynomial: &TropicalPolynomial,
    point: &[ExtRational],
) -> Result<bool, TropicalError> {
    trop_eval(polynomial, point).map(|(_, count)| count >= 2)
}

/// A three-term relation on m-subset coordinates: for a fixed (m-2)-subset S
/// and four indices i<j<k<l disjoint from S, the three pair sums
/// `p(S+ij)+p(S+kl)`, `p(S+ik)+p(S+jl)`, `p(S+il)+p(S+jk)`, each with
/// coefficient valuation zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeTermRelation {
    pub s: Vec<u32>,
    pub quad: [u32; 4],
    /// Coordinate index pairs for the three terms.
    pub term_pairs: [[usize; 2]; 3],
}

impl ThreeTermRelation {
    fn build(s: &[u32], quad: [u32; 4], n: usize) -> Self {
        let [i, j, k, l] = quad;
        let rank = |a: u32, b: u32| -> usize {
            let mut sigma = s.to_vec();
            sigma.extend([a, b]);
            sigma.sort_unstable();
            subsets::lex_rank(&sigma, n)
        };
        ThreeTermRelation {
            s: s.to_vec(),
            quad,
            term_pairs: [
                [rank(i, j), rank(k, l)],
                [rank(i, k), rank(j, l)],
                [rank(i, l), rank(j, k)],
            ],
        }
    }

    /// The relation as a generic tropical polynomial in dimension C(n,m).
    pub fn to_polynomial(&self, n: usize, m: usize) -> TropicalPolynomial {
        let terms = self
            .term_pairs
            .iter()
            .map(|&[a, b]| TropicalTerm {
                coefficient_valuation: BigRational::zero(),
                exponents: if a == b {
                    vec![(a, 2)]
                } else {
                    let mut pair = vec![(a, 1), (b, 1)];
                    pair.sort_unstable();
                    pair
                },
            })
            .collect();
        TropicalPolynomial::new(subsets::binomial(n, m), terms)
            .expect("three-term exponent vectors are distinct")
    }
}

/// Enumerates every three-term relation for the (m, n) coordinate space, in
/// lexicographic (S, quad) order. Empty when n < m + 2.
pub fn three_term_relations(m: usize, n: usize) -> Result<Vec<ThreeTermRelation>, TropicalError> {
    if m < 2 || m > n {
        return Err(TropicalError::ParameterRange { m, n });
    }
    let mut relations = Vec::new();
    for s in subsets::enumerate(n, m - 2) {
        let rest: Vec<u32> = (1..=n as u32).filter(|v| !s.contains(v)).collect();
        for quad in subsets::enumerate(rest.len(), 4) {
            let quad = [
                rest[quad[0] as usize - 1],
                rest[quad[1] as usize - 1],
                rest[quad[2] as usize - 1],
                rest[quad[3] as usize - 1],
            ];
            relations.push(ThreeTermRelation::build(&s, quad, n));
        }
    }
    Ok(relations)
}

/// A three-term relation whose minimum is attained only once at the point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    pub quad: [u32; 4],
    /// The three term values at the (signed) point, as exact strings.
    pub terms: [String; 3],
    pub argmin_count: usize,
}

/// Evaluates every three-term relation on the point (negated by default) and
/// collects the relations whose minimum is attained only once. An empty
/// result is the prevariety membership evidence.
pub fn plucker_prevariety_check(point: &TropicalPoint, sign: Sign) -> Vec<Violation> {
    let signed = point.signed(sign);
    let relations =
        three_term_relations(point.m(), point.n()).expect("point carries valid (m, n)");
    let mut violations = Vec::new();
    for relation in relations {
        let values: Vec<ExtRational> = relation
            .term_pairs
            .iter()
            .map(|&[a, b]| &signed.coords()[a] + &signed.coords()[b])
            .collect();
        let min = values.iter().min().expect("three terms");
        let count = values.iter().filter(|v| *v == min).count();
        if count < 2 {
            violations.push(Violation {
                s: relation.s.clone(),
                quad: relation.quad,
                terms: [
                    values[0].to_string(),
                    values[1].to_string(),
                    values[2].to_string(),
                ],
                argmin_count: count,
            });
        }
    }
    violations
}

/// Tropical determinant of a valuation matrix: the minimum over permutations
/// of the sum of picked entries, computed by exact min-cost assignment. This
/// lower-bounds the valuation of the determinant of any matrix with these
/// entry valuations.
pub fn tropical_det_bound(matrix: &[Vec<ExtRational>]) -> Result<ExtRational, TropicalError> {
    if matrix.iter().any(|row| row.len() != matrix.len()) {
        return Err(TropicalError::NonSquare);
    }
    Ok(min_cost_assignment(matrix).total())
}
