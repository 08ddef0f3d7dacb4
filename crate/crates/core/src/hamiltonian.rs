//! Assembly of `H^(K,L)(g, h; z)`.
//!
//! Diagonal entries are the vertex weights; every edge contributes `-1 -/+ s*c`
//! as described on [`EdgeSpec`](crate::lattice::EdgeSpec). The symbolic matrix
//! is written in the amended couplings `(gamma, delta, z)` with
//! `g = gamma + delta` and `h = gamma - delta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Coupling, GraphFamilySpec};
use crate::polyring::rational::{format_rational, int, parse_rational, rat, serde_rational};
use crate::polyring::{Matrix, MultiPoly, Rational, Ring, Var};

/// Physical couplings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CouplingSet {
    #[serde(with = "serde_rational")]
    pub g: Rational,
    #[serde(with = "serde_rational")]
    pub h: Rational,
    #[serde(with = "serde_rational")]
    pub z: Rational,
}

/// Amended couplings `gamma = (g + h)/2`, `delta = (g - h)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AmendedCouplingSet {
    #[serde(with = "serde_rational")]
    pub gamma: Rational,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[serde(with = "serde_rational")]
    pub z: Rational,
}

impl CouplingSet {
    pub fn new(g: Rational, h: Rational, z: Rational) -> Self {
        Self { g, h, z }
    }

    pub fn negated(&self) -> Self {
        Self::new(-&self.g, -&self.h, -&self.z)
    }
}

impl AmendedCouplingSet {
    pub fn new(gamma: Rational, delta: Rational, z: Rational) -> Self {
        Self { gamma, delta, z }
    }
}

pub fn to_physical(a: &AmendedCouplingSet) -> CouplingSet {
    CouplingSet {
        g: &a.gamma + &a.delta,
        h: &a.gamma - &a.delta,
        z: a.z.clone(),
    }
}

pub fn to_amended(c: &CouplingSet) -> AmendedCouplingSet {
    let half = rat(1, 2);
    AmendedCouplingSet {
        gamma: (&c.g + &c.h) * &half,
        delta: (&c.g - &c.h) * &half,
        z: c.z.clone(),
    }
}

/// Assembles the matrix over any ring given the values of `g`, `h`, `z` in it.
pub fn assemble_with<T: Ring>(spec: &GraphFamilySpec, g: &T, h: &T, z: &T) -> Matrix<T> {
    let n = spec.n();
    let mut m = Matrix::<T>::zeros(n, n);
    for (i, w) in spec.weights().iter().enumerate() {
        m[(i, i)] = T::from_int(*w as i64);
    }
    let minus_one = T::from_int(-1);
    for (a, b, e) in spec.edge_indices() {
        let c = match e.coupling {
            Coupling::None => T::zero(),
            Coupling::G => g.clone(),
            Coupling::H => h.clone(),
            Coupling::Z => z.clone(),
        };
        let sc = if e.sign < 0 { c.negated() } else { c };
        m[(a, b)] = minus_one.minus(&sc);
        m[(b, a)] = minus_one.plus(&sc);
    }
    m
}

pub fn assemble(spec: &GraphFamilySpec, c: &CouplingSet) -> Matrix<Rational> {
    assemble_with(spec, &c.g, &c.h, &c.z)
}

pub fn assemble_amended(spec: &GraphFamilySpec, a: &AmendedCouplingSet) -> Matrix<Rational> {
    assemble(spec, &to_physical(a))
}

/// Entries are polynomials of degree at most one in `gamma, delta, z`.
pub fn assemble_symbolic(spec: &GraphFamilySpec) -> Matrix<MultiPoly> {
    let gamma = MultiPoly::var(Var::Gamma);
    let delta = MultiPoly::var(Var::Delta);
    let z = MultiPoly::var(Var::Z);
    assemble_with(spec, &(&gamma + &delta), &(&gamma - &delta), &z)
}

/// Float projection of the exact matrix.
pub fn assemble_f64(spec: &GraphFamilySpec, c: &CouplingSet) -> Matrix<f64> {
    assemble(spec, c).to_f64()
}

/// A Hamiltonian in one of its three scalar representations.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianMatrix {
    Rational(Matrix<Rational>),
    Poly(Matrix<MultiPoly>),
    Float(Matrix<f64>),
}

impl HamiltonianMatrix {
    pub fn n(&self) -> usize {
        match self {
            HamiltonianMatrix::Rational(m) => m.n(),
            HamiltonianMatrix::Poly(m) => m.n(),
            HamiltonianMatrix::Float(m) => m.n(),
        }
    }

    pub fn to_doc(&self) -> MatrixDoc {
        let n = self.n();
        match self {
            HamiltonianMatrix::Rational(m) => MatrixDoc::Rational {
                n,
                entries: m.map(format_rational).to_rows(),
            },
            HamiltonianMatrix::Poly(m) => MatrixDoc::Poly {
                n,
                entries: m.to_rows(),
            },
            HamiltonianMatrix::Float(m) => MatrixDoc::Float {
                n,
                entries: m.to_rows(),
            },
        }
    }

    pub fn from_doc(doc: MatrixDoc) -> Result<Self> {
        fn check<T>(n: usize, rows: &[Vec<T>]) -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::domain(format!("matrix document is not {n}x{n}")));
            }
            Ok(())
        }
        Ok(match doc {
            MatrixDoc::Rational { n, entries } => {
                check(n, &entries)?;
                let rows = entries
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|s| parse_rational(s))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                HamiltonianMatrix::Rational(Matrix::from_rows(rows)?)
            }
            MatrixDoc::Poly { n, entries } => {
                check(n, &entries)?;
                HamiltonianMatrix::Poly(Matrix::from_rows(entries)?)
            }
            MatrixDoc::Float { n, entries } => {
                check(n, &entries)?;
                HamiltonianMatrix::Float(Matrix::from_rows(entries)?)
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(serde_json::from_str(s)?)
    }
}

/// JSON form: `{"kind": "rational|poly|float", "n": .., "entries": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MatrixDoc {
    Rational {
        n: usize,
        entries: Vec<Vec<String>>,
    },
    Poly {
        n: usize,
        entries: Vec<Vec<MultiPoly>>,
    },
    Float {
        n: usize,
        entries: Vec<Vec<f64>>,
    },
}

/// `2N + 2`: weight 2 everywhere plus one extra at `x_{-1}` and `x_1`.
pub fn expected_trace(spec: &GraphFamilySpec) -> Rational {
    int(2 * spec.n() as i64 + 2)
}
