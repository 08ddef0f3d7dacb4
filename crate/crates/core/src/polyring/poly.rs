use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, int, serde_rational, Rational};

use crate::error::{Error, Result};

/// The four polynomial variables: energy and the three amended couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    E = 0,
    Gamma = 1,
    Delta = 2,
    Z = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::E, Var::Gamma, Var::Delta, Var::Z];

    pub fn name(self) -> &'static str {
        match self {
            Var::E => "E",
            Var::Gamma => "gamma",
            Var::Delta => "delta",
            Var::Z => "z",
        }
    }
}

/// Exponents of (E, gamma, delta, z).
pub type Exponents = [u16; 4];

/// Sparse multivariate polynomial over the rationals in `E, gamma, delta, z`.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Exponents, Rational>,
}

/// A partial assignment of values to variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution {
    pub values: [Option<Rational>; 4],
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: Rational) -> Self {
        self.values[var as usize] = Some(value);
        self
    }

    pub fn get(&self, var: Var) -> Option<&Rational> {
        self.values[var as usize].as_ref()
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn var(v: Var) -> Self {
        let mut exps = [0; 4];
        exps[v as usize] = 1;
        Self::monomial(exps, Rational::one())
    }

    pub fn monomial(exps: Exponents, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        Self { terms }
    }

    /// Sums duplicate monomials and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Builds `sum_i coeffs[i] * var^i`.
    pub fn from_coeffs_in(var: Var, coeffs: &[MultiPoly]) -> Self {
        let mut p = Self::zero();
        for (i, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut e = *e;
                e[var as usize] += i as u16;
                p.add_term(e, v.clone());
            }
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    /// Number of nonzero monomials.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &Exponents) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value of a polynomial with no variables left.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0; 4]).cloned(),
            _ => None,
        }
    }

    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms
            .keys()
            .map(|e| e[var as usize] as u32)
            .max()
            .unwrap_or(0)
    }

    pub fn contains(&self, var: Var) -> bool {
        self.terms.keys().any(|e| e[var as usize] > 0)
    }

    /// True when every exponent of `var` is even.
    pub fn is_even_in(&self, var: Var) -> bool {
        self.terms.keys().all(|e| e[var as usize] % 2 == 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients of `var^0, var^1, ...` as polynomials in the other variables.
    pub fn coeffs_in(&self, var: Var) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![MultiPoly::zero(); deg + 1];
        if self.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            let k = e[var as usize] as usize;
            let mut rest = *e;
            rest[var as usize] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Coefficients in `E` when no other variable occurs.
    pub fn univariate_coeffs(&self) -> Option<Vec<Rational>> {
        self.coeffs_in(Var::E)
            .into_iter()
            .map(|c| c.as_constant())
            .collect()
    }

    /// Substitutes the assigned variables; unassigned ones stay symbolic.
    pub fn eval(&self, at: &Substitution) -> MultiPoly {
        let mut powers: [Vec<Rational>; 4] = Default::default();
        for v in Var::ALL {
            if let Some(x) = at.get(v) {
                let deg = self.degree_in(v) as usize;
                let mut pw = Vec::with_capacity(deg + 1);
                pw.push(Rational::one());
                for i in 1..=deg {
                    pw.push(&pw[i - 1] * x);
                }
                powers[v as usize] = pw;
            }
        }
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = *e;
            for v in Var::ALL {
                let i = v as usize;
                if at.values[i].is_some() {
                    coeff *= &powers[i][e[i] as usize];
                    exps[i] = 0;
                }
            }
            out.add_term(exps, coeff);
        }
        out
    }

    /// Exact division by a divisor that is monic in `var`.
    ///
    /// On a nonzero remainder the error carries the remainder.
    pub fn div_exact(&self, den: &MultiPoly, var: Var) -> Result<MultiPoly> {
        let (q, r) = self.div_rem(den, var)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible { remainder: r })
        }
    }

    /// Long division in `var`; `den` must be monic in `var`.
    pub fn div_rem(&self, den: &MultiPoly, var: Var) -> Result<(MultiPoly, MultiPoly)> {
        if den.is_zero() {
            return Err(Error::domain("division by the zero polynomial"));
        }
        let den_coeffs = den.coeffs_in(var);
        let d = den_coeffs.len() - 1;
        if den_coeffs[d] != MultiPoly::one() {
            return Err(Error::domain(format!(
                "divisor is not monic in {}",
                var.name()
            )));
        }
        let mut rem = self.coeffs_in(var);
        if rem.len() <= d {
            return Ok((MultiPoly::zero(), self.clone()));
        }
        let mut quot = vec![MultiPoly::zero(); rem.len() - d];
        for i in (d..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[i]);
            if lead.is_zero() {
                continue;
            }
            for (j, dc) in den_coeffs.iter().enumerate().take(d) {
                let t = &lead * dc;
                rem[i - d + j] = &rem[i - d + j] - &t;
            }
            quot[i - d] = lead;
        }
        rem.truncate(d);
        Ok((
            MultiPoly::from_coeffs_in(var, &quot),
            MultiPoly::from_coeffs_in(var, &rem),
        ))
    }

    /// Terms in display order: descending E exponent, then descending (gamma, delta, z).
    pub fn display_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| {
            b[0].cmp(&a[0])
                .then_with(|| (b[1], b[2], b[3]).cmp(&(a[1], a[2], a[3])))
        });
        t
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.display_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[**v as usize] > 0)
                .map(|v| match e[*v as usize] {
                    1 => v.name().to_string(),
                    k => format!("{}^{}", v.name(), k),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

impl super::Ring for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        MultiPoly::constant(int(n))
    }
    fn div_int(&self, n: i64) -> Self {
        self.scale(&super::rational::rat(1, n))
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    monomial: Exponents,
    #[serde(with = "serde_rational")]
    coeff: Rational,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let docs: Vec<TermDoc> = self
            .display_terms()
            .into_iter()
            .map(|(e, c)| TermDoc {
                monomial: *e,
                coeff: c.clone(),
            })
            .collect();
        docs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let docs = Vec::<TermDoc>::deserialize(d)?;
        Ok(MultiPoly::from_terms(
            docs.into_iter().map(|t| (t.monomial, t.coeff)),
        ))
    }
}
