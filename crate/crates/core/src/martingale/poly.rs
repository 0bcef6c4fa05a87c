//! Sparse multivariate polynomials with real coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Monomial as ascending (variable, exponent) pairs with positive exponents.
pub type Monomial = Vec<(usize, u32)>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, f64>,
}

/// JSON form of a single term.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Term {
    coeff: f64,
    #[serde(default)]
    exponents: Vec<(usize, u32)>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(m, &c)| Term {
                coeff: c,
                exponents: m.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        let mut p = Poly::zero();
        for t in terms {
            if !t.coeff.is_finite() {
                return Err(serde::de::Error::custom("polynomial coefficient must be finite"));
            }
            p.add_term(normalize(t.exponents), t.coeff);
        }
        Ok(p)
    }
}

fn normalize(mut m: Monomial) -> Monomial {
    m.sort_unstable_by_key(|&(v, _)| v);
    let mut out: Monomial = Vec::with_capacity(m.len());
    for (v, e) in m {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += e,
            _ => out.push((v, e)),
        }
    }
    out
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m = a.clone();
    m.extend_from_slice(b);
    normalize(m)
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(1.0, &[(i, 1)])
    }

    pub fn monomial(c: f64, exps: &[(usize, u32)]) -> Self {
        let mut p = Self::zero();
        p.add_term(normalize(exps.to_vec()), c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&(_, e)| e).sum()).max().unwrap_or(0)
    }

    /// Variables with a nonzero exponent somewhere.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flat_map(|m| m.iter().map(|&(i, _)| i)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| c * m.iter().map(|&(i, e)| x[i].powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (m, &c) in &other.terms {
            p.add_term(m.clone(), c);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                p.add_term(mul_monomials(a, b), ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Renames variable i to `map(i)`.
    pub fn reindex(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut p = Self::zero();
        for (m, &c) in &self.terms {
            p.add_term(normalize(m.iter().map(|&(i, e)| (map(i), e)).collect()), c);
        }
        p
    }

    /// Replaces every variable x_i by the polynomial `sub(i)`.
    pub fn substitute(&self, sub: impl Fn(usize) -> Poly) -> Self {
        let mut cache: BTreeMap<usize, Poly> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let mut term = Self::constant(c);
            for &(i, e) in m {
                let base = cache.entry(i).or_insert_with(|| sub(i)).clone();
                term = term.mul(&base.pow(e));
            }
            out = out.add(&term);
        }
        out
    }

    /// Σ cᵢ xᵢ.
    pub fn linear(coeffs: &[(usize, f64)]) -> Self {
        let mut p = Self::zero();
        for &(i, c) in coeffs {
            p.add_term(vec![(i, 1)], c);
        }
        p
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.terms.values().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(domain("polynomial", "coefficients must be finite"))
        }
    }
}
