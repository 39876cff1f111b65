use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exponent vector, one entry per variable of the owning polynomial.
pub type Monomial = Vec<u32>;

/// Exact multivariate polynomial with integer coefficients.
///
/// Zero coefficients are never stored. Binary operations require both
/// operands to share the same variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl SparsePoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        SparsePoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Arc<[String]>, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()], c);
        }
        p
    }

    pub fn one(vars: &Arc<[String]>) -> Self {
        Self::constant(vars, 1)
    }

    /// The variable `name`; panics if it is not in `vars`.
    pub fn var(vars: &Arc<[String]>, name: &str) -> Self {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(exps, BigInt::one());
        p
    }

    /// Builds a polynomial from raw terms, dropping zero coefficients and
    /// merging repeated exponent vectors.
    pub fn from_terms(vars: &Arc<[String]>, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "exponent vector arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
        &self.terms
    }

    /// Number of stored monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_default()
    }

    /// The homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> SparsePoly {
        if k.is_zero() {
            return Self::zero(&self.vars);
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Evaluates at an integer point given in variable order.
    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.vars.len());
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&e, x)| acc * num_traits::pow(x.clone(), e as usize))
            })
            .sum()
    }

    /// One term per line, `<coeff> <e1> ... <ek>`, lexicographic in the
    /// exponent vector.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            out.push_str(&c.to_string());
            for e in m {
                out.push(' ');
                out.push_str(&e.to_string());
            }
            out.push('\n');
        }
        out
    }

    fn check_vars(&self, other: &SparsePoly) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable lists"
        );
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let sign = match (i, c.is_negative()) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            let mag = c.abs();
            let vars: Vec<String> = m
                .iter()
                .zip(self.vars.iter())
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{sign}{mag}")?;
            } else if mag.is_one() {
                write!(f, "{sign}{}", vars.join("*"))?;
            } else {
                write!(f, "{sign}{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        self.check_vars(rhs);
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    // Exponents add when monomials multiply.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        self.check_vars(rhs);
        let mut out = SparsePoly::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Arc<[String]> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn binomial_square() {
        let v = vars(&["x", "y"]);
        let s = &SparsePoly::var(&v, "x") + &SparsePoly::var(&v, "y");
        let sq = &s * &s;
        assert_eq!(sq.to_canonical_text(), "1 0 2\n2 1 1\n1 2 0\n");
        assert_eq!(sq.degree(), Some(2));
        assert_eq!(sq.to_string(), "x^2 + 2*x*y + y^2");
    }

    #[test]
    fn cancellation_removes_terms() {
        let v = vars(&["x"]);
        let x = SparsePoly::var(&v, "x");
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn homogeneous_parts_and_evaluation() {
        let v = vars(&["x", "y"]);
        let x = SparsePoly::var(&v, "x");
        let y = SparsePoly::var(&v, "y");
        let p = &(&x + &SparsePoly::constant(&v, 3)) * &(&y + &SparsePoly::constant(&v, 5));
        assert_eq!(p.constant_term(), BigInt::from(15));
        assert_eq!(p.homogeneous_part(1), &x.scale(&5.into()) + &y.scale(&3.into()));
        assert_eq!(p.eval(&[2.into(), 1.into()]), BigInt::from(30));
    }
}
