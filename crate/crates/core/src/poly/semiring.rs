//! Evaluation structures for circuits and branching programs.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

/// A commutative semiring, optionally with negation.
pub trait Semiring {
    type Elem: Clone + PartialEq + Debug;

    fn name(&self) -> &'static str;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Additive inverse; `None` when the structure is not a ring.
    fn neg(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of an integer constant, if it has one.
    fn embed(&self, c: &BigInt) -> Option<Self::Elem>;
    fn sample<R: Rng>(&self, rng: &mut R) -> Self::Elem;

    fn is_ring(&self) -> bool {
        self.neg(&self.one()).is_some()
    }
}

/// Exact integers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl Semiring for Integers {
    type Elem = BigInt;
    fn name(&self) -> &'static str {
        "integers"
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> Option<BigInt> {
        Some(-a)
    }
    fn embed(&self, c: &BigInt) -> Option<BigInt> {
        Some(c.clone())
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> BigInt {
        BigInt::from(rng.random_range(-1000i64..=1000))
    }
}

/// Arithmetic modulo the Mersenne prime 2^61 - 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModPrime;

impl ModPrime {
    pub const MODULUS: u64 = (1 << 61) - 1;

    pub fn reduce(c: &BigInt) -> u64 {
        let p = BigInt::from(Self::MODULUS);
        let r = ((c % &p) + &p) % &p;
        r.to_u64().expect("residue fits in u64")
    }
}

impl Semiring for ModPrime {
    type Elem = u64;
    fn name(&self) -> &'static str {
        "mod 2^61-1"
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= Self::MODULUS {
            s - Self::MODULUS
        } else {
            s
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % Self::MODULUS as u128) as u64
    }
    fn neg(&self, a: &u64) -> Option<u64> {
        Some(if *a == 0 { 0 } else { Self::MODULUS - a })
    }
    fn embed(&self, c: &BigInt) -> Option<u64> {
        Some(Self::reduce(c))
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..Self::MODULUS)
    }
}

/// `({0,1}, ∨, ∧)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Elem = bool;
    fn name(&self) -> &'static str {
        "boolean"
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn add(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn mul(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn neg(&self, _: &bool) -> Option<bool> {
        None
    }
    fn embed(&self, c: &BigInt) -> Option<bool> {
        if c.is_zero() {
            Some(false)
        } else if c.is_one() {
            Some(true)
        } else {
            None
        }
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> bool {
        rng.random()
    }
}

/// `(ℕ, +, ×)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Naturals;

impl Semiring for Naturals {
    type Elem = BigUint;
    fn name(&self) -> &'static str {
        "naturals"
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a + b
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn neg(&self, _: &BigUint) -> Option<BigUint> {
        None
    }
    fn embed(&self, c: &BigInt) -> Option<BigUint> {
        if c.is_negative() {
            None
        } else {
            c.to_biguint()
        }
    }
    fn sample<R: Rng>(&self, rng: &mut R) -> BigUint {
        BigUint::from(rng.random_range(0u32..1000))
    }
}

/// Checks commutativity, associativity, distributivity and the identity
/// laws on every pair and triple drawn from `elems`. Returns a description
/// of the first violated law.
pub fn verify_semiring_laws<S: Semiring>(s: &S, elems: &[S::Elem]) -> Result<(), String> {
    let (zero, one) = (s.zero(), s.one());
    for a in elems {
        if s.add(a, &zero) != *a || s.mul(a, &one) != *a || s.mul(a, &zero) != zero {
            return Err(format!("{}: identity law fails at {a:?}", s.name()));
        }
        if let Some(na) = s.neg(a) {
            if s.add(a, &na) != zero {
                return Err(format!("{}: a + (-a) != 0 at {a:?}", s.name()));
            }
        }
        for b in elems {
            if s.add(a, b) != s.add(b, a) || s.mul(a, b) != s.mul(b, a) {
                return Err(format!("{}: commutativity fails at {a:?}, {b:?}", s.name()));
            }
            for c in elems {
                if s.add(&s.add(a, b), c) != s.add(a, &s.add(b, c)) || s.mul(&s.mul(a, b), c) != s.mul(a, &s.mul(b, c)) {
                    return Err(format!("{}: associativity fails", s.name()));
                }
                if s.mul(a, &s.add(b, c)) != s.add(&s.mul(a, b), &s.mul(a, c)) {
                    return Err(format!("{}: distributivity fails", s.name()));
                }
            }
        }
    }
    Ok(())
}

/// Runs [`verify_semiring_laws`] on `n` sampled elements plus zero and one.
pub fn self_test<S: Semiring, R: Rng>(s: &S, rng: &mut R, n: usize) -> Result<(), String> {
    let mut elems = vec![s.zero(), s.one()];
    elems.extend((0..n).map(|_| s.sample(rng)));
    verify_semiring_laws(s, &elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_structures_satisfy_the_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        self_test(&Integers, &mut rng, 8).unwrap();
        self_test(&ModPrime, &mut rng, 8).unwrap();
        self_test(&Boolean, &mut rng, 8).unwrap();
        self_test(&Naturals, &mut rng, 8).unwrap();
        assert!(Integers.is_ring() && ModPrime.is_ring());
        assert!(!Boolean.is_ring() && !Naturals.is_ring());
    }

    #[test]
    fn modular_embedding_of_negatives() {
        assert_eq!(ModPrime::reduce(&BigInt::from(-1)), ModPrime::MODULUS - 1);
        assert_eq!(Boolean.embed(&BigInt::from(2)), None);
    }

    #[test]
    fn broken_structure_is_reported() {
        // Saturating-at-3 addition with ordinary multiplication breaks distributivity.
        #[derive(Debug)]
        struct Sat;
        impl Semiring for Sat {
            type Elem = u8;
            fn name(&self) -> &'static str {
                "sat"
            }
            fn zero(&self) -> u8 {
                0
            }
            fn one(&self) -> u8 {
                1
            }
            fn add(&self, a: &u8, b: &u8) -> u8 {
                (a + b).min(3)
            }
            fn mul(&self, a: &u8, b: &u8) -> u8 {
                a * b
            }
            fn neg(&self, _: &u8) -> Option<u8> {
                None
            }
            fn embed(&self, _: &BigInt) -> Option<u8> {
                None
            }
            fn sample<R: Rng>(&self, rng: &mut R) -> u8 {
                rng.random_range(0..4)
            }
        }
        assert!(verify_semiring_laws(&Sat, &[0, 1, 2, 3]).is_err());
    }
}
