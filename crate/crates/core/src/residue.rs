//! Residue arithmetic in Z/p^k and finite abelian p-groups given by their type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        (a * b) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer to its least non-negative residue.
pub fn reduce_signed(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// p-adic valuation of a residue modulo p^k; zero has valuation k.
pub fn valuation(mut x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v.min(k)
}

/// Inverse of `a` modulo an arbitrary modulus, if it exists.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(reduce_signed(t0, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    k: u32,
}

impl PrimePower {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidType("prime power exponent must be positive".into()));
        }
        if p.checked_pow(k).is_none() {
            return Err(Error::InvalidType(format!("{p}^{k} overflows u64")));
        }
        Ok(PrimePower { p, k })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }
}

pub fn unit_inverse(a: u64, m: PrimePower) -> Result<u64> {
    let modulus = m.modulus();
    if a % m.p() == 0 {
        return Err(Error::NotAUnit { a, modulus });
    }
    Ok(inverse_mod(a % modulus, modulus).expect("units are invertible"))
}

/// Legendre symbol of `a` modulo an odd prime.
pub fn quadratic_character(a: i64, p: u64) -> i8 {
    let r = reduce_signed(a as i128, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn multiplicative_order(a: u64, m: u64, group_order: u64) -> u64 {
    let mut ord = group_order;
    for q in distinct_prime_factors(group_order) {
        while ord % q == 0 && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Least primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&h| factors.iter().all(|&q| pow_mod(h, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Least generator of the unit group modulo p^k (p odd).
pub fn unit_generator(p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    let phi = m / p * (p - 1);
    (2..m)
        .filter(|h| h % p != 0)
        .find(|&h| multiplicative_order(h, m, phi) == phi)
        .expect("unit group modulo an odd prime power is cyclic")
}

/// Least quadratic non-residue modulo an odd prime.
pub fn least_non_residue(p: u64) -> u64 {
    (2..p)
        .find(|&a| quadratic_character(a as i64, p) == -1)
        .expect("odd primes have non-residues")
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl From<Vec<u64>> for GroupElement {
    fn from(v: Vec<u64>) -> Self {
        GroupElement(v)
    }
}

impl std::ops::Index<usize> for GroupElement {
    type Output = u64;
    fn index(&self, i: usize) -> &u64 {
        &self.0[i]
    }
}

/// Direct sum of cyclic groups Z/p^{e_1} + ... + Z/p^{e_k} with e_1 >= ... >= e_k >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianType {
    p: u64,
    exponents: Vec<u32>,
    #[serde(skip)]
    moduli: Vec<u64>,
}

impl AbelianType {
    pub fn new(p: u64, exponents: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if exponents.iter().any(|&e| e == 0) {
            return Err(Error::InvalidType("exponents must be positive".into()));
        }
        if exponents.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidType(format!("exponents {exponents:?} are not non-increasing")));
        }
        let moduli = exponents
            .iter()
            .map(|&e| p.checked_pow(e).ok_or_else(|| Error::InvalidType(format!("{p}^{e} overflows"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(AbelianType { p, exponents, moduli })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// log_p of the group order.
    pub fn order_log(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// log_p of the exponent.
    pub fn exponent_log(&self) -> u32 {
        self.exponents.first().copied().unwrap_or(0)
    }

    pub fn coexponent(&self) -> u32 {
        self.order_log() - self.exponent_log()
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.moduli[i]
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of elements, if it fits in u64.
    pub fn size(&self) -> Option<u64> {
        self.moduli.iter().try_fold(1u64, |acc, &m| acc.checked_mul(m))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn basis(&self, i: usize) -> GroupElement {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        GroupElement(v)
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if x.0.len() != self.rank() {
            return Err(Error::InvalidElement(format!("expected {} coordinates, got {}", self.rank(), x.0.len())));
        }
        for (i, (&c, &m)) in x.0.iter().zip(&self.moduli).enumerate() {
            if c >= m {
                return Err(Error::InvalidElement(format!("coordinate {i} = {c} is not reduced modulo {m}")));
            }
        }
        Ok(())
    }

    /// Reduces arbitrary integers coordinate-wise.
    pub fn element(&self, coords: &[i64]) -> GroupElement {
        GroupElement(coords.iter().zip(&self.moduli).map(|(&c, &m)| reduce_signed(c as i128, m)).collect())
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&y.0).zip(&self.moduli).map(|((&a, &b), &m)| add_mod(a, b, m)).collect())
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&y.0).zip(&self.moduli).map(|((&a, &b), &m)| sub_mod(a, b, m)).collect())
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&self.moduli).map(|(&a, &m)| neg_mod(a, m)).collect())
    }

    pub fn scale(&self, c: u64, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&self.moduli).map(|(&a, &m)| mul_mod(c % m, a, m)).collect())
    }

    /// log_p of the additive order of x.
    pub fn element_order_log(&self, x: &GroupElement) -> u32 {
        x.0.iter()
            .zip(&self.exponents)
            .map(|(&c, &e)| e - valuation(c, self.p, e))
            .max()
            .unwrap_or(0)
    }

    /// Largest h with x in p^h A (the exponent of A for x = 0).
    pub fn height(&self, x: &GroupElement) -> u32 {
        x.0.iter()
            .zip(&self.exponents)
            .map(|(&c, &e)| valuation(c, self.p, e))
            .min()
            .unwrap_or(0)
    }

    /// Mixed-radix index of an element, first coordinate most significant.
    pub fn encode(&self, x: &GroupElement) -> u64 {
        x.0.iter().zip(&self.moduli).fold(0u64, |acc, (&c, &m)| acc * m + c)
    }

    pub fn decode(&self, mut idx: u64) -> GroupElement {
        let mut v = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            v[i] = idx % self.moduli[i];
            idx /= self.moduli[i];
        }
        GroupElement(v)
    }

    /// All elements in index order; only sensible for small groups.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size().expect("group too large to enumerate")).map(move |i| self.decode(i))
    }

    /// Elements of Omega_k(A) = {x : p^k x = 0}.
    pub fn omega_elements(&self, k: u32) -> Vec<GroupElement> {
        let steps: Vec<(u64, u64)> = self
            .exponents
            .iter()
            .map(|&e| {
                let lo = e.saturating_sub(k);
                (self.p.pow(lo), self.p.pow(e - lo))
            })
            .collect();
        let total: u64 = steps.iter().map(|s| s.1).product();
        let mut out = Vec::with_capacity(total as usize);
        for mut idx in 0..total {
            let mut v = vec![0; self.rank()];
            for i in (0..self.rank()).rev() {
                v[i] = (idx % steps[i].1) * steps[i].0;
                idx /= steps[i].1;
            }
            out.push(GroupElement(v));
        }
        out
    }
}

pub fn element_order(x: &GroupElement, a: &AbelianType) -> u64 {
    a.p().pow(a.element_order_log(x))
}

/// Conjugate partition.
pub fn dual_partition(parts: &[u32]) -> Vec<u32> {
    let top = parts.iter().copied().max().unwrap_or(0);
    (1..=top).map(|i| parts.iter().filter(|&&e| e >= i).count() as u32).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeInvariants {
    pub mu: Vec<u32>,
    pub omega: Vec<u32>,
    pub exponent: u32,
    pub coexponent: u32,
}

impl TypeInvariants {
    pub fn from_mu(mu: Vec<u32>) -> Self {
        let omega = dual_partition(&mu);
        let exponent = mu.first().copied().unwrap_or(0);
        let coexponent = mu.iter().sum::<u32>() - exponent;
        TypeInvariants { mu, omega, exponent, coexponent }
    }

    pub fn from_omega(omega: Vec<u32>) -> Self {
        Self::from_mu(dual_partition(&omega))
    }
}

pub fn type_invariants(a: &AbelianType) -> TypeInvariants {
    TypeInvariants::from_mu(a.exponents().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_unit_inverses() {
        let m = PrimePower::new(5, 2).unwrap();
        assert_eq!(unit_inverse(2, m).unwrap(), 13);
        assert_eq!(unit_inverse(7, m).unwrap(), 18);
        assert_eq!(unit_inverse(1, PrimePower::new(7, 3).unwrap()).unwrap(), 1);
        assert!(matches!(unit_inverse(10, m), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn characters_and_roots() {
        assert_eq!(quadratic_character(4, 5), 1);
        assert_eq!(quadratic_character(2, 5), -1);
        assert_eq!(quadratic_character(10, 5), 0);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(11), 2);
        assert_eq!(least_non_residue(5), 2);
        assert_eq!(least_non_residue(7), 3);
        assert_eq!(unit_generator(5, 2), 2);
        // 14 is primitive mod 29 but 14^28 = 1 mod 29^2.
        assert_eq!(multiplicative_order(14, 29 * 29, 29 * 28), 28);
        assert_ne!(unit_generator(29, 2), 14);
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(PrimePower::new(4, 1).is_err());
    }

    #[test]
    fn element_orders() {
        let a = AbelianType::new(5, vec![2, 2, 1]).unwrap();
        assert_eq!(element_order(&GroupElement(vec![5, 0, 1]), &a), 5);
        assert_eq!(element_order(&GroupElement(vec![1, 0, 0]), &a), 25);
        assert_eq!(element_order(&a.zero(), &a), 1);
    }

    #[test]
    fn spec_type_invariants() {
        let t = type_invariants(&AbelianType::new(5, vec![4, 2, 1]).unwrap());
        assert_eq!(t.mu, vec![4, 2, 1]);
        assert_eq!(t.omega, vec![3, 2, 1, 1]);
        assert_eq!(t.coexponent, 3);
        assert_eq!(type_invariants(&AbelianType::new(5, vec![2, 2, 1]).unwrap()).omega, vec![3, 2]);
        let t = type_invariants(&AbelianType::new(3, vec![1]).unwrap());
        assert_eq!((t.omega, t.coexponent), (vec![1], 0));
    }

    #[test]
    fn rejects_bad_types() {
        assert!(AbelianType::new(5, vec![1, 2]).is_err());
        assert!(AbelianType::new(6, vec![1]).is_err());
        assert!(AbelianType::new(5, vec![2, 0]).is_err());
    }

    #[test]
    fn omega_layers_have_expected_size() {
        let a = AbelianType::new(5, vec![2, 2, 1]).unwrap();
        assert_eq!(a.omega_elements(1).len(), 125);
        assert_eq!(a.omega_elements(2).len(), 3125);
        assert!(a.omega_elements(1).iter().all(|x| a.element_order_log(x) <= 1));
    }

    proptest! {
        #[test]
        fn inverse_is_involution(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), k in 1u32..5, a in 1u64..1_000_000) {
            let m = PrimePower::new(p, k).unwrap();
            let a = a % m.modulus();
            prop_assume!(a % p != 0);
            let b = unit_inverse(a, m).unwrap();
            prop_assert_eq!(mul_mod(a, b, m.modulus()), 1 % m.modulus());
            prop_assert_eq!(unit_inverse(b, m).unwrap(), a);
        }

        #[test]
        fn character_is_multiplicative(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), a in 1i64..500, b in 1i64..500) {
            prop_assume!(a % p as i64 != 0 && b % p as i64 != 0);
            prop_assert_eq!(quadratic_character(a * b, p), quadratic_character(a, p) * quadratic_character(b, p));
        }

        #[test]
        fn dual_is_involutive(mut parts in prop::collection::vec(1u32..7, 1..6)) {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let t = TypeInvariants::from_mu(parts.clone());
            prop_assert_eq!(dual_partition(&t.omega), parts.clone());
            prop_assert_eq!(t.omega.iter().sum::<u32>(), parts.iter().sum::<u32>());
            prop_assert!(t.omega.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn order_kills_element(c0 in 0u64..25, c1 in 0u64..25, c2 in 0u64..5) {
            let a = AbelianType::new(5, vec![2, 2, 1]).unwrap();
            let x = GroupElement(vec![c0, c1, c2]);
            let o = element_order(&x, &a);
            prop_assert!(a.scale(o, &x).is_zero());
            if !x.is_zero() {
                prop_assert!(!a.scale(o / 5, &x).is_zero());
            }
        }
    }
}
