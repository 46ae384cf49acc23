//! The group law on a nilpotent Lie ring of class below p given by the truncated BCH
//! series, and the reverse passage from such a group back to its Lie ring.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bch::{bch_table, GroupWord, MAX_DEGREE};
use crate::error::{Error, Result};
use crate::free::LieWord;
use crate::group::{Elem, FiniteGroup};
use crate::liering::LieRing;
use crate::residue::{add_mod, inverse_mod, mul_mod, reduce_signed, AbelianType, GroupElement};

const MAX_RANK: usize = 8;
const MAX_NODES: usize = 32;

enum Node {
    Letter(usize),
    Bracket(usize, usize),
}

/// A nilpotent Lie ring with multiplication x·y = BCH(x, y).
pub struct LazardGroup {
    ring: LieRing,
    class: usize,
    nodes: Vec<Node>,
    /// (node, coefficient reduced modulo the additive exponent)
    terms: Vec<(usize, u64)>,
}

fn compile(word: &LieWord, nodes: &mut Vec<Node>, seen: &mut HashMap<LieWord, usize>) -> usize {
    if let Some(&k) = seen.get(word) {
        return k;
    }
    let node = match word {
        LieWord::Letter(c) => Node::Letter(*c as usize),
        LieWord::Bracket(a, b) => {
            let (a, b) = (compile(a, nodes, seen), compile(b, nodes, seen));
            Node::Bracket(a, b)
        }
    };
    nodes.push(node);
    seen.insert(word.clone(), nodes.len() - 1);
    nodes.len() - 1
}

impl LazardGroup {
    pub fn new(ring: &LieRing) -> Result<Self> {
        let p = ring.p();
        let class = ring.class()?;
        if class as u64 >= p {
            return Err(Error::ClassTooHigh { class, p });
        }
        if class > MAX_DEGREE {
            return Err(Error::DegreeUnsupported(class));
        }
        if ring.rank() > MAX_RANK {
            return Err(Error::TooLarge(format!("rank {} exceeds {MAX_RANK}", ring.rank())));
        }
        let table = bch_table(class.max(1))?;
        let modulus = p.pow(ring.ty().exponent_log());
        let mut nodes = Vec::new();
        let mut seen = HashMap::new();
        let mut terms = Vec::new();
        for t in &table.terms {
            let den = *t.coeff.denom();
            let inv = inverse_mod(reduce_signed(den as i128, modulus), modulus).ok_or(Error::DenominatorNotInvertible(den))?;
            let c = mul_mod(reduce_signed(*t.coeff.numer() as i128, modulus), inv, modulus);
            terms.push((compile(&t.word, &mut nodes, &mut seen), c));
        }
        debug_assert!(nodes.len() <= MAX_NODES);
        Ok(LazardGroup { ring: ring.clone(), class, nodes, terms })
    }

    pub fn ring(&self) -> &LieRing {
        &self.ring
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn carrier(&self) -> &AbelianType {
        self.ring.ty()
    }
}

impl FiniteGroup for LazardGroup {
    fn p(&self) -> u64 {
        self.ring.p()
    }

    fn order_log(&self) -> u32 {
        self.ring.order_log()
    }

    fn identity(&self) -> Elem {
        vec![0; self.ring.rank()]
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Elem {
        let r = self.ring.rank();
        let moduli = self.ring.ty().moduli();
        let mut vals = [[0u64; MAX_RANK]; MAX_NODES];
        for (k, node) in self.nodes.iter().enumerate() {
            match *node {
                Node::Letter(0) => vals[k][..r].copy_from_slice(a),
                Node::Letter(_) => vals[k][..r].copy_from_slice(b),
                Node::Bracket(i, j) => {
                    if vals[i][..r].iter().any(|&c| c != 0) && vals[j][..r].iter().any(|&c| c != 0) {
                        let (lo, hi) = vals.split_at_mut(k);
                        self.ring.bracket_into(&lo[i][..r], &lo[j][..r], &mut hi[0][..r]);
                    }
                }
            }
        }
        let mut out = vec![0; r];
        for &(node, c) in &self.terms {
            for ((o, &v), &m) in out.iter_mut().zip(&vals[node][..r]).zip(moduli) {
                if v != 0 {
                    *o = add_mod(*o, mul_mod(c % m, v, m), m);
                }
            }
        }
        out
    }

    fn inv(&self, a: &[u64]) -> Elem {
        self.ring.ty().neg(&GroupElement(a.to_vec())).0
    }

    fn index(&self, a: &[u64]) -> u64 {
        a.iter().zip(self.ring.ty().moduli()).fold(0, |acc, (&c, &m)| acc * m + c)
    }

    fn element(&self, idx: u64) -> Elem {
        self.ring.ty().decode(idx).0
    }

    fn generators(&self) -> Vec<Elem> {
        (0..self.ring.rank()).map(|i| self.ring.ty().basis(i).0).collect()
    }
}

pub fn group_from_liering(ring: &LieRing) -> Result<LazardGroup> {
    LazardGroup::new(ring)
}

/// x + y = x·y·Π c^q, with (a, b) = a⁻¹b⁻¹ab and the factors taken in order.
pub const SUM_FORMULA: [(&str, i64, i64); 11] = [
    ("(y,x)", 1, 2),
    ("((y,x),x)", -1, 12),
    ("((y,x),y)", 1, 12),
    ("(((y,x),x),x)", 1, 24),
    ("(((y,x),y),y)", -1, 24),
    ("((((y,x),x),x),x)", -19, 720),
    ("((((y,x),x),x),y)", -1, 720),
    ("((((y,x),x),y),y)", 1, 720),
    ("((((y,x),y),y),y)", 19, 720),
    ("(((y,x),x),(y,x))", 1, 20),
    ("(((y,x),y),(y,x))", -23, 720),
];

/// [x, y] = (x, y)·Π c^q.
pub const BRACKET_FORMULA: [(&str, i64, i64); 11] = [
    ("((y,x),x)", 1, 2),
    ("((y,x),y)", 1, 2),
    ("(((y,x),x),x)", -1, 3),
    ("(((y,x),x),y)", -1, 4),
    ("(((y,x),y),y)", -1, 3),
    ("((((y,x),x),x),x)", 1, 4),
    ("((((y,x),x),x),y)", 1, 6),
    ("((((y,x),x),y),y)", 1, 6),
    ("((((y,x),y),y),y)", 1, 4),
    ("(((y,x),x),(y,x))", -7, 12),
    ("(((y,x),y),(y,x))", -1, 2),
];

fn eval_group_word<G: FiniteGroup + ?Sized>(g: &G, w: &GroupWord, x: &[u64], y: &[u64]) -> Elem {
    match w {
        GroupWord::X => x.to_vec(),
        GroupWord::Y => y.to_vec(),
        GroupWord::Comm(a, b) => g.comm(&eval_group_word(g, a, x, y), &eval_group_word(g, b, x, y)),
    }
}

/// t^{a/b}, read modulo the order of t.
fn rational_power<G: FiniteGroup + ?Sized>(g: &G, t: &[u64], a: i64, b: i64) -> Result<Elem> {
    let p = g.p();
    let mut order = 1u64;
    let mut s = t.to_vec();
    while !g.is_identity(&s) {
        s = g.pow(&s, p);
        order *= p;
    }
    if order == 1 {
        return Ok(g.identity());
    }
    let inv = inverse_mod(reduce_signed(b as i128, order), order).ok_or(Error::DenominatorNotInvertible(b))?;
    Ok(g.pow(t, mul_mod(reduce_signed(a as i128, order), inv, order)))
}

fn formula(table: &[(&str, i64, i64)], degree: usize) -> Vec<(GroupWord, i64, i64)> {
    table
        .iter()
        .map(|&(w, a, b)| (GroupWord::parse(w).expect("formula word"), a, b))
        .filter(|(w, _, _)| w.degree() <= degree)
        .collect()
}

/// Reconstructs addition and bracket on the carrier of a group of class ≤ degree < p.
pub struct Reconstruction<'a, G: FiniteGroup + ?Sized> {
    group: &'a G,
    sum: Vec<(GroupWord, i64, i64)>,
    bracket: Vec<(GroupWord, i64, i64)>,
}

impl<'a, G: FiniteGroup + ?Sized> Reconstruction<'a, G> {
    pub fn new(group: &'a G, degree: usize) -> Result<Self> {
        let p = group.p();
        if degree as u64 >= p {
            return Err(Error::ClassTooHigh { class: degree, p });
        }
        if degree > MAX_DEGREE {
            return Err(Error::DegreeUnsupported(degree));
        }
        let (sum, bracket) = (formula(&SUM_FORMULA, degree), formula(&BRACKET_FORMULA, degree));
        for &(_, _, b) in sum.iter().chain(&bracket) {
            if b as u64 % p == 0 {
                return Err(Error::DenominatorNotInvertible(b));
            }
        }
        Ok(Reconstruction { group, sum, bracket })
    }

    fn corrected(&self, mut acc: Elem, corrections: &[(GroupWord, i64, i64)], x: &[u64], y: &[u64]) -> Result<Elem> {
        for (w, a, b) in corrections {
            let t = eval_group_word(self.group, w, x, y);
            acc = self.group.mul(&acc, &rational_power(self.group, &t, *a, *b)?);
        }
        Ok(acc)
    }

    pub fn sum(&self, x: &[u64], y: &[u64]) -> Result<Elem> {
        self.corrected(self.group.mul(x, y), &self.sum, x, y)
    }

    pub fn bracket(&self, x: &[u64], y: &[u64]) -> Result<Elem> {
        self.corrected(self.group.comm(x, y), &self.bracket, x, y)
    }
}

/// The Lie ring on `carrier` whose group law is that of `group`.
///
/// Brackets of basis elements are read off through the inverse series; the result is
/// accepted only if the reconstructed sum is the carrier's addition and the
/// reconstructed bracket is bilinear on every tested pair.
pub fn bracket_from_group<G: FiniteGroup + ?Sized>(group: &G, carrier: &AbelianType, degree: usize, seed: u64) -> Result<LieRing> {
    let rec = Reconstruction::new(group, degree)?;
    let r = carrier.rank();
    let basis: Vec<Elem> = (0..r).map(|i| carrier.basis(i).0).collect();
    let mut brackets = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            brackets.push(((i, j), GroupElement(rec.bracket(&basis[i], &basis[j])?)));
        }
    }
    let ring = LieRing::new(carrier.clone(), &brackets).map_err(|e| Error::ReconstructionDivergence(format!("reconstructed table is not a Lie ring: {e}")))?;

    let size = group.size();
    let pairs: Vec<(u64, u64)> = if size <= 125 {
        (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<(u64, u64)> = (0..r as u64).flat_map(|i| (0..r as u64).map(move |j| (i, j))).map(|(i, j)| (group.index(&basis[i as usize]), group.index(&basis[j as usize]))).collect();
        v.extend((0..256).map(|_| (rng.gen_range(0..size), rng.gen_range(0..size))));
        v
    };
    for (a, b) in pairs {
        let (x, y) = (group.element(a), group.element(b));
        let (gx, gy) = (GroupElement(x.clone()), GroupElement(y.clone()));
        if rec.sum(&x, &y)? != carrier.add(&gx, &gy).0 {
            return Err(Error::ReconstructionDivergence(format!("sum of elements {a} and {b} differs from the carrier addition")));
        }
        if rec.bracket(&x, &y)? != ring.bracket(&gx, &gy).0 {
            return Err(Error::ReconstructionDivergence(format!("bracket of elements {a} and {b} is not bilinear")));
        }
    }
    Ok(ring)
}

/// Whether passing to the group and back returns the same bracket table.
pub fn roundtrip(ring: &LieRing, seed: u64) -> Result<bool> {
    let g = LazardGroup::new(ring)?;
    let back = bracket_from_group(&g, ring.ty(), g.class().max(1), seed)?;
    Ok(back == *ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::{derive_bracket_formula, derive_sum_formula};
    use crate::census::{ring_v, ring_w, ring_x};
    use crate::free::Q;
    use crate::group::{associativity_failures, class, closure, exponent_log, identity_and_inverse_hold};

    fn as_q(table: &[(&str, i64, i64)]) -> Vec<(GroupWord, Q)> {
        table.iter().map(|&(w, a, b)| (GroupWord::parse(w).unwrap(), Q::new(a as i128, b as i128))).collect()
    }

    #[test]
    fn formulas_match_the_free_algebra() {
        assert_eq!(derive_sum_formula(5).unwrap(), as_q(&SUM_FORMULA));
        assert_eq!(derive_bracket_formula(5).unwrap(), as_q(&BRACKET_FORMULA));
    }

    #[test]
    fn abelian_ring_gives_addition() {
        let x = ring_x(5);
        let g = group_from_liering(&x).unwrap();
        for (a, b) in [(3u64, 17u64), (100, 124), (57, 57)] {
            let (ea, eb) = (x.ty().decode(a), x.ty().decode(b));
            assert_eq!(g.mul(&ea.0, &eb.0), x.ty().add(&ea, &eb).0);
        }
        assert!(roundtrip(&x, 1).unwrap());
    }

    #[test]
    fn spec_v_group() {
        let v = ring_v(5);
        let g = group_from_liering(&v).unwrap();
        assert_eq!(exponent_log(&g).unwrap(), 2);
        assert_eq!(class(&g).unwrap(), v.class().unwrap());
        let gens = g.generators();
        let comms: Vec<Elem> = gens.iter().flat_map(|a| gens.iter().map(|b| g.comm(a, b))).collect();
        assert_eq!(closure(&g, &comms).len(), 5);
        assert_eq!(associativity_failures(&g, 20_000, 3), 0);
        assert!(identity_and_inverse_hold(&g));
    }

    #[test]
    fn roundtrips() {
        for ring in [ring_v(5), ring_w(5), ring_v(7), ring_w(7)] {
            assert!(roundtrip(&ring, 7).unwrap());
        }
    }

    #[test]
    fn class_gate() {
        // Heisenberg-type ring of class 2 at p = 2.
        let ty = AbelianType::new(2, vec![1, 1, 1]).unwrap();
        let h = LieRing::new(ty, &[((0, 1), GroupElement(vec![0, 0, 1]))]).unwrap();
        assert!(matches!(LazardGroup::new(&h), Err(Error::ClassTooHigh { class: 2, p: 2 })));
        let v = ring_v(5);
        let g = group_from_liering(&v).unwrap();
        assert!(matches!(bracket_from_group(&g, v.ty(), 5, 0), Err(Error::ClassTooHigh { .. })));
    }

    #[test]
    fn wrong_carrier_diverges() {
        // Reading the group law of V with the bracket dropped cannot close up.
        let v = ring_v(5);
        let g = group_from_liering(&v).unwrap();
        assert!(bracket_from_group(&g, v.ty(), 1, 0).is_err());
    }
}
