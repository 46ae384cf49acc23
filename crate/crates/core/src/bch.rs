//! The Baker–Campbell–Hausdorff series log(e^x e^y) through degree 5, and the group
//! words used to invert it.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::free::{eval_word, solve_in_span, LieWord, Tensor, Q};

pub const MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BchTerm {
    pub word: LieWord,
    pub coeff: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BchTable {
    pub degree: usize,
    pub terms: Vec<BchTerm>,
}

const COEFFICIENTS: [(&str, i64, i64); 12] = [
    ("x", 1, 1),
    ("y", 1, 1),
    ("[x,y]", 1, 2),
    ("[x,[x,y]]", 1, 12),
    ("[y,[x,y]]", -1, 12),
    ("[y,[x,[x,y]]]", -1, 24),
    ("[y,[y,[y,[y,x]]]]", -1, 720),
    ("[x,[x,[x,[x,y]]]]", -1, 720),
    ("[x,[y,[y,[y,x]]]]", 1, 360),
    ("[y,[x,[x,[x,y]]]]", 1, 360),
    ("[y,[x,[y,[x,y]]]]", 1, 120),
    ("[x,[y,[x,[y,x]]]]", 1, 120),
];

/// The series truncated at degree D.
pub fn bch_table(degree: usize) -> Result<BchTable> {
    if degree > MAX_DEGREE {
        return Err(Error::DegreeUnsupported(degree));
    }
    let terms = COEFFICIENTS
        .iter()
        .map(|&(w, a, b)| BchTerm { word: LieWord::parse(w).expect("table word"), coeff: Ratio::new(a, b) })
        .filter(|t| t.word.degree() <= degree)
        .collect();
    Ok(BchTable { degree, terms })
}

impl BchTable {
    pub fn coefficient(&self, word: &str) -> Option<Ratio<i64>> {
        let w = LieWord::parse(word)?;
        self.terms.iter().find(|t| t.word == w).map(|t| t.coeff)
    }

    /// Lowest common multiple of the denominators.
    pub fn denominators(&self) -> Vec<i64> {
        self.terms.iter().map(|t| *t.coeff.denom()).collect()
    }

    /// BCH(a, b) in the truncated free algebra.
    pub fn eval(&self, a: &Tensor, b: &Tensor) -> Tensor {
        let vals = [a.clone(), b.clone()];
        let mut out = Tensor::zero(a.degree_bound());
        for t in &self.terms {
            let c = Q::new(*t.coeff.numer() as i128, *t.coeff.denom() as i128);
            out = out.add(&eval_word(&t.word, &vals).scale(c));
        }
        out
    }
}

impl fmt::Display for BchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) {}", t.coeff, t.word)?;
        }
        Ok(())
    }
}

/// BCH(x, BCH(y, z)) = BCH(BCH(x, y), z) and BCH(x, −x) = 0 in the free algebra of class D.
pub fn formal_associativity(degree: usize) -> Result<bool> {
    Ok(table_is_associative(&bch_table(degree)?))
}

pub fn table_is_associative(table: &BchTable) -> bool {
    let d = table.degree;
    let [x, y, z] = [0u8, 1, 2].map(|c| Tensor::letter(d, c));
    let left = table.eval(&table.eval(&x, &y), &z);
    let right = table.eval(&x, &table.eval(&y, &z));
    left == right && table.eval(&x, &x.neg()).is_zero()
}

/// The table agrees with log(exp x · exp y) computed directly.
pub fn matches_exp_log(degree: usize) -> Result<bool> {
    let table = bch_table(degree)?;
    let x = Tensor::letter(degree, 0);
    let y = Tensor::letter(degree, 1);
    Ok(x.exp().mul(&y.exp()).log() == table.eval(&x, &y))
}

/// A group word in x and y built from group commutators (a, b) = a⁻¹b⁻¹ab.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupWord {
    X,
    Y,
    Comm(Box<GroupWord>, Box<GroupWord>),
}

impl GroupWord {
    pub fn comm(a: GroupWord, b: GroupWord) -> GroupWord {
        GroupWord::Comm(Box::new(a), Box::new(b))
    }

    pub fn degree(&self) -> usize {
        match self {
            GroupWord::X | GroupWord::Y => 1,
            GroupWord::Comm(a, b) => a.degree() + b.degree(),
        }
    }

    /// Parses "x", "y", "((y,x),x)" and so on.
    pub fn parse(s: &str) -> Option<GroupWord> {
        fn go(s: &[u8], i: &mut usize) -> Option<GroupWord> {
            let c = *s.get(*i)?;
            *i += 1;
            match c {
                b'x' => Some(GroupWord::X),
                b'y' => Some(GroupWord::Y),
                b'(' => {
                    let a = go(s, i)?;
                    (s.get(*i)? == &b',').then_some(())?;
                    *i += 1;
                    let b = go(s, i)?;
                    (s.get(*i)? == &b')').then_some(())?;
                    *i += 1;
                    Some(GroupWord::comm(a, b))
                }
                _ => None,
            }
        }
        let cleaned: Vec<u8> = s.bytes().filter(|c| !c.is_ascii_whitespace()).collect();
        let mut i = 0;
        let w = go(&cleaned, &mut i)?;
        (i == cleaned.len()).then_some(w)
    }

    /// The word as a group-like element of the free algebra, with x ↦ e^x.
    pub fn to_tensor(&self, degree: usize) -> Tensor {
        match self {
            GroupWord::X => Tensor::letter(degree, 0).exp(),
            GroupWord::Y => Tensor::letter(degree, 1).exp(),
            GroupWord::Comm(a, b) => {
                let (ta, tb) = (a.to_tensor(degree), b.to_tensor(degree));
                let (ia, ib) = (ta.log().neg().exp(), tb.log().neg().exp());
                ia.mul(&ib).mul(&ta).mul(&tb)
            }
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::X => write!(f, "x"),
            GroupWord::Y => write!(f, "y"),
            GroupWord::Comm(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// Basic commutators in x, y of degrees 2 to 5, lowest degree first.
pub fn basic_commutators() -> Vec<GroupWord> {
    use GroupWord::{X, Y};
    let c = GroupWord::comm;
    let yx = c(Y, X);
    let yxx = c(yx.clone(), X);
    let yxy = c(yx.clone(), Y);
    vec![
        yx.clone(),
        yxx.clone(),
        yxy.clone(),
        c(yxx.clone(), X),
        c(yxx.clone(), Y),
        c(yxy.clone(), Y),
        c(c(yxx.clone(), X), X),
        c(c(yxx.clone(), X), Y),
        c(c(yxx.clone(), Y), Y),
        c(c(yxy.clone(), Y), Y),
        c(yxx, yx.clone()),
        c(yxy, yx),
    ]
}

/// Exponents q_k with log(start · Π c_k^{q_k}) = target through degree D, found one
/// degree at a time. Returns None if some degree cannot be corrected.
pub fn derive_corrections(start: &Tensor, target: &Tensor, words: &[GroupWord], degree: usize) -> Option<Vec<(GroupWord, Q)>> {
    let mut current = start.clone();
    let mut out = Vec::new();
    for d in 1..=degree {
        let residual = current.log().sub(target).homogeneous(d);
        if residual.is_zero() {
            continue;
        }
        let cands: Vec<&GroupWord> = words.iter().filter(|w| w.degree() == d).collect();
        let leads: Vec<Tensor> = cands.iter().map(|w| w.to_tensor(degree).log().homogeneous(d)).collect();
        let q = solve_in_span(&leads, &residual.neg())?;
        for (w, qk) in cands.into_iter().zip(q) {
            if !qk.is_zero() {
                current = current.mul(&w.to_tensor(degree).log().scale(qk).exp());
                out.push((w.clone(), qk));
            }
        }
    }
    let ok = current.log() == *target;
    ok.then_some(out)
}

/// x + y as x·y·Π c_k^{q_k}.
pub fn derive_sum_formula(degree: usize) -> Option<Vec<(GroupWord, Q)>> {
    let x = Tensor::letter(degree, 0);
    let y = Tensor::letter(degree, 1);
    derive_corrections(&x.exp().mul(&y.exp()), &x.add(&y), &basic_commutators(), degree)
}

/// [x, y] as (x, y)·Π c_k^{q_k}; note (x, y) = (y, x)⁻¹.
pub fn derive_bracket_formula(degree: usize) -> Option<Vec<(GroupWord, Q)>> {
    let x = Tensor::letter(degree, 0);
    let y = Tensor::letter(degree, 1);
    let start = GroupWord::comm(GroupWord::X, GroupWord::Y).to_tensor(degree);
    derive_corrections(&start, &x.bracket(&y), &basic_commutators(), degree)
}

pub fn q_is_integer(q: &Q) -> bool {
    q.denom().is_one()
}
