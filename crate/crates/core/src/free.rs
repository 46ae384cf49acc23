//! The truncated free associative algebra over Q, used as an exact oracle for the BCH
//! series: the free Lie algebra embeds in it via [a,b] = ab − ba, and exp/log are
//! finite sums once everything above degree D is dropped.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Q = Ratio<i128>;

/// A bracket word in letters 0, 1, 2, ...
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieWord {
    Letter(u8),
    Bracket(Box<LieWord>, Box<LieWord>),
}

impl LieWord {
    pub fn br(a: LieWord, b: LieWord) -> LieWord {
        LieWord::Bracket(Box::new(a), Box::new(b))
    }

    pub fn degree(&self) -> usize {
        match self {
            LieWord::Letter(_) => 1,
            LieWord::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    /// Parses "x", "y", "[x,[x,y]]" and so on, with x, y, z standing for letters 0, 1, 2.
    pub fn parse(s: &str) -> Option<LieWord> {
        fn go(s: &[u8], i: &mut usize) -> Option<LieWord> {
            match s.get(*i)? {
                b'[' => {
                    *i += 1;
                    let a = go(s, i)?;
                    if s.get(*i)? != &b',' {
                        return None;
                    }
                    *i += 1;
                    let b = go(s, i)?;
                    if s.get(*i)? != &b']' {
                        return None;
                    }
                    *i += 1;
                    Some(LieWord::br(a, b))
                }
                c @ b'x'..=b'z' => {
                    *i += 1;
                    Some(LieWord::Letter(c - b'x'))
                }
                _ => None,
            }
        }
        let cleaned: Vec<u8> = s.bytes().filter(|c| !c.is_ascii_whitespace()).collect();
        let mut i = 0;
        let w = go(&cleaned, &mut i)?;
        (i == cleaned.len()).then_some(w)
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieWord::Letter(c) => write!(f, "{}", (b'x' + c) as char),
            LieWord::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Element of the free associative algebra modulo words longer than `degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    degree: usize,
    terms: BTreeMap<Vec<u8>, Q>,
}

impl Tensor {
    pub fn zero(degree: usize) -> Self {
        Tensor { degree, terms: BTreeMap::new() }
    }

    pub fn one(degree: usize) -> Self {
        Self::monomial(degree, Vec::new(), Q::one())
    }

    pub fn letter(degree: usize, c: u8) -> Self {
        Self::monomial(degree, vec![c], Q::one())
    }

    pub fn monomial(degree: usize, word: Vec<u8>, c: Q) -> Self {
        let mut t = Self::zero(degree);
        if word.len() <= degree && !c.is_zero() {
            t.terms.insert(word, c);
        }
        t
    }

    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, Q> {
        &self.terms
    }

    pub fn coefficient(&self, word: &[u8]) -> Q {
        self.terms.get(word).copied().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, word: Vec<u8>, c: Q) {
        if c.is_zero() || word.len() > self.degree {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: Q) -> Tensor {
        let mut out = Tensor::zero(self.degree);
        for (w, &v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn neg(&self) -> Tensor {
        self.scale(-Q::one())
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Tensor) -> Tensor {
        let mut out = Tensor::zero(self.degree.min(other.degree));
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if a.len() + b.len() <= out.degree {
                    let mut w = a.clone();
                    w.extend_from_slice(b);
                    out.add_term(w, ca * cb);
                }
            }
        }
        out
    }

    pub fn bracket(&self, other: &Tensor) -> Tensor {
        self.mul(other).sub(&other.mul(self))
    }

    /// Part of exact word length d.
    pub fn homogeneous(&self, d: usize) -> Tensor {
        Tensor {
            degree: self.degree,
            terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, &c)| (w.clone(), c)).collect(),
        }
    }

    pub fn constant(&self) -> Q {
        self.coefficient(&[])
    }

    /// exp(a) for a without constant term.
    pub fn exp(&self) -> Tensor {
        assert!(self.constant().is_zero(), "exp needs a vanishing constant term");
        let mut out = Tensor::one(self.degree);
        let mut power = Tensor::one(self.degree);
        let mut fact = Q::one();
        for k in 1..=self.degree {
            power = power.mul(self);
            fact *= Q::from_integer(k as i128);
            out = out.add(&power.scale(fact.recip()));
        }
        out
    }

    /// log(g) for g with constant term 1.
    pub fn log(&self) -> Tensor {
        assert!(self.constant().is_one(), "log needs constant term 1");
        let b = self.sub(&Tensor::one(self.degree));
        let mut out = Tensor::zero(self.degree);
        let mut power = Tensor::one(self.degree);
        for k in 1..=self.degree {
            power = power.mul(&b);
            let sign = if k % 2 == 1 { Q::one() } else { -Q::one() };
            out = out.add(&power.scale(sign / Q::from_integer(k as i128)));
        }
        out
    }
}

/// Value of a bracket word with letter i replaced by `values[i]`.
pub fn eval_word(w: &LieWord, values: &[Tensor]) -> Tensor {
    match w {
        LieWord::Letter(c) => values[*c as usize].clone(),
        LieWord::Bracket(a, b) => eval_word(a, values).bracket(&eval_word(b, values)),
    }
}

/// Solves Σ q_k·basis_k = target exactly; None if the target is outside the span.
pub fn solve_in_span(basis: &[Tensor], target: &Tensor) -> Option<Vec<Q>> {
    let mut words: Vec<Vec<u8>> = basis.iter().chain(std::iter::once(target)).flat_map(|t| t.terms.keys().cloned()).collect();
    words.sort();
    words.dedup();
    let n = basis.len();
    // Rows indexed by words, columns by basis elements plus the target.
    let mut rows: Vec<Vec<Q>> = words
        .iter()
        .map(|w| {
            let mut row: Vec<Q> = basis.iter().map(|b| b.coefficient(w)).collect();
            row.push(target.coefficient(w));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else { continue };
        rows.swap(r, k);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let f = rows[k][c];
                let pivot_row = rows[r].clone();
                for (a, b) in rows[k].iter_mut().zip(pivot_row) {
                    *a -= f * b;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut q = vec![Q::zero(); n];
    for (k, &c) in pivots.iter().enumerate() {
        q[c] = rows[k][n];
    }
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_inverse() {
        let x = Tensor::letter(5, 0);
        let y = Tensor::letter(5, 1);
        let a = x.add(&y.mul(&x).scale(Q::new(3, 7)));
        assert_eq!(a.exp().log(), a);
        assert_eq!(a.exp().mul(&a.neg().exp()), Tensor::one(5));
    }

    #[test]
    fn jacobi_in_the_oracle() {
        let v: Vec<Tensor> = (0..3).map(|c| Tensor::letter(4, c)).collect();
        let j = v[0]
            .bracket(&v[1].bracket(&v[2]))
            .add(&v[1].bracket(&v[2].bracket(&v[0])))
            .add(&v[2].bracket(&v[0].bracket(&v[1])));
        assert!(j.is_zero());
    }

    #[test]
    fn word_parsing_roundtrip() {
        let w = LieWord::parse("[y,[x,[x,y]]]").unwrap();
        assert_eq!(w.degree(), 4);
        assert_eq!(w.to_string(), "[y,[x,[x,y]]]");
        assert!(LieWord::parse("[x,y").is_none());
    }

    #[test]
    fn span_solver() {
        let x = Tensor::letter(3, 0);
        let y = Tensor::letter(3, 1);
        let xy = x.bracket(&y);
        let target = xy.scale(Q::new(5, 2));
        assert_eq!(solve_in_span(&[xy.clone()], &target), Some(vec![Q::new(5, 2)]));
        assert_eq!(solve_in_span(&[xy], &x), None);
    }
}
