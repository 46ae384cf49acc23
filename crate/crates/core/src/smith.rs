//! Smith normal form over Z/p^top with tracked column transforms.
//!
//! For a generator matrix M (rows are generators) we find a row transform R and
//! an invertible column transform V with R·M·V diagonal. The row space of M is then
//! spanned by d_k·(row k of V⁻¹), which gives independent generators and coordinates
//! x ↦ (x·V)_k / d_k.

use crate::residue::{inverse_mod, mul_mod, sub_mod, add_mod, valuation};

#[derive(Debug, Clone)]
pub struct Smith {
    pub p: u64,
    pub top: u32,
    /// Valuation of the k-th diagonal entry (top when it is zero), one per column.
    pub vals: Vec<u32>,
    pub v: Vec<Vec<u64>>,
    pub v_inv: Vec<Vec<u64>>,
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn smith(rows: &[Vec<u64>], ncols: usize, p: u64, top: u32) -> Smith {
    let q = p.pow(top);
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % q).collect()).collect();
    let mut v = identity(ncols);
    let mut v_inv = identity(ncols);
    let mut vals = vec![top; ncols];
    let nrows = m.len();
    for t in 0..ncols.min(nrows) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let val = valuation(x, p, top);
                    if best.map_or(true, |b| val < b.2) {
                        best = Some((i, j, val));
                    }
                }
            }
        }
        let Some((bi, bj, val)) = best else { break };
        m.swap(t, bi);
        if bj != t {
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            v_inv.swap(t, bj);
        }
        let pv = p.pow(val);
        let unit = m[t][t] / pv;
        let uinv = inverse_mod(unit, q).expect("unit part is invertible");
        for x in m[t].iter_mut() {
            *x = mul_mod(*x, uinv, q);
        }
        for i in t + 1..nrows {
            let f = m[i][t] / pv;
            if f == 0 {
                continue;
            }
            for j in t..ncols {
                let d = mul_mod(f, m[t][j], q);
                m[i][j] = sub_mod(m[i][j], d, q);
            }
        }
        for j in t + 1..ncols {
            let f = m[t][j] / pv;
            if f == 0 {
                continue;
            }
            m[t][j] = 0;
            for row in v.iter_mut() {
                let d = mul_mod(f, row[t], q);
                row[j] = sub_mod(row[j], d, q);
            }
            for c in 0..ncols {
                let d = mul_mod(f, v_inv[j][c], q);
                v_inv[t][c] = add_mod(v_inv[t][c], d, q);
            }
        }
        vals[t] = val;
    }
    Smith { p, top, vals, v, v_inv }
}

impl Smith {
    /// x·V modulo p^top.
    pub fn transform(&self, x: &[u64]) -> Vec<u64> {
        let q = self.p.pow(self.top);
        let n = self.v.len();
        let mut out = vec![0u64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (o, &vij) in out.iter_mut().zip(&self.v[i]) {
                *o = add_mod(*o, mul_mod(xi % q, vij, q), q);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &[Vec<u64>], b: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
        a.iter()
            .map(|row| {
                (0..b[0].len())
                    .map(|j| row.iter().zip(b).fold(0, |acc, (&x, brow)| add_mod(acc, mul_mod(x, brow[j], q), q)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn transforms_are_inverse() {
        let rows = vec![vec![5, 10, 3], vec![0, 25, 15], vec![7, 0, 50]];
        let s = smith(&rows, 3, 5, 3);
        let prod = matmul(&s.v, &s.v_inv, 125);
        assert_eq!(prod, identity(3));
    }

    #[test]
    fn diagonal_of_known_matrix() {
        // Row space of diag(5, 25) with an extra generator 1 in col 0: invariants 1, 25.
        let rows = vec![vec![5, 0], vec![0, 25], vec![1, 0]];
        let s = smith(&rows, 2, 5, 3);
        assert_eq!(s.vals, vec![0, 2]);
    }
}
