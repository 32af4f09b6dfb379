//! Finite abelian groups given by generators: exhaustive enumeration,
//! Smith normal form of the relation lattice, and a discrete-log table.

use std::collections::HashMap;
use std::hash::Hash;

/// Smith normal form `U A V = D` of a square integer matrix; only `V` and `V^{-1}` are kept.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<i128>,
    pub v: Vec<Vec<i128>>,
    pub v_inv: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

/// Smith normal form of an `n x n` nonsingular matrix.
pub fn smith_normal_form(mut a: Vec<Vec<i128>>) -> Smith {
    let n = a.len();
    let mut v = identity(n);
    let mut vi = identity(n);

    // column j <- column j + c * column i, tracked in V and V^{-1}
    fn col_add(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vi: &mut [Vec<i128>], j: usize, i: usize, c: i128) {
        for row in a.iter_mut() {
            row[j] += c * row[i];
        }
        for row in v.iter_mut() {
            row[j] += c * row[i];
        }
        // inverse op acts on rows of V^{-1}: row i <- row i - c * row j
        let rj = vi[j].clone();
        for (x, y) in vi[i].iter_mut().zip(rj) {
            *x -= c * y;
        }
    }
    fn col_swap(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vi: &mut [Vec<i128>], i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vi.swap(i, j);
    }
    fn col_neg(a: &mut [Vec<i128>], v: &mut [Vec<i128>], vi: &mut [Vec<i128>], i: usize) {
        for row in a.iter_mut() {
            row[i] = -row[i];
        }
        for row in v.iter_mut() {
            row[i] = -row[i];
        }
        for x in vi[i].iter_mut() {
            *x = -*x;
        }
    }
    fn row_add(a: &mut [Vec<i128>], j: usize, i: usize, c: i128) {
        let ri = a[i].clone();
        for (x, y) in a[j].iter_mut().zip(ri) {
            *x += c * y;
        }
    }

    for t in 0..n {
        loop {
            // pivot: smallest nonzero entry in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            col_swap(&mut a, &mut v, &mut vi, t, pj);
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                row_add(&mut a, i, t, -q);
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                col_add(&mut a, &mut v, &mut vi, j, t, -q);
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any entry not divisible by the pivot into row t
            let mut bad = None;
            for i in t + 1..n {
                for j in t + 1..n {
                    if a[i][j] % a[t][t] != 0 {
                        bad = Some(i);
                    }
                }
            }
            match bad {
                Some(i) => row_add(&mut a, t, i, 1),
                None => break,
            }
        }
        if a[t][t] < 0 {
            col_neg(&mut a, &mut v, &mut vi, t);
        }
    }
    Smith {
        diag: (0..n).map(|i| a[i][i]).collect(),
        v,
        v_inv: vi,
    }
}

/// A finite abelian group with a complete discrete-log table.
#[derive(Clone, Debug)]
pub struct FiniteAbelian<E: Eq + Hash + Clone> {
    /// Invariant factors (all > 1).
    orders: Vec<u64>,
    /// Generators realizing the invariant factors.
    gens: Vec<E>,
    /// Element -> mixed-radix index of its coordinates.
    table: HashMap<E, u64>,
}

impl<E: Eq + Hash + Clone> FiniteAbelian<E> {
    /// Enumerates the group generated by `raw_gens` under `op`.
    pub fn generate<F: Fn(&E, &E) -> E>(identity: E, raw_gens: &[E], op: F) -> Self {
        let r = raw_gens.len();
        let mut elems: Vec<(E, Vec<i128>)> = vec![(identity.clone(), vec![0; r])];
        let mut index: HashMap<E, usize> = HashMap::new();
        index.insert(identity.clone(), 0);
        let mut rel = vec![vec![0i128; r]; r];
        for (i, g) in raw_gens.iter().enumerate() {
            // smallest m with g^m in the current subgroup
            let mut m = 1usize;
            let mut gm = g.clone();
            while !index.contains_key(&gm) {
                gm = op(&gm, g);
                m += 1;
            }
            let hit = &elems[index[&gm]].1;
            for j in 0..r {
                rel[i][j] = -hit[j];
            }
            rel[i][i] += m as i128;
            let base_len = elems.len();
            let mut shift = g.clone();
            for k in 1..m {
                for idx in 0..base_len {
                    let (e, x) = &elems[idx];
                    let ne = op(e, &shift);
                    let mut nx = x.clone();
                    nx[i] = k as i128;
                    index.insert(ne.clone(), elems.len());
                    elems.push((ne, nx));
                }
                shift = op(&shift, g);
            }
        }
        let total = elems.len() as i128;
        let s = smith_normal_form(rel);
        let keep: Vec<usize> = (0..r).filter(|&j| s.diag[j] > 1).collect();
        let orders: Vec<u64> = keep.iter().map(|&j| s.diag[j] as u64).collect();
        let pow = |g: &E, e: i128| -> E {
            let mut acc = identity.clone();
            for _ in 0..e.rem_euclid(total) {
                acc = op(&acc, g);
            }
            acc
        };
        let gens: Vec<E> = keep
            .iter()
            .map(|&j| {
                (0..r).fold(identity.clone(), |acc, i| op(&acc, &pow(&raw_gens[i], s.v_inv[j][i])))
            })
            .collect();
        let mut table = HashMap::with_capacity(elems.len());
        for (e, x) in elems {
            let mut idx = 0u64;
            for (&j, &d) in keep.iter().zip(&orders) {
                let y: i128 = (0..r).map(|i| x[i] * s.v[i][j]).sum();
                idx = idx * d + y.rem_euclid(d as i128) as u64;
            }
            table.insert(e, idx);
        }
        FiniteAbelian { orders, gens, table }
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.orders
    }

    pub fn generators(&self) -> &[E] {
        &self.gens
    }

    /// Coordinates of `e` with respect to [`Self::generators`].
    pub fn dlog(&self, e: &E) -> Option<Vec<u64>> {
        self.table.get(e).map(|&i| self.decode(i))
    }

    fn decode(&self, mut idx: u64) -> Vec<u64> {
        let mut out = vec![0; self.orders.len()];
        for (k, &d) in self.orders.iter().enumerate().rev() {
            out[k] = idx % d;
            idx /= d;
        }
        out
    }

    /// All elements, sorted by coordinate index.
    pub fn elements(&self) -> Vec<(E, Vec<u64>)> {
        let mut v: Vec<(&E, u64)> = self.table.iter().map(|(e, &i)| (e, i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v.into_iter().map(|(e, i)| (e.clone(), self.decode(i))).collect()
    }

    pub fn contains(&self, e: &E) -> bool {
        self.table.contains_key(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_small() {
        let s = smith_normal_form(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(s.diag, vec![2, 4]);
        let s = smith_normal_form(vec![vec![4, 0], vec![0, 6]]);
        assert_eq!(s.diag, vec![2, 12]);
    }

    #[test]
    fn v_times_v_inv_is_identity() {
        let s = smith_normal_form(vec![vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]]);
        for i in 0..3 {
            for j in 0..3 {
                let x: i128 = (0..3).map(|k| s.v[i][k] * s.v_inv[k][j]).sum();
                assert_eq!(x, i128::from(i == j));
            }
        }
    }

    #[test]
    fn units_mod_24() {
        // (Z/24)^* = Z/2 x Z/2 x Z/2
        let g = FiniteAbelian::generate(1u64, &[5, 7, 13, 11], |a, b| a * b % 24);
        assert_eq!(g.order(), 8);
        assert_eq!(g.invariants(), &[2, 2, 2]);
        for (i, gen) in g.generators().iter().enumerate() {
            let mut e = vec![0; 3];
            e[i] = 1;
            assert_eq!(g.dlog(gen).unwrap(), e);
        }
    }

    #[test]
    fn cyclic_from_redundant_generators() {
        let g = FiniteAbelian::generate(0u64, &[4, 6], |a, b| (a + b) % 12);
        assert_eq!(g.invariants(), &[6]);
        let gen = g.generators()[0];
        let d = g.dlog(&((gen * 5) % 12)).unwrap();
        assert_eq!(d, vec![5]);
    }
}
