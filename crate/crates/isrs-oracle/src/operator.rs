use isrs_model::C64;
use ndarray::Array2;

use crate::{OracleError, Result};

/// One connected component of an operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// Global basis indices, ascending.
    pub indices: Vec<usize>,
    pub matrix: Array2<C64>,
}

/// Operator stored as dense blocks over the connected components of its
/// nonzero pattern. Basis ordering is the one of [`crate::FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    blocks: Vec<Block>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl OperatorMatrix {
    /// Assembles from per-row `(col, value)` lists; duplicates are summed in
    /// insertion order.
    pub(crate) fn from_rows(dim: usize, mut rows: Vec<Vec<(usize, C64)>>, block_cap: usize) -> Result<Self> {
        let mut parent: Vec<usize> = (0..dim).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(OracleError::NonFinite("operator entry"));
                }
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != C64::new(0.0, 0.0));
            for &(c, _) in &merged {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
            *row = merged;
        }
        let mut slot = vec![usize::MAX; dim];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut root_slot = vec![usize::MAX; dim];
        for (i, s) in slot.iter_mut().enumerate() {
            let r = find(&mut parent, i);
            if root_slot[r] == usize::MAX {
                root_slot[r] = members.len();
                members.push(Vec::new());
            }
            *s = members[root_slot[r]].len();
            members[root_slot[r]].push(i);
        }
        let mut blocks = Vec::with_capacity(members.len());
        let mut block_of = vec![0; dim];
        for (b, m) in members.iter().enumerate() {
            if m.len() > block_cap {
                return Err(OracleError::BlockCap { size: m.len(), cap: block_cap });
            }
            for &i in m {
                block_of[i] = b;
            }
        }
        for m in members {
            blocks.push(Block { matrix: Array2::zeros((m.len(), m.len())), indices: m });
        }
        for (r, row) in rows.iter().enumerate() {
            let b = &mut blocks[block_of[r]];
            for &(c, v) in row {
                b.matrix[[slot[r], slot[c]]] = v;
            }
        }
        Ok(Self { dim, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).max().unwrap_or(0)
    }

    /// Nonzero entries `(row, col, value)` in block order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.matrix
                .indexed_iter()
                .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                .map(move |((r, c), v)| (b.indices[r], b.indices[c], *v))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries().next().is_none()
    }

    /// Dense copy of the whole operator; meant for small test systems.
    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.entries() {
            m[[r, c]] = v;
        }
        m
    }

    /// `max |H_rc − conj(H_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let m = &b.matrix;
                let mut e: f64 = 0.0;
                for ((r, c), v) in m.indexed_iter() {
                    e = e.max((v - m[[c, r]].conj()).norm());
                }
                e
            })
            .fold(0.0, f64::max)
    }

    /// `H v`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(OracleError::BasisMismatch { expected: self.dim, got: v.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for b in &self.blocks {
            for (r, &gr) in b.indices.iter().enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for (c, &gc) in b.indices.iter().enumerate() {
                    s += b.matrix[[r, c]] * v[gc];
                }
                out[gr] = s;
            }
        }
        Ok(out)
    }
}
