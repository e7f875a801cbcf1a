//! Windowed co-occurrence counting over a walk corpus.

use crate::walks::WalkCorpus;
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;

/// Above this node count the matrix switches to hashed pair storage.
const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    Dense(Vec<u64>),
    Sparse(HashMap<(u32, u32), u64>),
}

/// Symmetric nonnegative integer matrix of windowed co-occurrence counts,
/// with cached row sums and total.
#[derive(Debug, Clone)]
pub struct CooccurrenceMatrix {
    n: usize,
    storage: Storage,
    row_sums: Vec<u64>,
    total: u64,
    window: (usize, usize),
}

impl CooccurrenceMatrix {
    fn empty(n: usize, window: (usize, usize)) -> Self {
        let storage = if n <= DENSE_LIMIT {
            Storage::Dense(vec![0; n * n])
        } else {
            Storage::Sparse(HashMap::new())
        };
        CooccurrenceMatrix {
            n,
            storage,
            row_sums: vec![0; n],
            total: 0,
            window,
        }
    }

    fn add(&mut self, i: u32, j: u32, count: u64) {
        match &mut self.storage {
            Storage::Dense(values) => values[i as usize * self.n + j as usize] += count,
            Storage::Sparse(map) => *map.entry((i, j)).or_insert(0) += count,
        }
        self.row_sums[i as usize] += count;
        self.total += count;
    }

    /// Test constructor for hand-written count matrices.
    #[cfg(test)]
    pub(crate) fn from_dense(n: usize, window: (usize, usize), values: Vec<u64>) -> Self {
        assert_eq!(values.len(), n * n);
        let mut c = CooccurrenceMatrix {
            n,
            storage: Storage::Dense(values),
            row_sums: vec![0; n],
            total: 0,
            window,
        };
        let mut sums = vec![0; n];
        let mut total = 0;
        for i in 0..n {
            for j in 0..n {
                let v = c.entry(i, j);
                sums[i] += v;
                total += v;
            }
        }
        c.row_sums = sums;
        c.total = total;
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        match &self.storage {
            Storage::Dense(values) => values[i * self.n + j],
            Storage::Sparse(map) => *map.get(&(i as u32, j as u32)).unwrap_or(&0),
        }
    }

    /// Sum of row `i`; equals the column sum by symmetry.
    pub fn row_sum(&self, i: usize) -> u64 {
        self.row_sums[i]
    }

    /// Sum of all entries.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// CSV export of the upper triangle (including the diagonal): one
    /// `i,j,count` line per nonzero entry with i <= j, sorted.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,count\n");
        let mut cells: Vec<(u32, u32, u64)> = Vec::new();
        match &self.storage {
            Storage::Dense(values) => {
                for i in 0..self.n {
                    for j in i..self.n {
                        let c = values[i * self.n + j];
                        if c > 0 {
                            cells.push((i as u32, j as u32, c));
                        }
                    }
                }
            }
            Storage::Sparse(map) => {
                for (&(i, j), &c) in map {
                    if i <= j && c > 0 {
                        cells.push((i, j, c));
                    }
                }
                cells.sort_unstable();
            }
        }
        for (i, j, c) in cells {
            out.push_str(&format!("{i},{j},{c}\n"));
        }
        out
    }
}

/// Accumulates the co-occurrence matrix of a corpus over offsets
/// `t_l..=t_u`: both orderings of each position pair are counted, so the
/// result is symmetric by construction.
///
/// Walks are counted in thread-local accumulators and merged; integer
/// addition commutes, so any thread count produces bit-identical output.
pub fn accumulate(corpus: &WalkCorpus, t_l: usize, t_u: usize) -> Result<CooccurrenceMatrix> {
    let l = corpus.params().l;
    if t_l < 1 || t_l > t_u || t_u > l.saturating_sub(1) {
        return Err(Error::InvalidWindow { t_l, t_u, l });
    }
    let n = corpus.n();
    let window = (t_l, t_u);
    let chunk = 512.max(corpus.walks().len() / 256 + 1);
    let result = corpus
        .walks()
        .par_chunks(chunk)
        .map(|walks| {
            let mut local = CooccurrenceMatrix::empty(n, window);
            for walk in walks {
                for t in t_l..=t_u {
                    for k in 0..(l - t) {
                        let (a, b) = (walk[k], walk[k + t]);
                        local.add(a, b, 1);
                        local.add(b, a, 1);
                    }
                }
            }
            local
        })
        .reduce(
            || CooccurrenceMatrix::empty(n, window),
            |a, b| merge(&a, &b).expect("chunk accumulators share shape and window"),
        );
    Ok(result)
}

/// Entrywise sum of two count matrices with equal shape and window.
pub fn merge(a: &CooccurrenceMatrix, b: &CooccurrenceMatrix) -> Result<CooccurrenceMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!(
            "cannot merge {}x{} with {}x{}",
            a.n, a.n, b.n, b.n
        )));
    }
    if a.window != b.window {
        return Err(Error::InvalidWindow {
            t_l: b.window.0,
            t_u: b.window.1,
            l: 0,
        });
    }
    let mut out = a.clone();
    match (&mut out.storage, &b.storage) {
        (Storage::Dense(av), Storage::Dense(bv)) => {
            for (x, y) in av.iter_mut().zip(bv) {
                *x += y;
            }
        }
        (Storage::Sparse(am), Storage::Sparse(bm)) => {
            for (&k, &c) in bm {
                *am.entry(k).or_insert(0) += c;
            }
        }
        _ => unreachable!("storage kind is a function of n"),
    }
    for i in 0..out.n {
        out.row_sums[i] += b.row_sums[i];
    }
    out.total += b.total;
    Ok(out)
}
