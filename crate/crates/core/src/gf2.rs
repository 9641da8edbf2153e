//! Dense row-major bit matrices over GF(2) with in-place Gauss-Jordan elimination.

use std::fmt;

use crate::error::LinalgError;
use crate::par::{self, Exec};

const WORD: usize = 64;

// Below this many words the elimination stays on the calling thread.
const PAR_MIN_WORDS: usize = 1 << 12;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

/// Outcome of [`BitMatrix::gauss_jordan`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivot_cols: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from per-row lists of set columns.
    pub fn from_sparse_rows<R: AsRef<[usize]>>(cols: usize, rows: &[R]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for &c in row.as_ref() {
                m.flip(r, c);
            }
        }
        m
    }

    pub fn from_bool_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    pub fn to_bool_rows(&self) -> Vec<Vec<bool>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        let w = &mut self.data[r * self.words_per_row + c / WORD];
        let mask = 1u64 << (c % WORD);
        if b {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r * self.words_per_row + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// Set columns of row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * WORD + b))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let wpr = self.words_per_row;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * wpr);
        head[lo * wpr..(lo + 1) * wpr].swap_with_slice(&mut tail[..wpr]);
    }

    /// `dst ^= src`, one machine word at a time.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) -> Result<(), LinalgError> {
        for index in [src, dst] {
            if index >= self.rows {
                return Err(LinalgError::RowOutOfRange {
                    index,
                    rows: self.rows,
                });
            }
        }
        if src == dst {
            return Err(LinalgError::SameRow(src));
        }
        let wpr = self.words_per_row;
        for k in 0..wpr {
            let s = self.data[src * wpr + k];
            self.data[dst * wpr + k] ^= s;
        }
        Ok(())
    }

    /// Reduces the matrix to reduced row echelon form in place, using the
    /// default execution mode.
    pub fn gauss_jordan(&mut self) -> Echelon {
        self.gauss_jordan_with(Exec::default())
    }

    /// Gauss-Jordan elimination. Pivots are taken column by column from the
    /// left; nonzero rows end up on top, zero rows at the bottom.
    pub fn gauss_jordan_with(&mut self, exec: Exec) -> Echelon {
        let wpr = self.words_per_row;
        let exec = if self.data.len() >= PAR_MIN_WORDS {
            exec
        } else {
            Exec::Sequential
        };
        let mut rank = 0;
        let mut pivot_cols = Vec::new();
        let mut pivot = vec![0u64; wpr];
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (w, mask) = (col / WORD, 1u64 << (col % WORD));
            let Some(found) = (rank..self.rows).find(|&r| self.data[r * wpr + w] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(found, rank);
            pivot.copy_from_slice(self.row_words(rank));
            let pivot_row = rank;
            let pivot = &pivot;
            // words left of the pivot word are already zero in the pivot row
            par::for_each_chunk_mut(exec, &mut self.data, wpr, |r, row| {
                if r != pivot_row && row[w] & mask != 0 {
                    for k in w..wpr {
                        row[k] ^= pivot[k];
                    }
                }
            });
            pivot_cols.push(col);
            rank += 1;
        }
        Echelon { rank, pivot_cols }
    }

    /// Row-echelon check used by callers that require RREF input.
    pub fn is_rref(&self) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for r in 0..self.rows {
            match self.row_ones(r).next() {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last_pivot.is_some_and(|lp| p <= lp) {
                        return false;
                    }
                    if (0..self.rows).any(|o| o != r && self.get(o, p)) {
                        return false;
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed() {
        let mut m = BitMatrix::identity(70);
        let e = m.gauss_jordan();
        assert_eq!(e.rank, 70);
        assert_eq!(m, BitMatrix::identity(70));
    }

    #[test]
    fn xor_row_rules() {
        let mut m = BitMatrix::from_sparse_rows(3, &[vec![0, 2], vec![0, 1], vec![]]);
        assert_eq!(m.xor_row_into(1, 1), Err(LinalgError::SameRow(1)));
        assert!(matches!(
            m.xor_row_into(0, 3),
            Err(LinalgError::RowOutOfRange { index: 3, .. })
        ));
        m.xor_row_into(2, 1).unwrap();
        assert_eq!(m.row_ones(1).collect::<Vec<_>>(), vec![0, 1]);
        m.xor_row_into(0, 1).unwrap();
        assert_eq!(m.row_ones(1).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn zero_rows_sink() {
        let mut m = BitMatrix::from_sparse_rows(4, &[vec![], vec![1, 3], vec![1, 3], vec![0]]);
        let e = m.gauss_jordan();
        assert_eq!(e.rank, 2);
        assert_eq!(e.pivot_cols, vec![0, 1]);
        assert!(m.row_is_zero(2) && m.row_is_zero(3));
        assert!(m.is_rref());
    }

    #[test]
    fn swap_rows_across_words() {
        let mut m = BitMatrix::from_sparse_rows(130, &[vec![0, 129], vec![64]]);
        m.swap_rows(0, 1);
        assert_eq!(m.row_ones(0).collect::<Vec<_>>(), vec![64]);
        assert_eq!(m.row_ones(1).collect::<Vec<_>>(), vec![0, 129]);
    }
}
