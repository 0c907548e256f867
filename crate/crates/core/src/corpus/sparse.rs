/// Sparse real matrix with both row (term) and column (document) access.
/// Exact zeros are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_cols: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    /// `rows[i]` lists `(column, value)` pairs; columns need not be sorted.
    ///
    /// Panics if a column index is out of range.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut cols = vec![Vec::new(); n_cols];
        let rows: Vec<Vec<(usize, f64)>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.retain(|&(_, v)| v != 0.0);
                row.sort_by_key(|&(j, _)| j);
                for &(j, v) in &row {
                    assert!(j < n_cols, "column {j} out of range for {n_cols} columns");
                    cols[j].push((i, v));
                }
                row
            })
            .collect();
        Self { n_cols, rows, cols }
    }

    pub fn from_dense(dense: &[Vec<f64>]) -> Self {
        let n_cols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|row| {
                assert_eq!(row.len(), n_cols, "ragged dense matrix");
                row.iter().copied().enumerate().collect()
            })
            .collect();
        Self::from_rows(n_cols, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0.0, |pos| row[pos].1)
    }

    /// Dot product of rows `a` and `b`.
    pub fn row_dot(&self, a: usize, b: usize) -> f64 {
        let (mut x, mut y) = (self.rows[a].iter().peekable(), self.rows[b].iter().peekable());
        let mut acc = 0.0;
        while let (Some(&&(i, u)), Some(&&(j, v))) = (x.peek(), y.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    x.next();
                }
                std::cmp::Ordering::Greater => {
                    y.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += u * v;
                    x.next();
                    y.next();
                }
            }
        }
        acc
    }
}
