/// Row-major `f32` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

// Rows processed together in `matvec_into`; each keeps its own accumulator.
const ROW_BLOCK: usize = 8;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// New matrix whose row `j` is a copy of row `ids[j]`.
    pub fn gather_rows(&self, ids: &[u32]) -> Matrix {
        let mut data = Vec::with_capacity(ids.len() * self.cols);
        for &id in ids {
            data.extend_from_slice(self.row(id as usize));
        }
        Matrix::from_vec(ids.len(), self.cols, data)
    }

    /// Product of the first `rows` rows with `x`, written to `out[..rows]`.
    pub fn matvec_prefix_into(&self, rows: usize, x: &[f32], out: &mut [f32]) {
        matvec(
            &self.data[..rows * self.cols],
            self.cols,
            x,
            &mut out[..rows],
        );
    }

    /// `out = self · x`.
    ///
    /// Row `r` of the result is `Σ_c self[r][c] · x[c]` accumulated in
    /// ascending `c` starting from `0.0`, independent of which other rows are
    /// present.
    pub fn matvec_into(&self, x: &[f32], out: &mut [f32]) {
        assert_eq!(out.len(), self.rows);
        matvec(&self.data, self.cols, x, out);
    }

    pub fn matvec(&self, x: &[f32]) -> Vec<f32> {
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        out
    }
}

fn matvec(data: &[f32], cols: usize, x: &[f32], out: &mut [f32]) {
    assert_eq!(x.len(), cols);
    let x = &x[..cols];
    let mut blocks = data.chunks_exact(cols * ROW_BLOCK);
    let mut out_blocks = out.chunks_exact_mut(ROW_BLOCK);
    for (block, out) in (&mut blocks).zip(&mut out_blocks) {
        let rows: [&[f32]; ROW_BLOCK] = std::array::from_fn(|k| &block[k * cols..(k + 1) * cols]);
        let mut acc = [0.0f32; ROW_BLOCK];
        for (c, &xc) in x.iter().enumerate() {
            for k in 0..ROW_BLOCK {
                acc[k] += rows[k][c] * xc;
            }
        }
        out.copy_from_slice(&acc);
    }
    let rest = blocks.remainder();
    for (row, o) in rest.chunks_exact(cols).zip(out_blocks.into_remainder()) {
        *o = dot(row, x);
    }
}

#[inline]
pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = 0.0f32;
    for (&p, &q) in a.iter().zip(b) {
        acc += p * q;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_matrix(rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols)
            .map(|i| ((i * 37 % 101) as f32 - 50.0) / 7.0)
            .collect();
        Matrix::from_vec(rows, cols, data)
    }

    #[test]
    fn matvec_matches_rowwise_dot_bitwise() {
        for rows in [1, 7, 8, 9, 17, 33] {
            let m = seq_matrix(rows, 13);
            let x: Vec<f32> = (0..13).map(|i| (i as f32 * 0.37).sin()).collect();
            let out = m.matvec(&x);
            for r in 0..rows {
                assert_eq!(out[r].to_bits(), dot(m.row(r), &x).to_bits());
            }
        }
    }

    #[test]
    fn gathered_rows_give_identical_products() {
        let m = seq_matrix(40, 11);
        let x: Vec<f32> = (0..11).map(|i| 1.0 / (i as f32 + 1.5)).collect();
        let full = m.matvec(&x);
        let ids = [0u32, 3, 4, 9, 10, 11, 12, 13, 14, 15, 39];
        let sliced = m.gather_rows(&ids).matvec(&x);
        for (j, &id) in ids.iter().enumerate() {
            assert_eq!(sliced[j].to_bits(), full[id as usize].to_bits());
        }
    }

    #[test]
    fn prefix_product() {
        let m = seq_matrix(20, 5);
        let x = [1.0, -2.0, 0.5, 0.25, 3.0];
        let full = m.matvec(&x);
        let mut out = vec![0.0; 20];
        m.matvec_prefix_into(12, &x, &mut out);
        assert_eq!(&out[..12], &full[..12]);
        assert!(out[12..].iter().all(|&v| v == 0.0));
    }
}
