//! GF(2) linear algebra: rank, reduced row echelon form, and systematic
//! generator matrices.

/// Rank of a dense 0/1 matrix over GF(2). Does not modify the input.
pub fn gf2_rank(rows: &[Vec<u8>]) -> usize {
    let mut work: Vec<Vec<u8>> = rows.to_vec();
    rref(&mut work).len()
}

/// In-place reduced row echelon form. Returns the pivot column of each
/// nonzero row, in row order (strictly increasing).
fn rref(rows: &mut [Vec<u8>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..n {
        let Some(pivot_row) = (r..m).find(|&i| rows[i][col] == 1) else {
            continue;
        };
        rows.swap(r, pivot_row);
        for i in 0..m {
            if i != r && rows[i][col] == 1 {
                for j in col..n {
                    rows[i][j] ^= rows[r][j];
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m {
            break;
        }
    }
    pivots
}

/// A systematic generator matrix for the null space of H.
///
/// Row `j` is a codeword with a 1 in position `free_cols[j]` and zeros in
/// every other free column; message bit `j` therefore appears verbatim at
/// column `free_cols[j]` of the codeword. `pivot_cols` records the column
/// permutation implied by the elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    n: usize,
    rows: Vec<Vec<u8>>,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
}

impl Generator {
    /// Derive the generator of the code {c : H·cᵀ = 0} from dense parity
    /// rows. Rank deficiency of H just enlarges k.
    pub fn from_parity_rows(n: usize, parity_rows: &[Vec<u8>]) -> Self {
        let mut work: Vec<Vec<u8>> = parity_rows.to_vec();
        let pivot_cols = rref(&mut work);
        let rank = pivot_cols.len();
        let is_pivot = {
            let mut mask = vec![false; n];
            for &p in &pivot_cols {
                mask[p] = true;
            }
            mask
        };
        let free_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();

        // For free column f, the codeword has c_f = 1 and, for pivot i,
        // c_{pivot_cols[i]} = RREF[i][f] (so that every parity row cancels).
        let mut rows = Vec::with_capacity(free_cols.len());
        for &f in &free_cols {
            let mut cw = vec![0u8; n];
            cw[f] = 1;
            for i in 0..rank {
                cw[pivot_cols[i]] = work[i][f];
            }
            rows.push(cw);
        }
        Generator {
            n,
            rows,
            pivot_cols,
            free_cols,
        }
    }

    /// Generator of the rate-1 code: the n×n identity.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0u8; n];
                r[i] = 1;
                r
            })
            .collect();
        Generator {
            n,
            rows,
            pivot_cols: Vec::new(),
            free_cols: (0..n).collect(),
        }
    }

    /// Code dimension k.
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Generator rows (each a codeword of length n).
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Columns carrying message bits verbatim.
    pub fn free_cols(&self) -> &[usize] {
        &self.free_cols
    }

    /// Pivot columns chosen by the elimination, in elimination order.
    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    /// Encode k message bits into an n-bit codeword.
    pub fn encode(&self, msg: &[u8]) -> Vec<u8> {
        assert_eq!(msg.len(), self.k(), "message length must equal k");
        let mut cw = vec![0u8; self.n];
        for (j, &bit) in msg.iter().enumerate() {
            if bit & 1 == 1 {
                for (c, g) in cw.iter_mut().zip(self.rows[j].iter()) {
                    *c ^= g;
                }
            }
        }
        cw
    }

    /// Encode the message whose bit `j` is bit `j` of `index`.
    ///
    /// This defines the total order on codewords used for deterministic
    /// tie-breaking in exhaustive decoding: codeword `i` precedes codeword
    /// `j` iff `i < j` as integers.
    pub fn encode_index(&self, index: u64) -> Vec<u8> {
        assert!(self.k() <= 63, "index encoding supports k <= 63");
        let msg: Vec<u8> = (0..self.k()).map(|j| ((index >> j) & 1) as u8).collect();
        self.encode(&msg)
    }
}
