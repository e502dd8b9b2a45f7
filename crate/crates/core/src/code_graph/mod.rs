//! Binary linear codes and their Tanner graphs.
//!
//! A [`ParityCheckCode`] is a binary parity-check matrix H (m rows, n
//! columns) stored as its edge set. Edges are kept in a frozen canonical
//! order — column-major, i.e. sorted by variable index and then by check
//! index — and every weight layout and checkpoint in this crate depends on
//! that order, so it must never change.
//!
//! Codes are built three ways: parsed from alist text ([`load_alist`]),
//! constructed as narrow-sense BCH codes ([`construct_bch`]), or assembled
//! from an explicit edge list ([`ParityCheckCode::from_edges`]).

mod alist;
mod bch;
mod gf2;
mod trellis;

pub use alist::{emit_alist, load_alist};
pub use bch::construct_bch;
pub use gf2::{gf2_rank, Generator};
pub use trellis::{compile_trellis, count_parameters, TrellisLayout};

use crate::error::{Error, Result};

/// Largest supported block length.
pub const MAX_N: usize = 1024;
/// Largest supported edge count.
pub const MAX_EDGES: usize = 65536;

/// One edge of the Tanner graph: variable node `v` participates in check `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub v: u32,
    pub c: u32,
}

/// A binary parity-check matrix together with its Tanner-graph adjacency.
///
/// Redundant (linearly dependent) rows are kept as given: decoding behaves
/// according to the literal matrix. The optional systematic generator is
/// filled in by [`ParityCheckCode::derive_generator`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParityCheckCode {
    n: usize,
    m: usize,
    /// Code dimension n − rank(h), computed once at construction.
    k: usize,
    /// Canonical column-major edge order: sorted by (v, c).
    edges: Vec<Edge>,
    /// Edges of variable `v` occupy `edges[var_off[v]..var_off[v+1]]`.
    var_off: Vec<u32>,
    /// Edge ids incident to each check, ascending, CSR layout.
    chk_edges_flat: Vec<u32>,
    chk_off: Vec<u32>,
    generator: Option<Generator>,
}

impl ParityCheckCode {
    /// Build a code from 0-based `(v, c)` entries of H.
    ///
    /// Rejects duplicate entries, out-of-range indices, zero rows/columns
    /// and graphs beyond the supported size bounds.
    pub fn from_edges(
        n: usize,
        m: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidCode(format!(
                "block length {n} outside 1..={MAX_N}"
            )));
        }
        let mut edges: Vec<Edge> = Vec::new();
        for (v, c) in entries {
            if v >= n || c >= m {
                return Err(Error::InvalidCode(format!(
                    "entry ({v}, {c}) out of bounds for {m}x{n} matrix"
                )));
            }
            edges.push(Edge {
                v: v as u32,
                c: c as u32,
            });
        }
        if edges.len() > MAX_EDGES {
            return Err(Error::InvalidCode(format!(
                "{} edges exceed the supported maximum {MAX_EDGES}",
                edges.len()
            )));
        }
        edges.sort_unstable_by_key(|e| (e.v, e.c));
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCode("duplicate matrix entry".into()));
        }
        Self::from_canonical_edges(n, m, edges)
    }

    /// A code with no parity constraints at all (rate 1, k = n).
    ///
    /// Useful as the uncoded BPSK reference in Monte-Carlo sweeps. It cannot
    /// be represented in alist form (every column would be empty).
    pub fn uncoded(n: usize) -> Self {
        let mut code = ParityCheckCode {
            n,
            m: 0,
            k: n,
            edges: Vec::new(),
            var_off: vec![0; n + 1],
            chk_edges_flat: Vec::new(),
            chk_off: vec![0],
            generator: None,
        };
        code.generator = Some(Generator::identity(n));
        code
    }

    /// Internal constructor: `edges` must already be sorted by (v, c) and
    /// free of duplicates.
    pub(crate) fn from_canonical_edges(n: usize, m: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut var_deg = vec![0u32; n];
        let mut chk_deg = vec![0u32; m];
        for e in &edges {
            var_deg[e.v as usize] += 1;
            chk_deg[e.c as usize] += 1;
        }
        if let Some(v) = var_deg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidCode(format!("zero column {v}")));
        }
        if let Some(c) = chk_deg.iter().position(|&d| d == 0) {
            return Err(Error::InvalidCode(format!("zero row {c}")));
        }

        let mut var_off = vec![0u32; n + 1];
        for v in 0..n {
            var_off[v + 1] = var_off[v] + var_deg[v];
        }

        let mut chk_off = vec![0u32; m + 1];
        for c in 0..m {
            chk_off[c + 1] = chk_off[c] + chk_deg[c];
        }
        let mut chk_edges_flat = vec![0u32; edges.len()];
        let mut cursor: Vec<u32> = chk_off[..m].to_vec();
        // Edge ids ascend with v, so each per-check list comes out ascending.
        for (idx, e) in edges.iter().enumerate() {
            let c = e.c as usize;
            chk_edges_flat[cursor[c] as usize] = idx as u32;
            cursor[c] += 1;
        }

        Ok(ParityCheckCode {
            n,
            m,
            edges,
            var_off,
            chk_edges_flat,
            chk_off,
            generator: None,
        })
    }

    /// Block length N (number of variable nodes).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of parity rows (check nodes).
    pub fn num_checks(&self) -> usize {
        self.m
    }

    /// Number of Tanner-graph edges E (1-entries of H).
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// All edges in canonical column-major order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn var_degree(&self, v: usize) -> usize {
        (self.var_off[v + 1] - self.var_off[v]) as usize
    }

    pub fn chk_degree(&self, c: usize) -> usize {
        (self.chk_off[c + 1] - self.chk_off[c]) as usize
    }

    /// Edge ids incident to variable `v` (a contiguous range, ascending).
    pub fn var_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.var_off[v] as usize..self.var_off[v + 1] as usize
    }

    /// Edge ids incident to check `c`, ascending.
    pub fn chk_edges(&self, c: usize) -> &[u32] {
        &self.chk_edges_flat[self.chk_off[c] as usize..self.chk_off[c + 1] as usize]
    }

    /// H as dense 0/1 rows (row-major), for linear algebra and emission.
    pub fn dense_rows(&self) -> Vec<Vec<u8>> {
        let mut rows = vec![vec![0u8; self.n]; self.m];
        for e in &self.edges {
            rows[e.c as usize][e.v as usize] = 1;
        }
        rows
    }

    /// Syndrome H·bitsᵀ over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        assert_eq!(bits.len(), self.n, "bit vector length must equal n");
        let mut s = vec![0u8; self.m];
        for (c, sc) in s.iter_mut().enumerate() {
            for &eid in self.chk_edges(c) {
                *sc ^= bits[self.edges[eid as usize].v as usize] & 1;
            }
        }
        s
    }

    /// True iff `bits` is a codeword (all parity checks satisfied).
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        assert_eq!(bits.len(), self.n, "bit vector length must equal n");
        (0..self.m).all(|c| {
            self.chk_edges(c)
                .iter()
                .fold(0u8, |acc, &eid| acc ^ (bits[self.edges[eid as usize].v as usize] & 1))
                == 0
        })
    }

    /// Code dimension k = n − rank(H).
    pub fn dimension(&self) -> usize {
        self.n - gf2::gf2_rank(&self.dense_rows())
    }

    /// Code rate k/n.
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n as f64
    }

    /// The systematic generator, if [`Self::derive_generator`] has run.
    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    /// Derive a systematic generator matrix by Gaussian elimination over
    /// GF(2) and attach it to the code. Rank-deficient H simply yields a
    /// larger k. Returns the generator.
    pub fn derive_generator(&mut self) -> &Generator {
        if self.generator.is_none() {
            self.generator = Some(Generator::from_parity_rows(self.n, &self.dense_rows()));
        }
        self.generator.as_ref().unwrap()
    }

    /// SHA-256 of the canonical alist text; identifies the literal matrix.
    ///
    /// Checkpoints embed this hash so weights can never be applied to a
    /// different code.
    pub fn hash(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        if self.m == 0 {
            // Not representable as alist; hash a distinct tagged form.
            hasher.update(b"uncoded\n");
            hasher.update(self.n.to_string().as_bytes());
        } else {
            hasher.update(emit_alist(self).as_bytes());
        }
        hasher.finalize().into()
    }
}
