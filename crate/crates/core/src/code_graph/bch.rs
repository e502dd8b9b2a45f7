//! Narrow-sense binary BCH parity-check matrices.
//!
//! For block length n = 2^m − 1 and design error-correcting radius t, the
//! check matrix over GF(2^m) has rows [α^{p·j}]_{j=0..n−1} for the odd
//! powers p = 1, 3, …, 2t−1; each row expands into m binary rows (the bit
//! planes of the field elements). The code dimension is
//! k = n − deg(g) where g is the product of the distinct minimal
//! polynomials of α^p, computed here via cyclotomic cosets.
//!
//! Bit planes that come out identically zero (this happens when α^p lies
//! in a proper subfield whose span misses some bit coordinates) carry no
//! constraint and are dropped. Linearly dependent nonzero rows are kept.

use super::{Edge, ParityCheckCode};
use crate::error::{Error, Result};

/// Primitive polynomials for GF(2^m), m = 3..=8, lowest-weight convention.
/// Bit i of the entry is the coefficient of x^i.
const PRIMITIVE_POLY: [(usize, u32); 6] = [
    (3, 0b1011),       // x^3 + x + 1
    (4, 0b10011),      // x^4 + x + 1
    (5, 0b100101),     // x^5 + x^2 + 1
    (6, 0b1000011),    // x^6 + x + 1
    (7, 0b10001001),   // x^7 + x^3 + 1
    (8, 0b100011101),  // x^8 + x^4 + x^3 + x^2 + 1
];

/// Discrete-log tables for GF(2^m): `alog[i]` = α^i for i in 0..n.
fn gf_antilog(m: usize) -> Vec<u32> {
    let poly = PRIMITIVE_POLY
        .iter()
        .find(|&&(mm, _)| mm == m)
        .map(|&(_, p)| p)
        .expect("field size validated by caller");
    let n = (1usize << m) - 1;
    let mut alog = vec![0u32; n];
    let mut x = 1u32;
    for a in alog.iter_mut() {
        *a = x;
        x <<= 1;
        if (x >> m) & 1 == 1 {
            x ^= poly;
        }
    }
    alog
}

/// Degree of the generator polynomial: total size of the distinct
/// cyclotomic cosets (mod n) of the exponents 1, 3, …, 2t−1.
fn generator_degree(m: usize, t: usize) -> usize {
    let n = (1usize << m) - 1;
    let mut seen = vec![false; n];
    let mut deg = 0usize;
    for i in 1..=t {
        let p = (2 * i - 1) % n;
        if p == 0 || seen[p] {
            continue;
        }
        let mut s = p;
        loop {
            seen[s] = true;
            deg += 1;
            s = (s * 2) % n;
            if s == p {
                break;
            }
        }
    }
    deg
}

/// Construct the BCH(n = 2^m_field − 1, k) parity-check matrix for design
/// radius `t`. The returned code has exactly rank(H) = n − k.
pub fn construct_bch(m_field: usize, t: usize) -> Result<ParityCheckCode> {
    if !(3..=8).contains(&m_field) {
        return Err(Error::BchParams(format!(
            "field degree {m_field} outside the supported range 3..=8"
        )));
    }
    if t < 1 {
        return Err(Error::BchParams("t must be at least 1".into()));
    }
    let n = (1usize << m_field) - 1;
    if 2 * t - 1 >= n {
        return Err(Error::BchParams(format!(
            "t = {t} too large: the design distance exceeds the block length {n}"
        )));
    }
    let deg = generator_degree(m_field, t);
    if deg >= n {
        return Err(Error::BchParams(format!(
            "t = {t} too large: code dimension would be {} <= 0",
            n as i64 - deg as i64
        )));
    }

    let alog = gf_antilog(m_field);
    let mut edges: Vec<Edge> = Vec::new();
    let mut row = 0usize;
    for i in 1..=t {
        let p = 2 * i - 1;
        for b in 0..m_field {
            let mut any = false;
            for j in 0..n {
                if (alog[(p * j) % n] >> b) & 1 == 1 {
                    edges.push(Edge {
                        v: j as u32,
                        c: row as u32,
                    });
                    any = true;
                }
            }
            // A zero bit plane never pushed an edge; reuse its row index.
            if any {
                row += 1;
            }
        }
    }
    edges.sort_unstable_by_key(|e| (e.v, e.c));
    ParityCheckCode::from_canonical_edges(n, row, edges)
}
