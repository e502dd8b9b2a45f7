//! BPSK over AWGN: modulation, noise sampling, LLR computation and
//! mini-batch generation.
//!
//! Conventions, fixed end-to-end:
//!
//! - BPSK maps bit 0 → +1 and bit 1 → −1.
//! - The channel LLR is the log-odds of bit ONE:
//!   `l_v = log P(C_v=1 | y_v) / P(C_v=0 | y_v) = −2 y_v / σ²`,
//!   so negative LLRs favor bit 0.
//! - SNR is Eb/N0 by default (`σ = (2·rate·10^(snr/10))^{−1/2}`); Es/N0 is
//!   available as the alternative convention (no rate scaling).
//!
//! All randomness comes from caller-supplied ChaCha8 streams
//! ([`rand_chacha::ChaCha8Rng`]), with Gaussian variates drawn via
//! `rand_distr::StandardNormal` (ziggurat). Batch content is a pure
//! function of the rng state and the parameters.

use crate::code_graph::ParityCheckCode;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{Read, Write};

/// How an SNR value in dB maps to a noise standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrConvention {
    /// Energy per information bit over noise density; scales with the rate.
    #[default]
    EbN0,
    /// Energy per channel symbol over noise density.
    EsN0,
}

impl SnrConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            SnrConvention::EbN0 => "ebn0",
            SnrConvention::EsN0 => "esn0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ebn0" => Some(SnrConvention::EbN0),
            "esn0" => Some(SnrConvention::EsN0),
            _ => None,
        }
    }
}

/// Noise standard deviation for a given SNR under the Eb/N0 convention:
/// σ = (2 · rate · 10^(snr_db/10))^(−1/2).
pub fn snr_to_sigma(snr_db: f64, rate: f64) -> f64 {
    snr_to_sigma_with(snr_db, rate, SnrConvention::EbN0)
}

/// Noise standard deviation under an explicit convention. Es/N0 ignores
/// the rate.
pub fn snr_to_sigma_with(snr_db: f64, rate: f64, convention: SnrConvention) -> f64 {
    assert!(rate > 0.0 && rate <= 1.0, "rate must lie in (0, 1]");
    let scale = match convention {
        SnrConvention::EbN0 => rate,
        SnrConvention::EsN0 => 1.0,
    };
    1.0 / (2.0 * scale * 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Map bits to BPSK symbols: 0 → +1, 1 → −1.
pub fn modulate_bpsk(codeword: &[u8]) -> Vec<f64> {
    codeword.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

/// Channel LLRs (log-odds of bit one) from received symbols:
/// l_v = −2 y_v / σ².
pub fn llr_from_channel(y: &[f64], sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let scale = -2.0 / (sigma * sigma);
    y.iter().map(|&yv| scale * yv).collect()
}

/// A mini-batch of channel LLR vectors with their transmitted codewords.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrBatch {
    n: usize,
    /// Row-major, `len() == batch_size * n`.
    llrs: Vec<f64>,
    /// Transmitted bits, same layout.
    labels: Vec<u8>,
    /// Per-example SNR tag in dB.
    snr_db: Vec<f64>,
}

impl LlrBatch {
    pub fn empty(n: usize) -> Self {
        LlrBatch {
            n,
            llrs: Vec::new(),
            labels: Vec::new(),
            snr_db: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.snr_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr_db.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn llrs(&self, example: usize) -> &[f64] {
        &self.llrs[example * self.n..(example + 1) * self.n]
    }

    pub fn labels(&self, example: usize) -> &[u8] {
        &self.labels[example * self.n..(example + 1) * self.n]
    }

    pub fn snr_db(&self, example: usize) -> f64 {
        self.snr_db[example]
    }

    pub fn push(&mut self, llr: &[f64], label: &[u8], snr_db: f64) {
        assert_eq!(llr.len(), self.n);
        assert_eq!(label.len(), self.n);
        assert!(llr.iter().all(|x| x.is_finite()), "LLRs must be finite");
        self.llrs.extend_from_slice(llr);
        self.labels.extend_from_slice(label);
        self.snr_db.push(snr_db);
    }

    /// Check that every label is a codeword of `code`.
    pub fn labels_are_codewords(&self, code: &ParityCheckCode) -> bool {
        (0..self.len()).all(|i| code.syndrome_ok(self.labels(i)))
    }

    const MAGIC: &'static [u8; 8] = b"WBPLLRB\0";
    const VERSION: u32 = 1;

    /// Serialize: magic, version, batch size and n as little-endian u32,
    /// then all LLRs as little-endian f64, all labels as bytes, all SNR
    /// tags as little-endian f64.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&Self::VERSION.to_le_bytes())?;
        w.write_all(&(self.len() as u32).to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        for x in &self.llrs {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&self.labels)?;
        for s in &self.snr_db {
            w.write_all(&s.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::CheckpointCorrupt("not an LLR batch file".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let version = u32::from_le_bytes(u32buf);
        if version != Self::VERSION {
            return Err(Error::CheckpointVersion {
                found: version,
                expected: Self::VERSION,
            });
        }
        r.read_exact(&mut u32buf)?;
        let batch = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;

        let mut f64buf = [0u8; 8];
        let mut llrs = Vec::with_capacity(batch * n);
        for _ in 0..batch * n {
            r.read_exact(&mut f64buf)?;
            llrs.push(f64::from_le_bytes(f64buf));
        }
        let mut labels = vec![0u8; batch * n];
        r.read_exact(&mut labels)?;
        let mut snr_db = Vec::with_capacity(batch);
        for _ in 0..batch {
            r.read_exact(&mut f64buf)?;
            snr_db.push(f64::from_le_bytes(f64buf));
        }
        Ok(LlrBatch {
            n,
            llrs,
            labels,
            snr_db,
        })
    }
}

/// Draw one noisy frame of the given codeword and return its LLRs.
fn noisy_llrs(codeword_symbols: &[f64], sigma: f64, rng: &mut impl Rng) -> Vec<f64> {
    let scale = -2.0 / (sigma * sigma);
    codeword_symbols
        .iter()
        .map(|&x| {
            let z: f64 = rng.sample(StandardNormal);
            scale * (x + sigma * z)
        })
        .collect()
}

/// Zero-codeword training batch: `per_snr` frames at each SNR of
/// `snr_list`, in grid order. Labels are all-zero; noise is i.i.d.
/// Gaussian with σ from the code rate and the convention.
pub fn sample_training_batch(
    code: &ParityCheckCode,
    snr_list: &[f64],
    per_snr: usize,
    convention: SnrConvention,
    rng: &mut impl Rng,
) -> LlrBatch {
    assert!(per_snr >= 1, "per_snr must be at least 1");
    let n = code.n();
    let rate = code.rate();
    let zero = vec![0u8; n];
    let symbols = modulate_bpsk(&zero);
    let mut batch = LlrBatch::empty(n);
    for &snr in snr_list {
        let sigma = snr_to_sigma_with(snr, rate, convention);
        for _ in 0..per_snr {
            let llr = noisy_llrs(&symbols, sigma, rng);
            batch.push(&llr, &zero, snr);
        }
    }
    batch
}

/// Noisy frames of an arbitrary codeword at a single SNR.
pub fn sample_eval_frames(
    code: &ParityCheckCode,
    codeword: &[u8],
    snr_db: f64,
    count: usize,
    convention: SnrConvention,
    rng: &mut impl Rng,
) -> LlrBatch {
    assert_eq!(codeword.len(), code.n());
    debug_assert!(code.syndrome_ok(codeword), "label must be a codeword");
    let sigma = snr_to_sigma_with(snr_db, code.rate(), convention);
    let symbols = modulate_bpsk(codeword);
    let mut batch = LlrBatch::empty(code.n());
    for _ in 0..count {
        let llr = noisy_llrs(&symbols, sigma, rng);
        batch.push(&llr, codeword, snr_db);
    }
    batch
}
