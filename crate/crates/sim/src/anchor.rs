//! AWGN reference SNR: the SNR at which a static, known channel with
//! differential coding reaches SER 10⁻³.
//!
//! Found by bisection on a common-random-numbers Monte Carlo estimate, so
//! the estimated SER is a deterministic, non-increasing step function of SNR.

use std::sync::OnceLock;

use poltrack_core::algebra::{Complex, JonesVector};
use poltrack_core::constellation::{Constellation, DiffDecoder, DiffEncoder, Format};
use poltrack_core::rng::RngStream;
use rayon::prelude::*;

pub const ANCHOR_TARGET_SER: f64 = 1e-3;
pub const ANCHOR_SEED: u64 = 0x5eed_a4c4;
const CHUNKS: u64 = 40;
const CHUNK_LEN: u64 = 50_000;
const RESOLUTION_DB: f64 = 1e-4;

/// Symbol errors over `chunks × chunk_len` symbols at `snr_db`, with
/// differential coding and ideal channel knowledge.
pub fn awgn_errors(c: &Constellation, snr_db: f64, seed: u64, chunks: u64, chunk_len: u64) -> u64 {
    let n0 = c.es() / 10f64.powf(snr_db / 10.0);
    let sd = (n0 / 2.0).sqrt();
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = RngStream::new(seed, chunk);
            let mut enc = DiffEncoder::new();
            let mut dec = DiffDecoder::new();
            let mut errors = 0;
            for _ in 0..chunk_len {
                let src = rng.below(c.size());
                let x = *c.point(enc.encode(c, src));
                let n = JonesVector::new(
                    Complex::new(rng.normal(sd), rng.normal(sd)),
                    Complex::new(rng.normal(sd), rng.normal(sd)),
                );
                let d = c.decide_index(&(x + n));
                errors += u64::from(dec.decode(c, d) != src);
            }
            errors
        })
        .sum()
}

/// SNR in dB at which the CRN estimate first reaches the target SER.
pub fn find_anchor(c: &Constellation, target: f64, seed: u64, chunks: u64, chunk_len: u64) -> f64 {
    let total = (chunks * chunk_len) as f64;
    let ser = |snr: f64| awgn_errors(c, snr, seed, chunks, chunk_len) as f64 / total;
    let (mut lo, mut hi) = (-5.0, 45.0);
    while hi - lo > RESOLUTION_DB {
        let mid = 0.5 * (lo + hi);
        if ser(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Anchor SNR for `format`, computed once per process.
pub fn awgn_anchor_db(format: Format) -> f64 {
    static CELLS: [OnceLock<f64>; 5] = [const { OnceLock::new() }; 5];
    let slot = Format::ALL.iter().position(|f| *f == format).expect("format listed in ALL");
    *CELLS[slot].get_or_init(|| {
        find_anchor(&Constellation::new(format), ANCHOR_TARGET_SER, ANCHOR_SEED, CHUNKS, CHUNK_LEN)
    })
}
