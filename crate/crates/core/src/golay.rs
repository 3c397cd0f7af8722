//! Complementary sequence pairs and correlation-based impulse-response estimation.
//!
//! * Pairs are built by the recursive doubling construction, so their aperiodic
//!   autocorrelations cancel exactly in integer arithmetic at every nonzero lag.
//! * The transmitted layout is the minimal two-burst frame: sequence `a`, a guard
//!   long enough to flush the channel, then sequence `b`.
//! * [`estimate_cir`] recovers the channel taps exactly (up to float rounding)
//!   for any noiseless channel shorter than the guard.

use num_complex::Complex64;

use crate::model::{Cir, CirKind};
use crate::{Error, Result};

/// Two bipolar sequences whose aperiodic autocorrelations sum to a delta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayPair {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl GolayPair {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Builds a complementary pair of the given power-of-two length by doubling:
/// `a' = a || b`, `b' = a || (-b)`, starting from single-element sequences.
pub fn generate_golay_pair(n: usize) -> Result<GolayPair> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "sequence length must be a power of two, got {n}"
        )));
    }
    let mut a = vec![1i64];
    let mut b = vec![1i64];
    while a.len() < n {
        let mut next_a = a.clone();
        next_a.extend_from_slice(&b);
        let mut next_b = a.clone();
        next_b.extend(b.iter().map(|x| -x));
        a = next_a;
        b = next_b;
    }
    Ok(GolayPair { a, b })
}

/// Aperiodic autocorrelation over lags `-(N-1) ..= N-1`, returned as a vector of
/// length `2N - 1` with zero lag in the middle.
pub fn aperiodic_autocorr(seq: &[i64]) -> Result<Vec<i64>> {
    if seq.is_empty() {
        return Err(Error::invalid("autocorrelation input must be nonempty"));
    }
    let n = seq.len();
    let mut out = vec![0i64; 2 * n - 1];
    for (idx, slot) in out.iter_mut().enumerate() {
        let lag = idx as i64 - (n as i64 - 1);
        let k = lag.unsigned_abs() as usize;
        let mut acc = 0i64;
        for i in 0..n - k {
            acc += seq[i] * seq[i + k];
        }
        *slot = acc;
    }
    Ok(out)
}

/// Elementwise sum of the two autocorrelations; equals `2N` at zero lag and `0`
/// everywhere else for a valid pair.
pub fn complementary_autocorr_sum(pair: &GolayPair) -> Result<Vec<i64>> {
    let ra = aperiodic_autocorr(&pair.a)?;
    let rb = aperiodic_autocorr(&pair.b)?;
    Ok(ra.iter().zip(&rb).map(|(x, y)| x + y).collect())
}

/// Transmitted sample stream: `a`, `guard_len` zeros, then `b`, one sample per tap.
pub fn preamble(pair: &GolayPair, guard_len: usize) -> Vec<f64> {
    let mut tx = Vec::with_capacity(2 * pair.len() + guard_len);
    tx.extend(pair.a.iter().map(|&x| x as f64));
    tx.extend(std::iter::repeat(0.0).take(guard_len));
    tx.extend(pair.b.iter().map(|&x| x as f64));
    tx
}

/// Convolves a real sample stream with a complex tapped channel (full length).
pub fn apply_channel(tx: &[f64], channel: &[Complex64]) -> Vec<Complex64> {
    if tx.is_empty() || channel.is_empty() {
        return Vec::new();
    }
    let mut rx = vec![Complex64::new(0.0, 0.0); tx.len() + channel.len() - 1];
    for (m, &h) in channel.iter().enumerate() {
        if h == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (i, &x) in tx.iter().enumerate() {
            rx[i + m] += h * x;
        }
    }
    rx
}

/// Correlates the two received bursts against their sequences and averages,
/// recovering `num_taps` channel taps. The guard must be at least `num_taps`
/// samples so the first burst's tail cannot leak into the second correlation
/// window; under that condition the sidelobe cancellation is exact.
pub fn estimate_cir(
    rx: &[Complex64],
    pair: &GolayPair,
    num_taps: usize,
    guard_len: usize,
    tap_spacing_s: f64,
    kind: CirKind,
) -> Result<Cir> {
    let n = pair.len();
    if n == 0 {
        return Err(Error::invalid("sequence pair must be nonempty"));
    }
    if num_taps == 0 {
        return Err(Error::invalid("num_taps must be at least 1"));
    }
    if guard_len < num_taps {
        return Err(Error::invalid(format!(
            "guard of {guard_len} samples is shorter than the {num_taps}-tap channel window"
        )));
    }
    let needed = 2 * n + guard_len + num_taps - 1;
    if rx.len() < needed {
        return Err(Error::invalid(format!(
            "received stream holds {} samples but the frame spans {needed}",
            rx.len()
        )));
    }
    let scale = 1.0 / (2 * n) as f64;
    let b_start = n + guard_len;
    let mut taps = Vec::with_capacity(num_taps);
    for k in 0..num_taps {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += rx[i + k] * pair.a[i] as f64;
            acc += rx[b_start + i + k] * pair.b[i] as f64;
        }
        taps.push(acc * scale);
    }
    Ok(Cir {
        taps,
        tap_spacing_s,
        delay_offset_s: 0.0,
        kind,
    })
}

// --- tests -------------------------------------------------------------------
