//! Route-selection kernels.
//!
//! Two families: the scalar reference (`scalar_argmax`, `scalar_roulette`)
//! and lane-parallel forms written over fixed-width chunks so the compiler
//! can keep each chunk in vector registers. The lane-parallel forms return
//! the same index as the scalar reference: ties in the max reduction go to
//! the smallest index, and the exact scan uses the scalar association order.

use crate::real::Real;

/// Selection was asked to choose among values that are all zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllMasked;

impl std::fmt::Display for AllMasked {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("every route option is masked")
    }
}

impl std::error::Error for AllMasked {}

/// `tau^alpha × eta_pow`. `alpha == 1` is applied as the identity, which is
/// bit-identical to `powf(1)`.
#[inline(always)]
pub fn choice_value<T: Real>(tau: T, eta_pow: T, alpha: T) -> T {
    let t = if alpha == T::one() { tau } else { tau.powf(alpha) };
    t * eta_pow
}

/// `out[r] = tau[r]^alpha × eta[r]^beta × mask[r]`.
pub fn build_choice_vector<T: Real>(tau: &[T], eta: &[T], mask: &[T], alpha: T, beta: T) -> Vec<T> {
    assert!(tau.len() == eta.len() && eta.len() == mask.len());
    tau.iter()
        .zip(eta)
        .zip(mask)
        .map(|((&t, &e), &m)| choice_value(t, e.powf(beta), alpha) * m)
        .collect()
}

/// Hot-loop form of [`build_choice_vector`] with `eta^beta` precomputed.
#[inline]
pub fn build_choice_vector_into<T: Real>(
    tau: &[T],
    eta_pow: &[T],
    mask: &[T],
    alpha: T,
    out: &mut Vec<T>,
) {
    debug_assert!(tau.len() == eta_pow.len() && eta_pow.len() == mask.len());
    out.clear();
    out.extend(
        tau.iter()
            .zip(eta_pow)
            .zip(mask)
            .map(|((&t, &e), &m)| choice_value(t, e, alpha) * m),
    );
}

/// Left-to-right argmax; first index wins ties.
pub fn scalar_argmax<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Sequential cumulative-sum roulette: the first positive entry whose
/// running sum exceeds `u × Σ values`.
pub fn scalar_roulette<T: Real>(values: &[T], u: T) -> Result<usize, AllMasked> {
    let total = values.iter().fold(T::zero(), |acc, &v| acc + v);
    if !(total > T::zero()) {
        return Err(AllMasked);
    }
    let target = u * total;
    let mut cum = T::zero();
    for (j, &v) in values.iter().enumerate() {
        cum = cum + v;
        if v > T::zero() && cum > target {
            return Ok(j);
        }
    }
    last_positive(values).ok_or(AllMasked)
}

fn last_positive<T: Real>(values: &[T]) -> Option<usize> {
    values.iter().rposition(|&v| v > T::zero())
}

pub const DEFAULT_WIDTH: usize = 8;

fn argmax_lanes<T: Real, const W: usize>(values: &[T]) -> usize {
    let mut best = [T::neg_infinity(); W];
    let mut idx = [usize::MAX; W];
    let chunks = values.chunks_exact(W);
    let tail = chunks.remainder();
    for (c, chunk) in chunks.enumerate() {
        for lane in 0..W {
            let v = chunk[lane];
            let better = v > best[lane];
            best[lane] = if better { v } else { best[lane] };
            idx[lane] = if better { c * W + lane } else { idx[lane] };
        }
    }
    let base = values.len() - tail.len();
    for (lane, &v) in tail.iter().enumerate() {
        if v > best[lane] {
            best[lane] = v;
            idx[lane] = base + lane;
        }
    }
    // Combine lanes pairwise; equal values keep the smaller index.
    let mut width = W;
    while width > 1 {
        let half = width / 2;
        for lane in 0..half {
            let (a, b) = (lane, lane + half);
            if best[b] > best[a] || (best[b] == best[a] && idx[b] < idx[a]) {
                best[a] = best[b];
                idx[a] = idx[b];
            }
        }
        width = half;
    }
    idx[0]
}

/// Index of the maximum, smallest index on ties.
pub fn reduce_max_index<T: Real>(values: &[T]) -> usize {
    reduce_max_index_width(values, DEFAULT_WIDTH)
}

/// [`reduce_max_index`] with an explicit lane count (1, 2, 4, 8 or 16;
/// anything else falls back to 8). Width 1 is the scalar scan.
pub fn reduce_max_index_width<T: Real>(values: &[T], width: usize) -> usize {
    assert!(!values.is_empty(), "reduce_max_index on empty vector");
    match width {
        1 => scalar_argmax(values),
        2 => argmax_lanes::<T, 2>(values),
        4 => argmax_lanes::<T, 4>(values),
        16 => argmax_lanes::<T, 16>(values),
        _ => argmax_lanes::<T, 8>(values),
    }
}

/// Roulette selection by blocked prefix scan: each block of eight is
/// scanned with log-step shifts, then offset by the running carry.
pub fn scan_roulette<T: Real>(values: &[T], u: T) -> Result<usize, AllMasked> {
    let mut prefix = Vec::with_capacity(values.len());
    scan_roulette_blocked_into(values, u, &mut prefix)
}

pub(crate) fn scan_roulette_blocked_into<T: Real>(
    values: &[T],
    u: T,
    prefix: &mut Vec<T>,
) -> Result<usize, AllMasked> {
    const W: usize = 8;
    prefix.clear();
    let mut carry = T::zero();
    for chunk in values.chunks(W) {
        let mut block = [T::zero(); W];
        block[..chunk.len()].copy_from_slice(chunk);
        let mut shift = 1;
        while shift < W {
            let prev = block;
            for lane in shift..W {
                block[lane] = prev[lane] + prev[lane - shift];
            }
            shift *= 2;
        }
        for &local in &block[..chunk.len()] {
            prefix.push(carry + local);
        }
        carry = carry + block[chunk.len() - 1];
    }
    pick_from_prefix(values, prefix, u, carry)
}

/// Roulette selection over a prefix array accumulated in scalar order, so
/// the result equals [`scalar_roulette`] for every `u`.
pub fn scan_roulette_exact<T: Real>(values: &[T], u: T) -> Result<usize, AllMasked> {
    let mut prefix = Vec::with_capacity(values.len());
    scan_roulette_exact_into(values, u, &mut prefix)
}

pub(crate) fn scan_roulette_exact_into<T: Real>(
    values: &[T],
    u: T,
    prefix: &mut Vec<T>,
) -> Result<usize, AllMasked> {
    prefix.clear();
    let mut acc = T::zero();
    for &v in values {
        acc = acc + v;
        prefix.push(acc);
    }
    pick_from_prefix(values, prefix, u, acc)
}

#[inline]
fn pick_from_prefix<T: Real>(values: &[T], prefix: &[T], u: T, total: T) -> Result<usize, AllMasked> {
    if !(total > T::zero()) {
        return Err(AllMasked);
    }
    let target = u * total;
    // Masked entries are skipped explicitly: a blocked scan need not be
    // monotone to the last ulp.
    prefix
        .iter()
        .zip(values)
        .position(|(&p, &v)| p > target && v > T::zero())
        .or_else(|| last_positive(values))
        .ok_or(AllMasked)
}
