//! Collaborative shrinkage of a transformed group.
//!
//! Coefficient 0 of the 4-D transform is the group's global DC. It is never
//! thresholded or attenuated, which makes constant regions exact fixed
//! points of both stages.

use crate::error::{param, Result};

use super::transform::GroupTransform;

fn check_stack(len: usize, block: [usize; 3]) -> Result<usize> {
    let vox: usize = block.iter().product();
    if vox == 0 || len == 0 || !len.is_multiple_of(vox) || !(len / vox).is_power_of_two() {
        return param(format!(
            "stack of {len} values is not a power-of-two count of {block:?} blocks"
        ));
    }
    Ok(len / vox)
}

/// Hard thresholding in place. Returns the number of retained coefficients
/// (the DC always counts).
pub(crate) fn hard_threshold_in_place(
    t: &mut GroupTransform,
    stack: &mut [f64],
    threshold: f64,
) -> usize {
    t.forward(stack);
    let mut retained = 1;
    for c in &mut stack[1..] {
        if c.abs() < threshold {
            *c = 0.0;
        } else if *c != 0.0 {
            retained += 1;
        }
    }
    t.inverse(stack);
    retained
}

/// Empirical Wiener shrinkage of `noisy` driven by `pilot`, both in place.
/// Returns `Σ W²`; `noisy` holds the filtered stack afterwards.
pub(crate) fn wiener_in_place(
    t: &mut GroupTransform,
    noisy: &mut [f64],
    pilot: &mut [f64],
    sigma: f64,
) -> f64 {
    t.forward(noisy);
    t.forward(pilot);
    let s2 = sigma * sigma;
    let mut sum_w2 = 1.0;
    for (c, b) in noisy.iter_mut().zip(pilot.iter()).skip(1) {
        let b2 = b * b;
        let w = b2 / (b2 + s2);
        *c *= w;
        sum_w2 += w * w;
    }
    t.inverse(noisy);
    sum_w2
}

/// Transforms a group, zeroes every non-DC coefficient below
/// `lambda_hard · σ`, and transforms back.
///
/// Returns the filtered stack and the retained-coefficient count. With
/// σ = 0 the stack is returned unchanged with full retention.
pub fn hard_threshold_group(
    stack: &[f64],
    block: [usize; 3],
    lambda_hard: f64,
    sigma: f64,
) -> Result<(Vec<f64>, usize)> {
    check_stack(stack.len(), block)?;
    if sigma == 0.0 {
        return Ok((stack.to_vec(), stack.len()));
    }
    let mut t = GroupTransform::new(block)?;
    let mut out = stack.to_vec();
    let n = hard_threshold_in_place(&mut t, &mut out, lambda_hard * sigma);
    Ok((out, n))
}

/// Scales each noisy coefficient by `B² / (B² + σ²)`, with `B` the matching
/// pilot coefficient. Returns the filtered stack and `Σ W²`. With σ = 0 the
/// stack is returned unchanged and `Σ W²` is the coefficient count.
pub fn wiener_shrink_group(
    noisy: &[f64],
    pilot: &[f64],
    block: [usize; 3],
    sigma: f64,
) -> Result<(Vec<f64>, f64)> {
    check_stack(noisy.len(), block)?;
    if noisy.len() != pilot.len() {
        return param("noisy and pilot groups differ in size");
    }
    if sigma == 0.0 {
        return Ok((noisy.to_vec(), noisy.len() as f64));
    }
    let mut t = GroupTransform::new(block)?;
    let mut out = noisy.to_vec();
    let mut p = pilot.to_vec();
    let w2 = wiener_in_place(&mut t, &mut out, &mut p, sigma);
    Ok((out, w2))
}
