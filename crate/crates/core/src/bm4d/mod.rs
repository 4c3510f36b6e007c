//! Two-stage block-matching collaborative filtering of scan volumes.
//!
//! Both stages walk a grid of reference blocks. For each reference, similar
//! blocks from a local search window are stacked into a group along a fourth
//! axis, the group is transformed with a separable orthonormal transform
//! (DCT-II per block axis, Haar across the stack), shrunk, transformed back,
//! and every filtered block is accumulated into per-voxel weighted sums.
//!
//! * Stage 1 matches on the noisy volume, hard-thresholds coefficients below
//!   `lambda_hard · σ`, and weights each group by `1 / (σ² · n_retained)`.
//! * Stage 2 matches on the stage-1 "basic estimate" with a tighter
//!   threshold, applies empirical Wiener shrinkage to the noisy group using
//!   the basic-estimate group as pilot, and weights by `1 / (σ² · Σ W²)`.
//!
//! Aggregation is deterministic: the default [`Aggregation::Ordered`] mode
//! filters groups in parallel but accumulates them in reference order, so
//! the output does not depend on the thread count.

mod matching;
mod params;
mod shrink;
mod sigma;
mod transform;

pub use matching::{block_distance, match_in, Field, Group};
pub use params::{BMParams, EXACT_MATCH_EPS, WIENER_TAU_FACTOR};
pub use shrink::{hard_threshold_group, wiener_shrink_group};
pub use sigma::{estimate_sigma_mad, MAD_SCALE};
pub use transform::{
    dct_1d_forward, dct_1d_inverse, haar_1d_forward, haar_1d_inverse, DctBasis, GroupTransform,
};

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::volume::ScanVolume;

use shrink::{hard_threshold_in_place, wiener_in_place};

const BATCH: usize = 512;

/// How filtered groups are folded into the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    /// Groups accumulated one by one in reference order. Bit-identical for
    /// any thread count.
    #[default]
    Ordered,
    /// References split into this many contiguous partitions, each with a
    /// private buffer; buffers are summed in partition order.
    Partitioned(usize),
}

/// Per-voxel weighted sums of filtered block estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationBuffer {
    dims: [usize; 3],
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl AggregationBuffer {
    pub fn new(dims: [usize; 3]) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            numerator: vec![0.0; n],
            denominator: vec![0.0; n],
        }
    }

    /// Adds one `[x][y][t]` block with the given weight.
    pub fn add_block(&mut self, origin: [usize; 3], block: [usize; 3], data: &[f64], weight: f64) {
        let [bx, by, bt] = block;
        let [_, ny, nt] = self.dims;
        let mut k = 0;
        for x in 0..bx {
            for y in 0..by {
                let start = ((origin[0] + x) * ny + origin[1] + y) * nt + origin[2];
                let num = &mut self.numerator[start..start + bt];
                let den = &mut self.denominator[start..start + bt];
                for ((n, d), v) in num.iter_mut().zip(den.iter_mut()).zip(&data[k..k + bt]) {
                    *n += weight * v;
                    *d += weight;
                }
                k += bt;
            }
        }
    }

    pub fn merge(&mut self, other: &AggregationBuffer) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.numerator.iter_mut().zip(&other.numerator) {
            *a += b;
        }
        for (a, b) in self.denominator.iter_mut().zip(&other.denominator) {
            *a += b;
        }
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    /// Weighted averages. Every voxel must have been covered.
    pub fn finish(&self) -> Vec<f64> {
        self.numerator
            .iter()
            .zip(&self.denominator)
            .map(|(n, d)| {
                assert!(*d > 0.0, "aggregation left a voxel uncovered");
                n / d
            })
            .collect()
    }
}

/// Reference positions along one axis: every `step` from 0, plus the last
/// position that still fits so the final samples are covered.
pub fn reference_positions(n: usize, block: usize, step: usize) -> Vec<usize> {
    let last = n - block;
    let mut v: Vec<usize> = (0..=last).step_by(step).collect();
    if *v.last().unwrap() != last {
        v.push(last);
    }
    v
}

pub fn reference_coords(dims: [usize; 3], params: &BMParams) -> Vec<[usize; 3]> {
    let axes: Vec<Vec<usize>> = (0..3)
        .map(|a| reference_positions(dims[a], params.block[a], params.step[a]))
        .collect();
    let mut out = Vec::with_capacity(axes.iter().map(Vec::len).product());
    for &x in &axes[0] {
        for &y in &axes[1] {
            for &t in &axes[2] {
                out.push([x, y, t]);
            }
        }
    }
    out
}

/// Groups blocks similar to the one at `ref_coord` using the stage-1
/// threshold `match_tau · σ²`.
pub fn match_blocks(vol: &ScanVolume, ref_coord: [usize; 3], params: &BMParams) -> Result<Group> {
    params.validate(vol.dims())?;
    let dims = [vol.nx(), vol.ny(), vol.nt()];
    if (0..3).any(|a| ref_coord[a] + params.block[a] > dims[a]) {
        return param(format!(
            "reference block at {ref_coord:?} does not fit in {dims:?}"
        ));
    }
    let data = vol.to_f64();
    let field = Field::new(&data, dims);
    Ok(match_in(
        &field,
        ref_coord,
        params,
        params.match_threshold(params.match_tau),
    ))
}

#[derive(Clone, Copy)]
enum Stage<'a> {
    Hard,
    Wiener { pilot: Field<'a> },
}

struct Filtered {
    members: Vec<[usize; 3]>,
    stack: Vec<f64>,
    weight: f64,
}

struct Worker {
    transform: GroupTransform,
    pilot_stack: Vec<f64>,
}

impl Worker {
    fn new(params: &BMParams) -> Self {
        Self {
            transform: GroupTransform::new(params.block).expect("validated block"),
            pilot_stack: Vec::new(),
        }
    }

    fn filter(
        &mut self,
        noisy: &Field<'_>,
        stage: Stage<'_>,
        r: [usize; 3],
        params: &BMParams,
    ) -> Filtered {
        let sigma = params.sigma;
        let s2 = sigma * sigma;
        match stage {
            Stage::Hard => {
                let group = match_in(noisy, r, params, params.match_threshold(params.match_tau));
                let mut stack = group.stack(noisy, params.block);
                let weight = if sigma > 0.0 {
                    let n = hard_threshold_in_place(
                        &mut self.transform,
                        &mut stack,
                        params.lambda_hard * sigma,
                    );
                    1.0 / (s2 * n.max(1) as f64)
                } else {
                    1.0 / stack.len() as f64
                };
                Filtered {
                    members: group.members,
                    stack,
                    weight,
                }
            }
            Stage::Wiener { pilot } => {
                let tau = WIENER_TAU_FACTOR * params.match_tau;
                let group = match_in(&pilot, r, params, params.match_threshold(tau));
                let mut stack = group.stack(noisy, params.block);
                let weight = if sigma > 0.0 {
                    self.pilot_stack.resize(stack.len(), 0.0);
                    group.stack_into(&pilot, params.block, &mut self.pilot_stack);
                    let w2 = wiener_in_place(
                        &mut self.transform,
                        &mut stack,
                        &mut self.pilot_stack,
                        sigma,
                    );
                    1.0 / (s2 * w2.max(1e-12))
                } else {
                    1.0 / stack.len() as f64
                };
                Filtered {
                    members: group.members,
                    stack,
                    weight,
                }
            }
        }
    }
}

fn accumulate(buf: &mut AggregationBuffer, f: &Filtered, block: [usize; 3]) {
    let vox: usize = block.iter().product();
    for (chunk, &origin) in f.stack.chunks_exact(vox).zip(&f.members) {
        buf.add_block(origin, block, chunk, f.weight);
    }
}

fn run_stage(
    noisy: &Field<'_>,
    stage: Stage<'_>,
    params: &BMParams,
    mode: Aggregation,
) -> Vec<f64> {
    let refs = reference_coords(noisy.dims, params);
    let buf = match mode {
        Aggregation::Ordered => {
            let mut buf = AggregationBuffer::new(noisy.dims);
            for batch in refs.chunks(BATCH) {
                let filtered: Vec<Filtered> = batch
                    .par_iter()
                    .map_init(
                        || Worker::new(params),
                        |w, &r| w.filter(noisy, stage, r, params),
                    )
                    .collect();
                for f in &filtered {
                    accumulate(&mut buf, f, params.block);
                }
            }
            buf
        }
        Aggregation::Partitioned(parts) => {
            let parts = parts.clamp(1, refs.len());
            let size = refs.len().div_ceil(parts);
            let partials: Vec<AggregationBuffer> = refs
                .par_chunks(size)
                .map(|chunk| {
                    let mut worker = Worker::new(params);
                    let mut buf = AggregationBuffer::new(noisy.dims);
                    for &r in chunk {
                        let f = worker.filter(noisy, stage, r, params);
                        accumulate(&mut buf, &f, params.block);
                    }
                    buf
                })
                .collect();
            let mut iter = partials.into_iter();
            let mut buf = iter.next().expect("at least one partition");
            for b in iter {
                buf.merge(&b);
            }
            buf
        }
    };
    buf.finish()
}

/// Both stages' outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStage {
    pub basic: ScanVolume,
    pub estimate: ScanVolume,
}

fn prepare(vol: &ScanVolume, params: &BMParams) -> Result<(Vec<f64>, [usize; 3])> {
    params.validate(vol.dims())?;
    Ok((vol.to_f64(), [vol.nx(), vol.ny(), vol.nt()]))
}

/// Stage 1 only: the hard-thresholding basic estimate.
pub fn denoise_hard(vol: &ScanVolume, params: &BMParams) -> Result<ScanVolume> {
    denoise_hard_with(vol, params, Aggregation::Ordered)
}

pub fn denoise_hard_with(
    vol: &ScanVolume,
    params: &BMParams,
    mode: Aggregation,
) -> Result<ScanVolume> {
    let (data, dims) = prepare(vol, params)?;
    let noisy = Field::new(&data, dims);
    Ok(vol.narrowed_like(&run_stage(&noisy, Stage::Hard, params, mode)))
}

/// The full two-stage filter.
pub fn denoise_bm4d(vol: &ScanVolume, params: &BMParams) -> Result<ScanVolume> {
    Ok(denoise_two_stage(vol, params, Aggregation::Ordered)?.estimate)
}

pub fn denoise_two_stage(
    vol: &ScanVolume,
    params: &BMParams,
    mode: Aggregation,
) -> Result<TwoStage> {
    let (data, dims) = prepare(vol, params)?;
    let noisy = Field::new(&data, dims);
    let basic = run_stage(&noisy, Stage::Hard, params, mode);
    let pilot = Field::new(&basic, dims);
    let estimate = run_stage(&noisy, Stage::Wiener { pilot }, params, mode);
    Ok(TwoStage {
        basic: vol.narrowed_like(&basic),
        estimate: vol.narrowed_like(&estimate),
    })
}
