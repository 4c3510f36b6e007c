//! Grouping of similar 3D blocks.

use crate::error::{param, Result};

use super::params::BMParams;

/// A real-valued volume borrowed in the same ix/iy/it layout as
/// [`ScanVolume`](crate::volume::ScanVolume).
#[derive(Debug, Clone, Copy)]
pub struct Field<'a> {
    pub data: &'a [f64],
    pub dims: [usize; 3],
}

impl<'a> Field<'a> {
    pub fn new(data: &'a [f64], dims: [usize; 3]) -> Self {
        debug_assert_eq!(data.len(), dims.iter().product::<usize>());
        Self { data, dims }
    }

    #[inline]
    pub fn offset(&self, c: [usize; 3]) -> usize {
        (c[0] * self.dims[1] + c[1]) * self.dims[2] + c[2]
    }

    /// Copies the block at `origin` into `out` in `[x][y][t]` order.
    pub fn read_block(&self, origin: [usize; 3], block: [usize; 3], out: &mut [f64]) {
        let [bx, by, bt] = block;
        let mut k = 0;
        for x in 0..bx {
            for y in 0..by {
                let start = self.offset([origin[0] + x, origin[1] + y, origin[2]]);
                out[k..k + bt].copy_from_slice(&self.data[start..start + bt]);
                k += bt;
            }
        }
    }

    /// Sum of squared differences between a contiguous `reference` block and
    /// the block at `b`, abandoned early once it exceeds `limit`. Returns
    /// `None` when abandoned.
    fn ssd_bounded(
        &self,
        reference: &[f64],
        b: [usize; 3],
        block: [usize; 3],
        limit: f64,
    ) -> Option<f64> {
        let [bx, by, bt] = block;
        let (sx, sy) = (self.dims[1] * self.dims[2], self.dims[2]);
        let base = self.offset(b);
        let mut sum = 0.0;
        let mut rows = reference.chunks_exact(bt);
        for x in 0..bx {
            for y in 0..by {
                let sb = base + x * sx + y * sy;
                sum += row_ssd(
                    rows.next().expect("reference block length"),
                    &self.data[sb..sb + bt],
                );
                if sum > limit {
                    return None;
                }
            }
        }
        Some(sum)
    }
}

/// Squared distance between two rows, with four independent accumulators so
/// the loop vectorizes. The summation order is fixed.
#[inline]
fn row_ssd(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (p, q) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            let d = p[k] - q[k];
            acc[k] += d * d;
        }
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(p, q)| (p - q) * (p - q))
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Per-voxel normalized squared distance between two equally shaped blocks.
pub fn block_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return param(format!(
            "block shapes differ or are empty: {} vs {} voxels",
            a.len(),
            b.len()
        ));
    }
    let ssd: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    Ok(ssd / a.len() as f64)
}

/// A reference block and the blocks matched to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub ref_coord: [usize; 3],
    /// Reference first, then by ascending distance with lexicographic ties.
    pub members: Vec<[usize; 3]>,
    pub distances: Vec<f64>,
}

impl Group {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Stacks the member blocks of `field` as `[member][x][y][t]`.
    pub fn stack(&self, field: &Field<'_>, block: [usize; 3]) -> Vec<f64> {
        let vox: usize = block.iter().product();
        let mut data = vec![0.0; vox * self.members.len()];
        self.stack_into(field, block, &mut data);
        data
    }

    pub fn stack_into(&self, field: &Field<'_>, block: [usize; 3], out: &mut [f64]) {
        let vox: usize = block.iter().product();
        for (chunk, &origin) in out.chunks_exact_mut(vox).zip(&self.members) {
            field.read_block(origin, block, chunk);
        }
    }
}

fn search_range(
    r: usize,
    radius: usize,
    dim: usize,
    block: usize,
) -> std::ops::RangeInclusive<usize> {
    r.saturating_sub(radius)..=(r + radius).min(dim - block)
}

/// Finds the blocks within the search window whose distance to the
/// reference is at most `threshold`, keeping the closest power-of-two count
/// up to `params.max_group`.
pub fn match_in(
    field: &Field<'_>,
    ref_coord: [usize; 3],
    params: &BMParams,
    threshold: f64,
) -> Group {
    let block = params.block;
    let nvox = params.block_len() as f64;
    let limit = threshold * nvox;
    let ranges: Vec<_> = (0..3)
        .map(|a| {
            search_range(
                ref_coord[a],
                params.search_radius[a],
                field.dims[a],
                block[a],
            )
        })
        .collect();

    let mut reference = vec![0.0; params.block_len()];
    field.read_block(ref_coord, block, &mut reference);
    let mut found: Vec<(f64, [usize; 3])> = Vec::new();
    for x in ranges[0].clone() {
        for y in ranges[1].clone() {
            for t in ranges[2].clone() {
                let c = [x, y, t];
                if c == ref_coord {
                    continue;
                }
                if let Some(ssd) = field.ssd_bounded(&reference, c, block, limit) {
                    let d = ssd / nvox;
                    if d <= threshold {
                        found.push((d, c));
                    }
                }
            }
        }
    }
    let count = (found.len() + 1).min(params.max_group);
    let m = 1usize << (usize::BITS - 1 - count.leading_zeros());
    let order =
        |a: &(f64, [usize; 3]), b: &(f64, [usize; 3])| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if m - 1 < found.len() && m > 1 {
        found.select_nth_unstable_by(m - 2, order);
        found.truncate(m - 1);
    }
    found.sort_by(order);

    let mut members = Vec::with_capacity(m);
    let mut distances = Vec::with_capacity(m);
    members.push(ref_coord);
    distances.push(0.0);
    for &(d, c) in found.iter().take(m - 1) {
        members.push(c);
        distances.push(d);
    }
    Group {
        ref_coord,
        members,
        distances,
    }
}
