//! Orthonormal transforms used on block groups: a DCT-II per spatial/time
//! axis of each block and a multi-level Haar along the grouping axis.

use crate::error::{param, Result};

/// Precomputed orthonormal DCT-II matrix for one length.
#[derive(Debug, Clone, PartialEq)]
pub struct DctBasis {
    n: usize,
    /// Row-major `n × n`, `m[k * n + i] = c(k) cos(π (2i + 1) k / 2n)`.
    m: Vec<f64>,
}

impl DctBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return param("DCT length must be at least 1");
        }
        let nf = n as f64;
        let mut m = Vec::with_capacity(n * n);
        for k in 0..n {
            let c = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            for i in 0..n {
                let angle = std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf);
                m.push(c * angle.cos());
            }
        }
        Ok(Self { n, m })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.m[k * n..(k + 1) * n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// The transpose of `forward` (a DCT-III with the same scaling).
    pub fn inverse(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.n;
        out[..n].fill(0.0);
        for (k, &c) in coeffs.iter().enumerate().take(n) {
            let row = &self.m[k * n..(k + 1) * n];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * c;
            }
        }
    }
}

pub fn dct_1d_forward(x: &[f64]) -> Result<Vec<f64>> {
    let basis = DctBasis::new(x.len())?;
    let mut out = vec![0.0; x.len()];
    basis.forward(x, &mut out);
    Ok(out)
}

pub fn dct_1d_inverse(coeffs: &[f64]) -> Result<Vec<f64>> {
    let basis = DctBasis::new(coeffs.len())?;
    let mut out = vec![0.0; coeffs.len()];
    basis.inverse(coeffs, &mut out);
    Ok(out)
}

fn check_haar_len(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return param(format!("Haar length must be a power of two, got {n}"));
    }
    Ok(())
}

/// In-place full-depth Haar. Output order: final approximation, then detail
/// bands from coarsest to finest.
fn haar_forward_in_place(x: &mut [f64], scratch: &mut [f64]) {
    let mut len = x.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let (a, b) = (x[2 * i], x[2 * i + 1]);
            scratch[i] = (a + b) * std::f64::consts::FRAC_1_SQRT_2;
            scratch[half + i] = (a - b) * std::f64::consts::FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&scratch[..len]);
        len = half;
    }
}

fn haar_inverse_in_place(x: &mut [f64], scratch: &mut [f64]) {
    let n = x.len();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for i in 0..half {
            let (s, d) = (x[i], x[half + i]);
            scratch[2 * i] = (s + d) * std::f64::consts::FRAC_1_SQRT_2;
            scratch[2 * i + 1] = (s - d) * std::f64::consts::FRAC_1_SQRT_2;
        }
        x[..len].copy_from_slice(&scratch[..len]);
        len *= 2;
    }
}

pub fn haar_1d_forward(x: &[f64]) -> Result<Vec<f64>> {
    check_haar_len(x.len())?;
    let mut out = x.to_vec();
    let mut scratch = vec![0.0; x.len()];
    haar_forward_in_place(&mut out, &mut scratch);
    Ok(out)
}

pub fn haar_1d_inverse(coeffs: &[f64]) -> Result<Vec<f64>> {
    check_haar_len(coeffs.len())?;
    let mut out = coeffs.to_vec();
    let mut scratch = vec![0.0; coeffs.len()];
    haar_inverse_in_place(&mut out, &mut scratch);
    Ok(out)
}

/// The Haar along the grouping axis, applied to whole `vox`-long blocks at a
/// time. Per element this is exactly `haar_forward_in_place`.
fn haar_blocks_forward(stack: &mut [f64], vox: usize, scratch: &mut [f64]) {
    let mut len = stack.len() / vox;
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let (a, b) = stack[2 * i * vox..(2 * i + 2) * vox].split_at(vox);
            let (lo, hi) = scratch.split_at_mut(half * vox);
            let s = &mut lo[i * vox..(i + 1) * vox];
            let d = &mut hi[i * vox..(i + 1) * vox];
            for k in 0..vox {
                s[k] = (a[k] + b[k]) * std::f64::consts::FRAC_1_SQRT_2;
                d[k] = (a[k] - b[k]) * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        stack[..len * vox].copy_from_slice(&scratch[..len * vox]);
        len = half;
    }
}

fn haar_blocks_inverse(stack: &mut [f64], vox: usize, scratch: &mut [f64]) {
    let n = stack.len() / vox;
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for i in 0..half {
            let s = &stack[i * vox..(i + 1) * vox];
            let d = &stack[(half + i) * vox..(half + i + 1) * vox];
            let (a, b) = scratch[2 * i * vox..(2 * i + 2) * vox].split_at_mut(vox);
            for k in 0..vox {
                a[k] = (s[k] + d[k]) * std::f64::consts::FRAC_1_SQRT_2;
                b[k] = (s[k] - d[k]) * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        stack[..len * vox].copy_from_slice(&scratch[..len * vox]);
        len *= 2;
    }
}

/// Applies `f` to every line of `data` along an axis with the given stride
/// and length, for a buffer laid out as `[... outer][len][stride]`.
fn along_axis(
    data: &mut [f64],
    stride: usize,
    len: usize,
    line: &mut [f64],
    out: &mut [f64],
    mut f: impl FnMut(&[f64], &mut [f64]),
) {
    let span = stride * len;
    for chunk in data.chunks_exact_mut(span) {
        for j in 0..stride {
            for k in 0..len {
                line[k] = chunk[j + k * stride];
            }
            f(&line[..len], &mut out[..len]);
            for k in 0..len {
                chunk[j + k * stride] = out[k];
            }
        }
    }
}

/// The separable 4-D group transform: DCT along x, y and t of every block,
/// then Haar across the stacked blocks.
///
/// Stacks are laid out `[member][x][y][t]`, t contiguous.
#[derive(Debug, Clone)]
pub struct GroupTransform {
    block: [usize; 3],
    bases: [DctBasis; 3],
    line: Vec<f64>,
    out: Vec<f64>,
    blocks: Vec<f64>,
}

impl GroupTransform {
    pub fn new(block: [usize; 3]) -> Result<Self> {
        let bases = [
            DctBasis::new(block[0])?,
            DctBasis::new(block[1])?,
            DctBasis::new(block[2])?,
        ];
        let longest = block.iter().copied().max().unwrap().max(64);
        Ok(Self {
            block,
            bases,
            line: vec![0.0; longest],
            out: vec![0.0; longest],
            blocks: Vec::new(),
        })
    }

    pub fn block_len(&self) -> usize {
        self.block.iter().product()
    }

    fn ensure_scratch(&mut self, n: usize) {
        if self.line.len() < n {
            self.line.resize(n, 0.0);
            self.out.resize(n, 0.0);
        }
    }

    /// Forward transform of an `m`-block stack in place. `m` must be a power
    /// of two.
    pub fn forward(&mut self, stack: &mut [f64]) {
        let [bx, by, bt] = self.block;
        let vox = self.block_len();
        let m = stack.len() / vox;
        debug_assert!(m.is_power_of_two() && m * vox == stack.len());
        self.ensure_scratch(m);
        let (line, out) = (&mut self.line, &mut self.out);
        let [dx, dy, dt] = &self.bases;
        for row in stack.chunks_exact_mut(bt) {
            dt.forward(row, out);
            row.copy_from_slice(&out[..bt]);
        }
        along_axis(stack, bt, by, line, out, |a, b| dy.forward(a, b));
        along_axis(stack, by * bt, bx, line, out, |a, b| dx.forward(a, b));
        if m > 1 {
            self.blocks.resize(stack.len(), 0.0);
            haar_blocks_forward(stack, vox, &mut self.blocks);
        }
    }

    pub fn inverse(&mut self, stack: &mut [f64]) {
        let [bx, by, bt] = self.block;
        let vox = self.block_len();
        let m = stack.len() / vox;
        debug_assert!(m.is_power_of_two() && m * vox == stack.len());
        self.ensure_scratch(m);
        let (line, out) = (&mut self.line, &mut self.out);
        let [dx, dy, dt] = &self.bases;
        if m > 1 {
            self.blocks.resize(stack.len(), 0.0);
            haar_blocks_inverse(stack, vox, &mut self.blocks);
        }
        along_axis(stack, by * bt, bx, line, out, |a, b| dx.inverse(a, b));
        along_axis(stack, bt, by, line, out, |a, b| dy.inverse(a, b));
        for row in stack.chunks_exact_mut(bt) {
            dt.inverse(row, out);
            row.copy_from_slice(&out[..bt]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    #[allow(clippy::approx_constant)] // the tabulated 5-digit value
    fn dct_fixtures() {
        assert!(close(
            &dct_1d_forward(&[1.0, 1.0]).unwrap(),
            &[SQRT_2, 0.0],
            1e-15
        ));
        // X(0) = 1/sqrt(2), X(1) = sqrt(2/2) cos(pi/4)
        let v = dct_1d_forward(&[1.0, 0.0]).unwrap();
        assert!(close(
            &v,
            &[FRAC_1_SQRT_2, (std::f64::consts::PI / 4.0).cos()],
            1e-15
        ));
        assert!((v[1] - 0.70711).abs() < 1e-5);
        assert_eq!(dct_1d_forward(&[3.5]).unwrap(), vec![3.5]);
    }

    #[test]
    fn dct_matches_direct_sum() {
        let x = [0.3, -1.2, 2.0, 0.7, 0.0, 1.1, -0.4, 0.9];
        let n = x.len() as f64;
        let got = dct_1d_forward(&x).unwrap();
        for (k, g) in got.iter().enumerate() {
            let c = if k == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            let direct: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n)).cos()
                })
                .sum();
            assert!((g - c * direct).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_lengths_are_rejected() {
        assert!(dct_1d_forward(&[]).is_err());
        assert!(dct_1d_inverse(&[]).is_err());
        assert!(haar_1d_forward(&[]).is_err());
        assert!(haar_1d_forward(&[1.0, 2.0, 3.0]).is_err());
        assert!(haar_1d_inverse(&[1.0; 6]).is_err());
    }

    #[test]
    fn haar_fixtures() {
        assert!(close(
            &haar_1d_forward(&[1.0, 1.0]).unwrap(),
            &[SQRT_2, 0.0],
            1e-15
        ));
        let h = haar_1d_forward(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(
            &h,
            &[5.0, -2.0, -FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            1e-14
        ));
        let energy: f64 = h.iter().map(|v| v * v).sum();
        assert!((energy - 30.0).abs() < 1e-12);
        assert_eq!(haar_1d_forward(&[7.0]).unwrap(), vec![7.0]);
        assert!(close(
            &haar_1d_inverse(&h).unwrap(),
            &[1.0, 2.0, 3.0, 4.0],
            1e-14
        ));
    }

    #[test]
    fn group_transform_round_trip_and_dc() {
        let block = [2, 3, 4];
        let mut t = GroupTransform::new(block).unwrap();
        for m in [1usize, 2, 4, 8] {
            let orig: Vec<f64> = (0..m * 24)
                .map(|i| ((i * 7919) % 23) as f64 * 0.1 - 1.0)
                .collect();
            let mut s = orig.clone();
            t.forward(&mut s);
            let e0: f64 = orig.iter().map(|v| v * v).sum();
            let e1: f64 = s.iter().map(|v| v * v).sum();
            assert!((e0 - e1).abs() <= 1e-9 * e0);
            // Index 0 is the global DC: sum / sqrt(count).
            let dc = orig.iter().sum::<f64>() / ((m * 24) as f64).sqrt();
            assert!((s[0] - dc).abs() < 1e-12);
            t.inverse(&mut s);
            assert!(close(&s, &orig, 1e-12));
        }
    }

    #[test]
    fn group_transform_matches_composed_1d_transforms() {
        // Oracle: build the 4-D transform from the public 1-D routines.
        let block = [2, 2, 4];
        let m = 2;
        let orig: Vec<f64> = (0..m * 16).map(|i| (i as f64 * 0.37).sin()).collect();
        let idx = |g: usize, x: usize, y: usize, t: usize| ((g * 2 + x) * 2 + y) * 4 + t;
        let mut oracle = orig.clone();
        for g in 0..m {
            for x in 0..2 {
                for y in 0..2 {
                    let line: Vec<f64> = (0..4).map(|t| oracle[idx(g, x, y, t)]).collect();
                    for (t, v) in dct_1d_forward(&line).unwrap().into_iter().enumerate() {
                        oracle[idx(g, x, y, t)] = v;
                    }
                }
                for t in 0..4 {
                    let line: Vec<f64> = (0..2).map(|y| oracle[idx(g, x, y, t)]).collect();
                    for (y, v) in dct_1d_forward(&line).unwrap().into_iter().enumerate() {
                        oracle[idx(g, x, y, t)] = v;
                    }
                }
            }
            for y in 0..2 {
                for t in 0..4 {
                    let line: Vec<f64> = (0..2).map(|x| oracle[idx(g, x, y, t)]).collect();
                    for (x, v) in dct_1d_forward(&line).unwrap().into_iter().enumerate() {
                        oracle[idx(g, x, y, t)] = v;
                    }
                }
            }
        }
        for v in 0..16 {
            let line: Vec<f64> = (0..m).map(|g| oracle[g * 16 + v]).collect();
            for (g, c) in haar_1d_forward(&line).unwrap().into_iter().enumerate() {
                oracle[g * 16 + v] = c;
            }
        }
        let mut t = GroupTransform::new(block).unwrap();
        let mut s = orig;
        t.forward(&mut s);
        assert!(close(&s, &oracle, 1e-12));
    }
}
