use crate::error::Result;
use crate::volume::ScanVolume;

use super::{check_window, clamped, map_ascans};

pub fn median_signal(x: &[f64], window: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut scratch = vec![0.0; window];
    median_into(x, window, &mut scratch, &mut out);
    out
}

fn median_into(x: &[f64], window: usize, scratch: &mut [f64], out: &mut [f64]) {
    let half = (window / 2) as isize;
    for (i, o) in out.iter_mut().enumerate() {
        for (k, s) in scratch.iter_mut().enumerate() {
            *s = clamped(x, i as isize + k as isize - half);
        }
        let (_, m, _) = scratch.select_nth_unstable_by(window / 2, f64::total_cmp);
        *o = *m;
    }
}

pub fn median_1d(vol: &ScanVolume, window: usize) -> Result<ScanVolume> {
    check_window(window, vol.nt())?;
    Ok(map_ascans(vol, |x, out| {
        let mut scratch = vec![0.0; window];
        median_into(x, window, &mut scratch, out)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::ScanMetadata;

    #[test]
    fn spike_is_removed() {
        assert_eq!(median_signal(&[1.0, 9.0, 1.0], 3), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn window_one_is_identity() {
        let x = [3.0, -1.0, 2.0, 7.5];
        assert_eq!(median_signal(&x, 1), x.to_vec());
    }

    #[test]
    fn constant_is_unchanged() {
        assert_eq!(median_signal(&[0.4; 9], 5), vec![0.4; 9]);
    }

    #[test]
    fn idempotent_on_monotone_signals() {
        let x: Vec<f64> = (0..20)
            .map(|i| (i as f64).sqrt() + (i / 4) as f64)
            .collect();
        let once = median_signal(&x, 3);
        assert_eq!(median_signal(&once, 3), once);
    }

    #[test]
    fn bad_windows_are_rejected() {
        let v = ScanVolume::zeros(1, 1, 4, ScanMetadata::default()).unwrap();
        assert!(median_1d(&v, 4).is_err());
        assert!(median_1d(&v, 0).is_err());
        assert!(median_1d(&v, 5).is_err());
        assert!(median_1d(&v, 3).is_ok());
    }
}
