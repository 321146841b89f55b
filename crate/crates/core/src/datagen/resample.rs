use crate::error::{check_len, Error, Result};
use crate::Scalar;

/// Piecewise-linear interpolation of `values` given at strictly increasing
/// `src` nodes onto `dst`. Points outside `[src[0], src[last]]` are rejected.
pub fn resample_linear<T: Scalar>(values: &[T], src: &[T], dst: &[T]) -> Result<Vec<T>> {
    check_len("resample values", src.len(), values.len())?;
    if src.is_empty() {
        return Err(Error::Empty("resample source grid"));
    }
    if src.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "source nodes must be strictly increasing".into(),
        ));
    }
    let (lo, hi) = (src[0], src[src.len() - 1]);
    dst.iter()
        .map(|&x| {
            if !(x >= lo && x <= hi) {
                return Err(Error::OutOfRange {
                    value: x.to_f64_lossless(),
                    lo: lo.to_f64_lossless(),
                    hi: hi.to_f64_lossless(),
                });
            }
            if src.len() == 1 {
                return Ok(values[0]);
            }
            // first node strictly greater than x, clamped so [k-1, k] is a valid cell
            let k = src.partition_point(|&s| s <= x).clamp(1, src.len() - 1);
            let (x0, x1) = (src[k - 1], src[k]);
            if x == x0 {
                return Ok(values[k - 1]);
            }
            if x == x1 {
                return Ok(values[k]);
            }
            let t = (x - x0) / (x1 - x0);
            Ok(values[k - 1] + (values[k] - values[k - 1]) * t)
        })
        .collect()
}

/// `n + 1` equispaced nodes on `[a, b]`, endpoints exact.
pub fn uniform_nodes(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    let n = intervals as f64;
    (0..=intervals)
        .map(|i| {
            if i == intervals {
                b
            } else {
                a + (b - a) * (i as f64 / n)
            }
        })
        .collect()
}
