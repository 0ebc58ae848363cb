//! Row-major tensor helpers shared by the multivariate transforms.

use num_complex::Complex64;

/// Replaces axis `axis` of a row-major tensor by contracting it with `table`.
///
/// `table` is `new_len × shape[axis]`, row-major; the result has the same
/// shape except `shape[axis] = new_len`.
pub(crate) fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    table: &[Complex64],
    new_len: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let old_len = shape[axis];
    debug_assert_eq!(table.len(), new_len * old_len);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * new_len * inner];
    for o in 0..outer {
        let src = &data[o * old_len * inner..(o + 1) * old_len * inner];
        let dst = &mut out[o * new_len * inner..(o + 1) * new_len * inner];
        for r in 0..new_len {
            let row = &table[r * old_len..(r + 1) * old_len];
            let dst_row = &mut dst[r * inner..(r + 1) * inner];
            for (k, &w) in row.iter().enumerate() {
                let src_row = &src[k * inner..(k + 1) * inner];
                for (d, &s) in dst_row.iter_mut().zip(src_row) {
                    *d += w * s;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = new_len;
    (out, new_shape)
}

/// Decomposes a row-major flat index into per-axis positions.
pub(crate) fn unravel(mut flat: usize, shape: &[usize], out: &mut [usize]) {
    for j in (0..shape.len()).rev() {
        out[j] = flat % shape[j];
        flat /= shape[j];
    }
}
