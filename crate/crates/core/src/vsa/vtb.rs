//! Vector-derived transformation binding.
//!
//! With `d = m * m`, the binder `y` is read row-major as an `m x m` matrix
//! `Y` and scaled by `sqrt(m)`. Binding `x` by `y` multiplies each of the `m`
//! consecutive length-`m` blocks of `x` by `sqrt(m) * Y`; unbinding multiplies
//! by its transpose. For a unit-norm binder whose scaled matrix is
//! orthogonal (which is how atomic VTB vectors are generated) binding
//! preserves the norm exactly and unbinding is an exact inverse.

pub(crate) fn exact_sqrt(d: usize) -> Option<usize> {
    let m = (d as f64).sqrt().round() as usize;
    (m * m == d).then_some(m)
}

/// The binder whose scaled matrix is the identity.
pub(crate) fn identity(d: usize) -> Vec<f64> {
    let m = exact_sqrt(d).expect("VTB space is square");
    let inv = 1.0 / (m as f64).sqrt();
    let mut out = vec![0.0; d];
    for i in 0..m {
        out[i * m + i] = inv;
    }
    out
}

/// `transpose = false`: block `k` of the result is `sqrt(m) * Y * x_k`.
/// `transpose = true`: block `k` of the result is `sqrt(m) * Y^T * x_k`.
pub(crate) fn bind(x: &[f64], y: &[f64], transpose: bool) -> Vec<f64> {
    let d = x.len();
    let m = exact_sqrt(d).expect("VTB space is square");
    let mut out = vec![0.0; d];
    // Rows of X are the blocks, so the result is X * Y^T (bind) or X * Y (unbind).
    let (rsb, csb) = if transpose { (m as isize, 1) } else { (1, m as isize) };
    unsafe {
        matrixmultiply::dgemm(
            m,
            m,
            m,
            (m as f64).sqrt(),
            x.as_ptr(),
            m as isize,
            1,
            y.as_ptr(),
            rsb,
            csb,
            0.0,
            out.as_mut_ptr(),
            m as isize,
            1,
        );
    }
    out
}

/// Orthonormalizes the rows of a row-major `m x m` matrix in place
/// (modified Gram-Schmidt, two passes).
pub(crate) fn orthonormalize_rows(a: &mut [f64], m: usize) {
    for i in 0..m {
        for _ in 0..2 {
            for j in 0..i {
                let (done, rest) = a.split_at_mut(i * m);
                let qj = &done[j * m..(j + 1) * m];
                let ai = &mut rest[..m];
                let proj: f64 = qj.iter().zip(ai.iter()).map(|(q, v)| q * v).sum();
                ai.iter_mut().zip(qj).for_each(|(v, q)| *v -= proj * q);
            }
        }
        let row = &mut a[i * m..(i + 1) * m];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        row.iter_mut().for_each(|v| *v /= norm);
    }
}
