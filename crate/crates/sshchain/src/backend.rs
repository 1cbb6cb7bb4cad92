//! Thin wrappers over the system LAPACK/BLAS (zgeev, zgemm) on column-major
//! buffers. Everything else in the crate works on plain slices, so these are
//! the only unsafe calls.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Full non-symmetric eigendecomposition of an n×n column-major matrix.
/// `a` is destroyed. Returns (eigenvalues, right eigenvectors column-major).
pub(crate) fn zgeev(n: usize, a: &mut [Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    assert_eq!(a.len(), n * n);
    let ni = i32::try_from(n).map_err(|_| Error::Eigensolver("dimension overflow".into()))?;
    let mut w = vec![Complex64::ZERO; n];
    let mut vr = vec![Complex64::ZERO; n * n];
    let mut vl: Vec<Complex64> = Vec::new();
    let mut rwork = vec![0.0f64; 2 * n];
    let mut info = 0i32;

    // workspace query, then the real call
    let mut query = [Complex64::ZERO];
    unsafe {
        lapack::zgeev(
            b'N', b'V', ni, a, ni, &mut w, &mut vl, 1, &mut vr, ni, &mut query, -1, &mut rwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(format!(
            "zgeev workspace query failed (info={info})"
        )));
    }
    let lwork = (query[0].re as usize).max(2 * n);
    let mut work = vec![Complex64::ZERO; lwork];
    unsafe {
        lapack::zgeev(
            b'N',
            b'V',
            ni,
            a,
            ni,
            &mut w,
            &mut vl,
            1,
            &mut vr,
            ni,
            &mut work,
            lwork as i32,
            &mut rwork,
            &mut info,
        );
    }
    match info {
        0 => Ok((w, vr)),
        i if i < 0 => Err(Error::Eigensolver(format!(
            "zgeev: illegal argument {}",
            -i
        ))),
        i => Err(Error::Eigensolver(format!(
            "QR iteration failed to converge; eigenvalues 0..{} of {} unconverged",
            i, n
        ))),
    }
}

/// C ← op(A)·op(B) for column-major buffers; `trans*` is one of b'N', b'T', b'C'.
/// Shapes: op(A) is m×k, op(B) is k×n, C is m×n.
#[allow(clippy::too_many_arguments)]
pub(crate) fn zgemm(
    transa: u8,
    transb: u8,
    m: usize,
    n: usize,
    k: usize,
    a: &[Complex64],
    lda: usize,
    b: &[Complex64],
    ldb: usize,
    c: &mut [Complex64],
    ldc: usize,
) {
    assert!(c.len() >= ldc * n.max(1));
    unsafe {
        blas::zgemm(
            transa,
            transb,
            m as i32,
            n as i32,
            k as i32,
            Complex64::new(1.0, 0.0),
            a,
            lda as i32,
            b,
            ldb as i32,
            Complex64::ZERO,
            c,
            ldc as i32,
        );
    }
}
