//! Shared oracles for the integration suites: a fixed-point big-integer
//! evaluator for the trigonometric pieces of the bond formula, a
//! Durand-Kerner root finder for tridiagonal characteristic polynomials, a
//! momentum-space winding count, and multiset matching helpers. Everything
//! here is independent of the library's numerics so it can serve as a
//! cross-check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;

// ---------------------------------------------------------------------------
// fixed-point arithmetic at 40 decimal digits

const DIGITS: u32 = 40;

fn scale() -> BigInt {
    BigInt::from(10).pow(DIGITS)
}

fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / scale()
}

/// Exact conversion: every f64 is m·2^e with integer m, so the fixed-point
/// image is exact up to the final 10^-40 truncation.
pub fn fx_from_f64(x: f64) -> BigInt {
    assert!(x.is_finite());
    if x == 0.0 {
        return BigInt::from(0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let fraction = bits & 0xf_ffff_ffff_ffff;
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074i64)
    } else {
        (fraction | (1 << 52), exponent - 1075)
    };
    let mut v = BigInt::from(mantissa) * scale() * sign;
    if exp >= 0 {
        v <<= exp as u32;
    } else {
        v /= BigInt::from(1) << (-exp) as u32;
    }
    v
}

/// Fixed-point to f64 through a 10^-20 grid (ample for 1e-15 comparisons).
pub fn fx_to_f64(v: &BigInt) -> f64 {
    let q = v / BigInt::from(10).pow(20);
    let q: i128 = q.try_into().expect("fixed-point value out of f64 range");
    q as f64 / 1e20
}

/// Integer square root by Newton iteration.
fn isqrt(v: &BigInt) -> BigInt {
    assert!(v >= &BigInt::from(0));
    if v < &BigInt::from(2) {
        return v.clone();
    }
    let mut x: BigInt = BigInt::from(1) << ((v.bits() as u32).div_ceil(2) + 1);
    loop {
        let y = (&x + v / &x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// √5 in fixed point.
pub fn sqrt5() -> BigInt {
    isqrt(&(BigInt::from(5) * scale() * scale()))
}

/// (√5 − 1)/2 in fixed point.
pub fn inv_golden_ratio() -> BigInt {
    (sqrt5() - scale()) / 2
}

/// π by Machin's formula: π = 16·atan(1/5) − 4·atan(1/239).
pub fn pi() -> BigInt {
    fn atan_inv(x: i64) -> BigInt {
        // Σ (−1)^k / ((2k+1)·x^(2k+1)), all in fixed point
        let mut sum = BigInt::from(0);
        let mut power = BigInt::from(x);
        let x2 = BigInt::from(x) * BigInt::from(x);
        let mut k = 0u32;
        loop {
            let term = scale() / (&power * BigInt::from(2 * k + 1));
            if term == BigInt::from(0) {
                return sum;
            }
            if k.is_multiple_of(2) {
                sum += term;
            } else {
                sum -= term;
            }
            power *= &x2;
            k += 1;
        }
    }
    atan_inv(5) * 16 - atan_inv(239) * 4
}

fn reduce_mod_two_pi(x: &BigInt) -> BigInt {
    let tp = pi() * 2;
    let r = x % &tp;
    if r < BigInt::from(0) {
        r + tp
    } else {
        r
    }
}

/// cos by Taylor series after reduction into [0, 2π).
pub fn cos_fx(x: &BigInt) -> BigInt {
    let x = reduce_mod_two_pi(x);
    let x2 = mul(&x, &x);
    let mut term = scale();
    let mut sum = scale();
    let mut k = 0u32;
    loop {
        term = mul(&term, &x2) / BigInt::from((2 * k + 1) * (2 * k + 2));
        if term == BigInt::from(0) {
            return sum;
        }
        if k.is_multiple_of(2) {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
}

/// sin by Taylor series after reduction into [0, 2π).
pub fn sin_fx(x: &BigInt) -> BigInt {
    let x = reduce_mod_two_pi(x);
    let x2 = mul(&x, &x);
    let mut term = x.clone();
    let mut sum = x;
    let mut k = 0u32;
    loop {
        term = mul(&term, &x2) / BigInt::from((2 * k + 2) * (2 * k + 3));
        if term == BigInt::from(0) {
            return sum;
        }
        if k.is_multiple_of(2) {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
}

/// cosh by Taylor series (arguments stay O(10) in these tests).
pub fn cosh_fx(x: &BigInt) -> BigInt {
    let x2 = mul(x, x);
    let mut term = scale();
    let mut sum = scale();
    let mut k = 0u32;
    loop {
        term = mul(&term, &x2) / BigInt::from((2 * k + 1) * (2 * k + 2));
        if term == BigInt::from(0) {
            return sum;
        }
        sum += &term;
        k += 1;
    }
}

/// sinh by Taylor series.
pub fn sinh_fx(x: &BigInt) -> BigInt {
    let x2 = mul(x, x);
    let mut term = x.clone();
    let mut sum = x.clone();
    let mut k = 0u32;
    loop {
        term = mul(&term, &x2) / BigInt::from((2 * k + 2) * (2 * k + 3));
        if term == BigInt::from(0) {
            return sum;
        }
        sum += &term;
        k += 1;
    }
}

// ---------------------------------------------------------------------------
// characteristic polynomial and root finding

/// Coefficients (ascending degree) of det(H − E·I) for a zero-diagonal
/// tridiagonal matrix with symmetric off-diagonal band `off`, via the
/// three-term recurrence D_k = −E·D_{k−1} − a_{k−1}²·D_{k−2}.
pub fn char_poly_tridiagonal(off: &[Complex64]) -> Vec<Complex64> {
    let n = off.len() + 1;
    let mut prev: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)]; // D_0
    let mut cur: Vec<Complex64> = vec![Complex64::ZERO, Complex64::new(-1.0, 0.0)]; // D_1 = −E
    for k in 2..=n {
        let a2 = off[k - 2] * off[k - 2];
        let mut next = vec![Complex64::ZERO; k + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] -= c; // −E·D_{k−1}
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= a2 * c; // −a²·D_{k−2}
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::ZERO, |acc, &c| acc * z + c)
}

/// All roots of a complex polynomial by Durand-Kerner iteration.
pub fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let lead = *coeffs.last().expect("empty polynomial");
    assert!(lead.norm() > 0.0, "leading coefficient vanishes");
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    let n = monic.len() - 1;
    assert!(n >= 1);

    // Cauchy bound on root modulus for the initial ring
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|i| seed.powu(i as u32 + 1) * radius)
        .collect();

    for _ in 0..500 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            let delta = horner(&monic, z[i]) / denom;
            z[i] -= delta;
            worst = worst.max(delta.norm());
        }
        if worst < 1e-13 * radius {
            break;
        }
    }
    z
}

// ---------------------------------------------------------------------------
// momentum-space winding and multiset comparison

/// Winding of h(k) = t1 + t2·e^{ik} around the origin, by accumulating the
/// principal-branch phase increment over a fine partition of [0, 2π].
pub fn momentum_winding(t1: f64, t2: f64) -> i32 {
    const PANELS: usize = 4096;
    let mut total = 0.0f64;
    let h = |k: f64| Complex64::new(t1 + t2 * k.cos(), t2 * k.sin());
    for m in 0..PANELS {
        let k0 = 2.0 * std::f64::consts::PI * m as f64 / PANELS as f64;
        let k1 = 2.0 * std::f64::consts::PI * (m + 1) as f64 / PANELS as f64;
        total += (h(k1) / h(k0)).arg();
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

/// Greedy minimum-distance matching between two equal-size multisets;
/// returns the largest matched distance.
pub fn match_residual(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().total_cmp(&a[i].norm()).then(i.cmp(&j)));
    let mut used = vec![false; a.len()];
    let mut worst = 0.0f64;
    for &i in &order {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, &bj) in b.iter().enumerate() {
            if !used[j] {
                let d = (a[i] - bj).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Largest over states of the distance to the nearest negated partner:
/// zero when the spectrum is exactly symmetric under E ↔ −E.
pub fn max_pairing_defect(eigenvalues: &[Complex64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&e| {
            eigenvalues
                .iter()
                .map(|&f| (e + f).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
