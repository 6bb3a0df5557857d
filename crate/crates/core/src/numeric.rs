//! Error-free transformations and tiny dense solvers.

/// `a + b = s + e` exactly.
#[inline]
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly (via fused multiply-add).
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Compensated dot product; as accurate as if evaluated in twice the working precision.
pub(crate) fn dot(xs: &[f64], ys: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let (p, ep) = two_prod(x, y);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// Compensated Horner evaluation of `coeffs[0] x^d + ... + coeffs[d]`.
pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut s = coeffs[0];
    let mut c = 0.0f64;
    for &a in &coeffs[1..] {
        let (p, ep) = two_prod(s, x);
        let (t, es) = two_sum(p, a);
        s = t;
        c = c.mul_add(x, ep + es);
    }
    s + c
}

/// `x * 2^e`, exact whenever the result is a normal number.
pub(crate) fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e)
}

/// Binary exponent of `|x|` (so that `|x| / 2^e` lies in `[1, 2)`); 0 for zero.
pub(crate) fn exponent(x: f64) -> i32 {
    if x == 0.0 || !x.is_finite() {
        return 0;
    }
    x.abs().log2().floor() as i32
}

/// Solves a 3x3 system by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `rel_tol` times the matrix max-norm.
pub(crate) fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3], rel_tol: f64) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() <= rel_tol * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (v, pv) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * pv;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    Some(out)
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`, by continued fractions.
/// Returns the first convergent within `tol` of `x`.
pub(crate) fn small_rational(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = (ai as i128 * k1 as i128 + k0 as i128) as u64;
        if k2 > max_den {
            break;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}
