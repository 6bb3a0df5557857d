use crate::system::{iterate, Orbit, Params, Point};

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.max_dist(b) <= tol * a.norm_inf().max(b.norm_inf()).max(1.0)
}

/// Smallest `p` such that the orbit is `p`-periodic from some index on, together with
/// that index (the phase). The periodic tail must cover at least three periods.
///
/// Being the smallest, the returned period is prime.
pub fn detect_period(o: &Orbit, tol: f64) -> Option<(usize, usize)> {
    let pts = &o.points;
    let len = pts.len();
    for p in 1..=len / 3 {
        // walk back from the end while z_k and z_{k+p} agree
        let mut start = len - p;
        while start > 0 && close(&pts[start - 1], &pts[start - 1 + p], tol) {
            start -= 1;
        }
        if start < len - p && len - start >= 3 * p {
            return Some((p, start));
        }
    }
    None
}

/// A prime-period-2 orbit, which exists if and only if `alpha1 beta2 = 0`.
pub fn period2_criterion(p: &Params) -> Option<[Point; 2]> {
    let z0 = if p.alpha1 == 0.0 {
        // any (0, y0) with y0^2 != alpha2
        let y0 = if p.alpha2 == 1.0 { 2.0 } else { 1.0 };
        Point::new(0.0, y0)
    } else if p.beta2 == 0.0 {
        Point::new(0.0, -p.beta1)
    } else {
        return None;
    };
    let o = iterate(p, z0, 2, 1e-12);
    (o.points.len() == 3).then(|| [o.points[0], o.points[1]])
}
