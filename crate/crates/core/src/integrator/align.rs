use nalgebra::{Matrix3, Vector3};

fn centroid(x: &[Vector3<f64>], w: &[f64]) -> Vector3<f64> {
    let total: f64 = w.iter().sum();
    x.iter().zip(w).map(|(x, w)| *w * x).sum::<Vector3<f64>>() / total
}

/// Proper rotation `R` minimizing `Σ w_i |p_i − R q_i|²` (Kabsch). Inputs
/// are used as given; remove centroids first if translation is free.
pub fn best_rotation(p: &[Vector3<f64>], q: &[Vector3<f64>], w: &[f64]) -> Matrix3<f64> {
    let h: Matrix3<f64> = p.iter().zip(q).zip(w).map(|((p, q), w)| *w * p * q.transpose()).sum();
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (u * vt).determinant().signum();
    u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * vt
}

/// `max_i |p_i − R q_i|` after removing both weighted centroids and applying
/// the best-fit rotation.
pub fn rigid_deviation(p: &[Vector3<f64>], q: &[Vector3<f64>], w: &[f64]) -> f64 {
    let (cp, cq) = (centroid(p, w), centroid(q, w));
    let p: Vec<_> = p.iter().map(|x| x - cp).collect();
    let q: Vec<_> = q.iter().map(|x| x - cq).collect();
    let r = best_rotation(&p, &q, w);
    p.iter().zip(&q).map(|(a, b)| (a - r * b).norm()).fold(0.0, f64::max)
}
