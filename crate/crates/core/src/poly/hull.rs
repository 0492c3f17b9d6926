use super::Complex;
use crate::error::{Error, Result};

/// Convex hull of a finite planar point set.
///
/// Vertices are counterclockwise and in strictly convex position. One vertex
/// means a point region, two a segment (collinear input).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRegion {
    vertices: Vec<Complex>,
}

impl ConvexRegion {
    pub fn vertices(&self) -> &[Complex] {
        &self.vertices
    }

    /// Point or segment.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Largest distance from the origin to the region.
    pub fn max_modulus(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn cross(o: Complex, a: Complex, b: Complex) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Andrew's monotone chain; collinear boundary points are dropped.
pub fn convex_hull(points: &[Complex]) -> Result<ConvexRegion> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(ConvexRegion { vertices: pts });
    }
    let scale = pts.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-14 * scale * scale;
    let mut lower: Vec<Complex> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(ConvexRegion { vertices: lower })
}

fn segment_distance(a: Complex, b: Complex, z: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Euclidean distance from `z` to the region; zero inside or on the boundary.
pub fn hull_distance(region: &ConvexRegion, z: Complex) -> f64 {
    let v = &region.vertices;
    match v.len() {
        0 => f64::INFINITY,
        1 => (z - v[0]).norm(),
        2 => segment_distance(v[0], v[1], z),
        n => {
            let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], z) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n)
                    .map(|i| segment_distance(v[i], v[(i + 1) % n], z))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{roots, Polynomial};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn unit_square() -> ConvexRegion {
        convex_hull(&[
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 1.0),
            c(1.0, 1.0),
            c(0.5, 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn square_drops_interior_point() {
        let sq = unit_square();
        assert_eq!(
            sq.vertices(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]
        );
    }

    #[test]
    fn single_point_region() {
        let r = convex_hull(&[c(0.0, 0.0)]).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(hull_distance(&r, c(3.0, 4.0)), 5.0);
        assert_eq!(convex_hull(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn collinear_points_give_segment() {
        let r = convex_hull(&[c(-1.0, 0.0), c(0.2, 0.0), c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_eq!(r.vertices(), &[c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!(hull_distance(&r, c(0.3, 0.0)) < 1e-15);
        assert!((hull_distance(&r, c(0.0, 2.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_distances() {
        let sq = unit_square();
        assert_eq!(hull_distance(&sq, c(0.5, 0.5)), 0.0);
        assert_eq!(hull_distance(&sq, c(2.0, 0.5)), 1.0);
        assert_eq!(hull_distance(&sq, c(1.0, 0.5)), 0.0);
    }

    #[test]
    fn figure_polynomial_hull_is_quadrilateral() {
        let q = &(&Polynomial::from_real(&[1.0, 0.0, 1.0])
            * &Polynomial::new(vec![c(-2.0, -3.0), c(1.0, 0.0)]))
            * &Polynomial::new(vec![c(-3.0, 2.0), c(1.0, 0.0)]);
        let rs = roots(&q).unwrap();
        let hull = convex_hull(&rs.roots).unwrap();
        assert_eq!(hull.vertices().len(), 4);
        for e in [c(0.0, 1.0), c(0.0, -1.0), c(2.0, 3.0), c(3.0, -2.0)] {
            assert!(hull.vertices().iter().any(|v| (v - e).norm() < 1e-12));
        }
    }

    proptest! {
        // Gauss-Lucas: critical points lie in the hull of the roots.
        #[test]
        fn gauss_lucas(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=20)) {
            let rts: Vec<Complex> = pts.into_iter().map(|(a, b)| c(a, b)).collect();
            let p = Polynomial::from_roots(&rts);
            let hull = convex_hull(&roots(&p).unwrap().expanded()).unwrap();
            let crit = roots(&p.derivative(1));
            if let Ok(crit) = crit {
                for z in crit.expanded() {
                    prop_assert!(hull_distance(&hull, z) <= 1e-8);
                }
            }
        }
    }
}
