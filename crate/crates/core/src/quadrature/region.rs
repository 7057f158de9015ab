//! Planar regions built from axis-parallel rectangles and disks.
//!
//! Integration sweeps a region column by column: for a fixed abscissa the
//! region's cross-section is a finite union of closed intervals, computed
//! exactly from the primitives and combined with interval set operations.
//! Between consecutive x-breakpoints the interval endpoints are smooth
//! functions of x.

use num_complex::Complex64;

/// A region of the plane.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Axis-parallel rectangle.
    Rect {
        center: Complex64,
        half_width: f64,
        half_height: f64,
    },
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// Points of the first region not in the second.
    Difference(Box<Region>, Box<Region>),
    Union(Vec<Region>),
    Intersection(Vec<Region>),
}

pub type Interval = (f64, f64);

impl Region {
    pub fn rect(center: Complex64, half_width: f64, half_height: f64) -> Region {
        Region::Rect {
            center,
            half_width,
            half_height,
        }
    }

    /// `Q(center, side)`: the axis-parallel square of side length `side`.
    pub fn square(center: Complex64, side: f64) -> Region {
        Region::rect(center, 0.5 * side, 0.5 * side)
    }

    /// The square `[-1, 1]^2`.
    pub fn unit_square() -> Region {
        Region::square(Complex64::new(0.0, 0.0), 2.0)
    }

    pub fn disk(center: Complex64, radius: f64) -> Region {
        Region::Disk { center, radius }
    }

    pub fn minus(self, other: Region) -> Region {
        Region::Difference(Box::new(self), Box::new(other))
    }

    pub fn intersect(self, other: Region) -> Region {
        Region::Intersection(vec![self, other])
    }

    pub fn union(parts: Vec<Region>) -> Region {
        Region::Union(parts)
    }

    /// The point reflection `{z - v : v in self}`.
    pub fn reflected_through(&self, z: Complex64) -> Region {
        match self {
            Region::Rect {
                center,
                half_width,
                half_height,
            } => Region::rect(z - center, *half_width, *half_height),
            Region::Disk { center, radius } => Region::disk(z - center, *radius),
            Region::Difference(a, b) => a.reflected_through(z).minus(b.reflected_through(z)),
            Region::Union(parts) => Region::Union(parts.iter().map(|p| p.reflected_through(z)).collect()),
            Region::Intersection(parts) => {
                Region::Intersection(parts.iter().map(|p| p.reflected_through(z)).collect())
            }
        }
    }

    /// Open-set membership test.
    pub fn contains(&self, p: Complex64) -> bool {
        match self {
            Region::Rect {
                center,
                half_width,
                half_height,
            } => (p.re - center.re).abs() < *half_width && (p.im - center.im).abs() < *half_height,
            Region::Disk { center, radius } => (p - center).norm_sqr() < radius * radius,
            Region::Difference(a, b) => a.contains(p) && !b.contains(p),
            Region::Union(parts) => parts.iter().any(|r| r.contains(p)),
            Region::Intersection(parts) => parts.iter().all(|r| r.contains(p)),
        }
    }

    /// `(x0, x1, y0, y1)`, or `None` for a provably empty region.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        match self {
            Region::Rect {
                center,
                half_width,
                half_height,
            } => {
                if *half_width <= 0.0 || *half_height <= 0.0 {
                    return None;
                }
                Some((
                    center.re - half_width,
                    center.re + half_width,
                    center.im - half_height,
                    center.im + half_height,
                ))
            }
            Region::Disk { center, radius } => {
                if *radius <= 0.0 {
                    return None;
                }
                Some((center.re - radius, center.re + radius, center.im - radius, center.im + radius))
            }
            Region::Difference(a, _) => a.bounding_box(),
            Region::Union(parts) => parts.iter().filter_map(|p| p.bounding_box()).reduce(|u, v| {
                (u.0.min(v.0), u.1.max(v.1), u.2.min(v.2), u.3.max(v.3))
            }),
            Region::Intersection(parts) => {
                let mut acc = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
                for p in parts {
                    let b = p.bounding_box()?;
                    acc = (acc.0.max(b.0), acc.1.min(b.1), acc.2.max(b.2), acc.3.min(b.3));
                }
                (acc.0 < acc.1 && acc.2 < acc.3).then_some(acc)
            }
        }
    }

    /// Cross-section at abscissa `x` as sorted disjoint intervals.
    pub fn y_intervals(&self, x: f64) -> Vec<Interval> {
        match self {
            Region::Rect {
                center,
                half_width,
                half_height,
            } => {
                if (x - center.re).abs() < *half_width && *half_height > 0.0 {
                    vec![(center.im - half_height, center.im + half_height)]
                } else {
                    Vec::new()
                }
            }
            Region::Disk { center, radius } => {
                let d = x - center.re;
                let s2 = radius * radius - d * d;
                if s2 > 0.0 {
                    let s = s2.sqrt();
                    vec![(center.im - s, center.im + s)]
                } else {
                    Vec::new()
                }
            }
            Region::Difference(a, b) => subtract(&a.y_intervals(x), &b.y_intervals(x)),
            Region::Union(parts) => {
                let all: Vec<Interval> = parts.iter().flat_map(|p| p.y_intervals(x)).collect();
                normalize(all)
            }
            Region::Intersection(parts) => {
                let mut iter = parts.iter();
                let Some(first) = iter.next() else {
                    return Vec::new();
                };
                iter.fold(first.y_intervals(x), |acc, p| intersect(&acc, &p.y_intervals(x)))
            }
        }
    }

    fn primitives<'a>(&'a self, out: &mut Vec<&'a Region>) {
        match self {
            Region::Rect { .. } | Region::Disk { .. } => out.push(self),
            Region::Difference(a, b) => {
                a.primitives(out);
                b.primitives(out);
            }
            Region::Union(parts) | Region::Intersection(parts) => {
                for p in parts {
                    p.primitives(out);
                }
            }
        }
    }

    /// Abscissae where the combinatorial structure of the cross-section can
    /// change: primitive extents and pairwise boundary crossings.
    pub fn x_breakpoints(&self) -> Vec<f64> {
        let mut prims = Vec::new();
        self.primitives(&mut prims);
        let mut xs = Vec::new();
        for p in &prims {
            match p {
                Region::Rect {
                    center, half_width, ..
                } => {
                    xs.push(center.re - half_width);
                    xs.push(center.re + half_width);
                }
                Region::Disk { center, radius } => {
                    xs.push(center.re - radius);
                    xs.push(center.re + radius);
                }
                _ => unreachable!(),
            }
        }
        for (i, p) in prims.iter().enumerate() {
            for q in &prims[i + 1..] {
                crossings(p, q, &mut xs);
            }
        }
        xs.retain(|x| x.is_finite());
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));
        xs
    }
}

fn circle_line_crossings(center: Complex64, radius: f64, y: f64, xs: &mut Vec<f64>) {
    let d = y - center.im;
    let s2 = radius * radius - d * d;
    if s2 > 0.0 {
        let s = s2.sqrt();
        xs.push(center.re - s);
        xs.push(center.re + s);
    }
}

fn crossings(p: &Region, q: &Region, xs: &mut Vec<f64>) {
    match (p, q) {
        (
            Region::Disk { center, radius },
            Region::Rect {
                center: rc,
                half_height,
                ..
            },
        )
        | (
            Region::Rect {
                center: rc,
                half_height,
                ..
            },
            Region::Disk { center, radius },
        ) => {
            circle_line_crossings(*center, *radius, rc.im - half_height, xs);
            circle_line_crossings(*center, *radius, rc.im + half_height, xs);
        }
        (
            Region::Disk {
                center: c1,
                radius: r1,
            },
            Region::Disk {
                center: c2,
                radius: r2,
            },
        ) => {
            let delta = c2 - c1;
            let d = delta.norm();
            if d > 0.0 && d < r1 + r2 && d > (r1 - r2).abs() {
                let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
                let h = (r1 * r1 - a * a).max(0.0).sqrt();
                let base = c1 + delta * (a / d);
                let offset = Complex64::new(0.0, 1.0) * delta * (h / d);
                xs.push((base + offset).re);
                xs.push((base - offset).re);
            }
        }
        _ => {}
    }
}

/// Sorts, merges overlapping intervals and drops empty ones.
pub fn normalize(mut v: Vec<Interval>) -> Vec<Interval> {
    v.retain(|(a, b)| b > a);
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn subtract(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for &(lo, hi) in a {
        let mut cur = lo;
        for &(blo, bhi) in b {
            if bhi <= cur || blo >= hi {
                continue;
            }
            if blo > cur {
                out.push((cur, blo));
            }
            cur = cur.max(bhi);
            if cur >= hi {
                break;
            }
        }
        if cur < hi {
            out.push((cur, hi));
        }
    }
    out
}

fn intersect(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn interval_algebra() {
        assert_eq!(normalize(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0), (5.0, 5.0)]), vec![(0.0, 2.0), (3.0, 4.0)]);
        assert_eq!(subtract(&[(0.0, 10.0)], &[(2.0, 3.0), (5.0, 6.0)]), vec![(0.0, 2.0), (3.0, 5.0), (6.0, 10.0)]);
        assert_eq!(subtract(&[(0.0, 1.0)], &[(-1.0, 2.0)]), vec![]);
        assert_eq!(intersect(&[(0.0, 2.0), (3.0, 5.0)], &[(1.0, 4.0)]), vec![(1.0, 2.0), (3.0, 4.0)]);
    }

    #[test]
    fn square_minus_disk_cross_section() {
        let r = Region::unit_square().minus(Region::disk(c(0.0, 0.0), 1.0));
        let iv = r.y_intervals(0.6);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].0 + 1.0).abs() < 1e-15 && (iv[0].1 + 0.8).abs() < 1e-12);
        assert!(r.contains(c(0.9, 0.9)));
        assert!(!r.contains(c(0.1, 0.1)));
    }

    #[test]
    fn breakpoints_include_crossings() {
        let r = Region::disk(c(0.0, 0.0), 2.0).minus(Region::square(c(0.0, 0.0), 2.0));
        let xs = r.x_breakpoints();
        let s = 3f64.sqrt();
        for want in [-2.0, -s, -1.0, 1.0, s, 2.0] {
            assert!(xs.iter().any(|x| (x - want).abs() < 1e-12), "missing {want} in {xs:?}");
        }
        let two = Region::disk(c(0.0, 0.0), 1.0).minus(Region::disk(c(1.0, 0.0), 1.0));
        assert!(two.x_breakpoints().iter().any(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn reflection_maps_centers() {
        let r = Region::disk(c(1.0, 2.0), 0.5).minus(Region::square(c(0.0, 0.0), 1.0));
        let m = r.reflected_through(c(3.0, 0.0));
        assert!(m.contains(c(2.0, -2.0)));
        assert!(!m.contains(c(1.0, 2.0)));
    }

    #[test]
    fn empty_bounding_boxes() {
        let r = Region::square(c(0.0, 0.0), 1.0).intersect(Region::square(c(5.0, 0.0), 1.0));
        assert!(r.bounding_box().is_none());
        assert!(Region::disk(c(0.0, 0.0), 0.0).bounding_box().is_none());
    }

    proptest! {
        #[test]
        fn cross_sections_agree_with_membership(
            x in -3.0f64..3.0, y in -3.0f64..3.0,
            cx in -1.0f64..1.0, r in 0.2f64..2.0, side in 0.2f64..3.0,
        ) {
            let region = Region::union(vec![
                Region::disk(c(cx, 0.3), r).minus(Region::square(c(0.0, 0.0), side)),
                Region::rect(c(-cx, -0.5), 0.4, 0.2),
            ]);
            let inside = region.y_intervals(x).iter().any(|&(a, b)| a < y && y < b);
            // ignore points within round-off of a boundary
            let eps = 1e-9;
            let robust = [c(x, y + eps), c(x, y - eps), c(x + eps, y), c(x - eps, y)]
                .iter()
                .all(|&p| region.contains(p) == region.contains(c(x, y)));
            if robust {
                prop_assert_eq!(inside, region.contains(c(x, y)));
            }
        }
    }
}
