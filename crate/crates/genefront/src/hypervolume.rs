//! Dominated-area measure for two minimized objectives.

use crate::core::ObjectiveVector;

/// Area of the region dominated by `points` and bounded by `reference`
/// (both objectives minimized, reference componentwise worse than every
/// point that should count). Points on or outside the reference box and
/// points dominated by earlier sweep positions contribute nothing, so the
/// input need not be a clean front.
pub fn hypervolume_2d(points: &[ObjectiveVector], reference: (f64, f64)) -> f64 {
    let (r1, r2) = reference;
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .map(|o| (o.f1(), o.f2()))
        .filter(|&(a, b)| a < r1 && b < r2)
        .collect();
    pts.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let mut area = 0.0;
    let mut ceiling = r2;
    for (f1, f2) in pts {
        if f2 < ceiling {
            area += (r1 - f1) * (ceiling - f2);
            ceiling = f2;
        }
    }
    area
}
