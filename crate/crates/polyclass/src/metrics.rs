//! Angle and accuracy bookkeeping shared by the trainer and experiments.

use crate::geometry::vecmath::{angle_between, norm};

/// Per-class angle between the mean feature direction and that class's
/// reference direction. Classes with no samples report `None`.
pub fn mean_direction_angles(
    class_dirs: &[Vec<f64>],
    features: &[Vec<f64>],
    labels: &[usize],
) -> Vec<Option<f64>> {
    let means = class_means(class_dirs.len(), features, labels);
    class_dirs
        .iter()
        .zip(&means)
        .map(|(dir, mean)| mean.as_ref().map(|m| angle_between(m, dir)))
        .collect()
}

/// Arithmetic mean feature per class; `None` where a class is absent.
pub fn class_means(
    num_classes: usize,
    features: &[Vec<f64>],
    labels: &[usize],
) -> Vec<Option<Vec<f64>>> {
    if features.is_empty() {
        return vec![None; num_classes];
    }
    let dim = features[0].len();
    let mut sums = vec![vec![0.0; dim]; num_classes];
    let mut counts = vec![0usize; num_classes];
    for (f, &y) in features.iter().zip(labels) {
        for (s, x) in sums[y].iter_mut().zip(f) {
            *s += x;
        }
        counts[y] += 1;
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| {
            if c == 0 {
                None
            } else {
                let mean: Vec<f64> = s.into_iter().map(|v| v / c as f64).collect();
                // A zero mean has no direction.
                if norm(&mean) < 1e-15 {
                    None
                } else {
                    Some(mean)
                }
            }
        })
        .collect()
}

/// Smallest angle between any two class mean directions; `None` with
/// fewer than two populated classes.
pub fn min_pairwise_angle(means: &[Option<Vec<f64>>]) -> Option<f64> {
    let present: Vec<&Vec<f64>> = means.iter().flatten().collect();
    if present.len() < 2 {
        return None;
    }
    let mut min = f64::INFINITY;
    for i in 0..present.len() {
        for j in i + 1..present.len() {
            min = min.min(angle_between(present[i], present[j]));
        }
    }
    Some(min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_features_have_zero_angle() {
        let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let features = vec![vec![2.0, 0.0], vec![0.0, 0.5], vec![3.0, 0.0]];
        let labels = vec![0, 1, 0];
        let angles = mean_direction_angles(&dirs, &features, &labels);
        assert!(angles[0].unwrap() < 1e-12);
        assert!(angles[1].unwrap() < 1e-12);
    }

    #[test]
    fn rotated_features_report_the_rotation() {
        let theta = 30.0_f64.to_radians();
        let dirs = vec![vec![1.0, 0.0]];
        let features = vec![vec![theta.cos(), theta.sin()]];
        let angles = mean_direction_angles(&dirs, &features, &[0]);
        assert!((angles[0].unwrap() - theta).abs() < 1e-12);
    }

    #[test]
    fn missing_class_reports_none() {
        let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let features = vec![vec![1.0, 1.0]];
        let angles = mean_direction_angles(&dirs, &features, &[0]);
        assert!(angles[0].is_some());
        assert!(angles[1].is_none());
    }

    #[test]
    fn random_features_match_brute_force() {
        let mut rng = crate::rng::stream(3, 7);
        let dirs: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let v: Vec<f64> = (0..4)
                    .map(|_| crate::rng::uniform(&mut rng, -1.0, 1.0))
                    .collect();
                crate::geometry::vecmath::normalized(&v)
            })
            .collect();
        let features: Vec<Vec<f64>> = (0..30)
            .map(|_| {
                (0..4)
                    .map(|_| crate::rng::uniform(&mut rng, -2.0, 2.0))
                    .collect()
            })
            .collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let angles = mean_direction_angles(&dirs, &features, &labels);
        for c in 0..3 {
            let class_feats: Vec<&Vec<f64>> = features
                .iter()
                .zip(&labels)
                .filter(|(_, &y)| y == c)
                .map(|(f, _)| f)
                .collect();
            let mut mean = vec![0.0; 4];
            for f in &class_feats {
                for (m, x) in mean.iter_mut().zip(f.iter()) {
                    *m += x / class_feats.len() as f64;
                }
            }
            let expected = crate::geometry::vecmath::angle_between(&mean, &dirs[c]);
            assert!((angles[c].unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn min_pairwise_angle_of_axes_is_right_angle() {
        let means = vec![Some(vec![1.0, 0.0]), Some(vec![0.0, 2.0]), None];
        let min = min_pairwise_angle(&means).unwrap();
        assert!((min - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(min_pairwise_angle(&means[..1]).is_none());
    }
}
