//! Property tests over the geometric and algebraic invariants.

use proptest::prelude::*;

use polyclass::classifier::FixedClassifier;
use polyclass::data::{gaussian_blobs, permute_labels, random_permutation};
use polyclass::geometry::{
    build_cube, build_orthoplex, build_polygon, build_simplex, cube_vertex, vecmath, WeightMatrix,
};

proptest! {
    /// Hamming-h cube pairs dot to (d-2h)/d, for any pair and d up to 8.
    #[test]
    fn cube_hamming_dot_law(d in 1usize..=8, i in 0u64..256, j in 0u64..256) {
        let mask = (1u64 << d) - 1;
        let (i, j) = (i & mask, j & mask);
        let a = cube_vertex(d, i);
        let b = cube_vertex(d, j);
        let h = (i ^ j).count_ones() as f64;
        let expected = (d as f64 - 2.0 * h) / d as f64;
        prop_assert!((vecmath::dot(&a, &b) - expected).abs() < 1e-12);
    }

    /// A label permutation followed by its inverse restores the dataset.
    #[test]
    fn permutation_round_trip(k in 2usize..=12, seed in 0u64..1000) {
        let ds = gaussian_blobs(k, 2, 8, 0.5, seed).unwrap();
        let perm = random_permutation(k, seed);
        let mut inverse = vec![0usize; k];
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let round = permute_labels(&permute_labels(&ds, &perm).unwrap(), &inverse).unwrap();
        prop_assert_eq!(round.train, ds.train);
        prop_assert_eq!(round.test, ds.test);
    }

    /// Prediction is invariant under positive rescaling of the feature.
    #[test]
    fn predict_scale_invariance(
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
        lambda in 1e-3f64..1e3,
        k in 3usize..=12,
    ) {
        let c = FixedClassifier::new(build_polygon(k).unwrap(), k).unwrap();
        let f = vec![x, y];
        let scaled = vec![lambda * x, lambda * y];
        prop_assert_eq!(c.predict(&f).unwrap(), c.predict(&scaled).unwrap());
    }

    /// Softmax probabilities stay normalized for features of any scale.
    #[test]
    fn probabilities_sum_to_one(scale in 0.0f64..100.0, k in 2usize..=10, seed in 0u64..100) {
        let c = FixedClassifier::new(build_simplex(k).unwrap(), k).unwrap();
        let mut rng = polyclass::rng::stream(seed, 1);
        let f: Vec<f64> = (0..c.dim())
            .map(|_| scale * polyclass::rng::uniform(&mut rng, -1.0, 1.0))
            .collect();
        let p = c.probabilities(&f).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    /// Weight CSV serialization round-trips bit-exactly.
    #[test]
    fn weight_csv_round_trip(d in 1usize..=8, pick in 0usize..4) {
        let w = match pick {
            0 => build_simplex(d + 1).unwrap(),
            1 => build_cube(d).unwrap(),
            2 => build_orthoplex(d).unwrap(),
            _ => build_polygon(d + 2).unwrap(),
        };
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let back = WeightMatrix::parse_csv(&String::from_utf8(buf).unwrap()).unwrap();
        prop_assert_eq!(w, back);
    }
}
