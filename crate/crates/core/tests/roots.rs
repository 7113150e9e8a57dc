use proptest::prelude::*;
use smartgame_core::poly::{eval, poly_root, real_roots, PolyError, PolySpec};

fn expand(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i] -= r * a;
            next[i + 1] += a;
        }
        c = next;
    }
    c
}

proptest! {
    #[test]
    fn recovers_separated_roots(mut roots in prop::collection::vec(-3.0..3.0f64, 1..6)) {
        roots.sort_by(f64::total_cmp);
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] > 0.05));
        let c = expand(&roots);
        let found = real_roots(&c);
        prop_assert_eq!(found.len(), roots.len());
        for (a, b) in found.iter().zip(&roots) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
        prop_assert!(found.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roots_have_small_residual(c in prop::collection::vec(-5.0..5.0f64, 2..8)) {
        prop_assume!(c.last().unwrap().abs() > 0.1);
        let scale: f64 = c.iter().map(|x| x.abs()).sum();
        for r in real_roots(&c) {
            let d: Vec<f64> = (1..c.len()).map(|i| i as f64 * c[i]).collect();
            let slope = eval(&d, r).abs().max(1.0);
            prop_assert!(eval(&c, r).abs() <= 1e-9 * scale * slope * (1.0 + r.abs()).powi(c.len() as i32));
        }
    }
}

#[test]
fn index_beyond_roots_is_named() {
    let spec = PolySpec::new(vec![1.0, 0.0, 1.0], 1).unwrap();
    assert!(matches!(poly_root(&spec), Err(PolyError::TooFewRoots { requested: 1, found: 0 })));
}
