use attractor_class::fixtures;
use attractor_class::generate::random_feasible;
use attractor_class::synthesis::{
    build_block_layout, g_base, render_portrait, BlockKind, PortraitOptions, Q,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn qf(v: Q) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn blocks_tile_the_strip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_feasible(&mut rng, 12);
        let f = build_block_layout(&l);
        prop_assert!(f.check_tiling(3).is_ok());
        let (t, n) = (f64::from(f.t()), f64::from(f.n()));
        for _ in 0..500 {
            let p = [rng.gen_range(0.0..t), rng.gen_range(-n + 1.0..3.0)];
            let owners: Vec<usize> = (0..f.layout.blocks.len())
                .filter(|&i| f.layout.blocks[i].contains(p))
                .collect();
            prop_assert_eq!(owners.len(), 1, "{:?}", p);
            prop_assert_eq!(f.locate(p), Some(owners[0]));
        }
        prop_assert_eq!(f.eval([0.5, -n]), [0.0, 0.0]);
    }

    #[test]
    fn rays_are_vertical(seed in any::<u64>()) {
        let l = random_feasible(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let f = build_block_layout(&l);
        for b in f.layout.blocks.iter().filter(|b| matches!(b.kind, BlockKind::F { .. })) {
            let (a, c) = (qf(b.x0), qf(b.x1));
            for x in [a, 0.5 * (a + c)] {
                for k in 1..=1000 {
                    let y = 3.0 * k as f64 / 1000.0;
                    prop_assert_eq!(f.eval([x, y])[0], 0.0);
                }
            }
        }
    }
}

#[test]
fn g_sector_crossing_inequality() {
    // a g1(1-u, 1-au) - g2(1-u, 1-au) > 0 for 0 < u < 1/2, 0 < au < 1/2
    let m = 100;
    let mut count = 0;
    for i in 1..=m {
        for j in 1..=m {
            let u = 0.5 * i as f64 / (m + 1) as f64;
            let w = 0.5 * j as f64 / (m + 1) as f64;
            let a = w / u;
            let g = g_base(1.0 - u, 1.0 - w);
            assert!(a * g[0] - g[1] > 0.0, "u = {u}, a = {a}");
            count += 1;
        }
    }
    assert_eq!(count, 10_000);
}

#[test]
fn portrait_is_reproducible_and_labelled() {
    let opts = PortraitOptions { samples_per_block: 2, step: 5e-3, max_arc_length: 3.0, ..Default::default() };
    let l = fixtures::table1();
    let a = render_portrait(&l, &opts).unwrap();
    let b = render_portrait(&l, &opts).unwrap();
    assert_eq!(a.to_svg(), b.to_svg());
    assert_eq!(a.to_json(), b.to_json());
    // two marks per key: one separatrix and one representative orbit
    assert_eq!(a.flagged_count(), 2 * l.base().len());
    assert!(a.to_svg().contains("data-orbit=\"S1\""));
}
