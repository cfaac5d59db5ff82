mod common;

use hysim::exemplar::{inpaint, search_best, select_target, transfer, EngineConfig, FillState};
use hysim::measures::{evaluate, MaskedPair, MeasureConfig};
use hysim::quality::{generate_fixture, FixtureName};
use hysim::raster::{extract_front, patch_window, InpaintMask, PatchRef, Pixel, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(side: usize, measure: MeasureConfig, parallel: bool) -> EngineConfig {
    EngineConfig {
        patch_side: side,
        measure,
        parallel,
        ..EngineConfig::default()
    }
}

#[test]
fn two_tone_search_matches_oracle() {
    let image = RasterImage::from_fn(16, 16, 1, |r, c| {
        vec![if r + c / 3 < 9 { 40.0 } else { 210.0 }]
    })
    .unwrap();
    let mask = common::square_hole(16, 16, 6, 6, 4);
    let state = FillState::new(image.clone(), mask.clone()).unwrap();
    for measure in common::families() {
        for p in extract_front(&mask) {
            let target = PatchRef::new(p, 3).unwrap();
            let got = search_best(&state, target, &config(3, measure, true)).unwrap();
            let (want, d) = common::brute_force_search(&image, &mask, p, 3, &measure).unwrap();
            assert_eq!(got.patch.center, want, "{} at {p:?}", measure.label());
            assert_eq!(got.distance, d);
        }
    }
}

#[test]
fn random_search_matches_oracle_for_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..6 {
        let (h, w) = (rng.random_range(20..=32), rng.random_range(20..=32));
        let levels = if trial % 2 == 0 { 0 } else { 4 };
        let image = common::random_image(&mut rng, h, w, levels);
        let hole = rng.random_range(3..=6);
        let mask = common::square_hole(
            h,
            w,
            rng.random_range(0..h - hole),
            rng.random_range(0..w - hole),
            hole,
        );
        let state = FillState::new(image.clone(), mask.clone()).unwrap();
        let front = extract_front(&mask);
        let side = [3, 5, 7][trial % 3];
        for measure in common::families() {
            let p = front[rng.random_range(0..front.len())];
            let target = PatchRef::new(p, side).unwrap();
            let got = search_best(&state, target, &config(side, measure, trial % 2 == 0)).unwrap();
            let (want, d) = common::brute_force_search(&image, &mask, p, side, &measure).unwrap();
            assert_eq!(got.patch.center, want, "trial {trial} {}", measure.label());
            assert_eq!(got.distance, d);
        }
    }
}

#[test]
fn search_distance_equals_masked_window_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let image = common::random_image(&mut rng, 24, 24, 0);
    let mask = common::square_hole(24, 24, 0, 9, 5);
    let state = FillState::new(image.clone(), mask.clone()).unwrap();
    let cfg = config(7, MeasureConfig::hysim(1.0, 1.0, 3.0), true);
    for p in extract_front(&mask) {
        let target = PatchRef::new(p, 7).unwrap();
        let found = search_best(&state, target, &cfg).unwrap();
        let tw = patch_window(&image, target);
        let sw = patch_window(&image, found.patch);
        let known: Vec<bool> = target
            .offsets()
            .zip(&tw.in_bounds)
            .flat_map(|((dr, dc), &inside)| {
                let k = inside
                    && !mask.is_target(
                        (p.row as isize + dr) as usize,
                        (p.col as isize + dc) as usize,
                    );
                std::iter::repeat_n(k, 3)
            })
            .collect();
        let d = evaluate(
            &MaskedPair::new(&tw.values, &sw.values, &known).unwrap(),
            &cfg.measure,
        )
        .unwrap();
        assert_eq!(d, found.distance);
    }
}

#[test]
fn uniform_image_picks_first_candidate() {
    let image = RasterImage::filled(20, 20, 3, 60.0).unwrap();
    let mask = common::square_hole(20, 20, 10, 10, 3);
    let state = FillState::new(image, mask).unwrap();
    let choice = select_target(&state, &EngineConfig::default()).unwrap();
    let found = search_best(&state, choice.patch, &EngineConfig::default()).unwrap();
    assert_eq!(found.patch.center, Pixel::new(4, 4));
    assert_eq!(found.distance, 0.0);
}

#[test]
fn translated_ring_gives_zero_distance_for_ssd_and_hysim() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut image = common::random_image(&mut rng, 30, 30, 0);
    // Copy the 11×11 block centered at (6, 6) to be centered at (20, 21).
    for dr in -5isize..=5 {
        for dc in -5isize..=5 {
            let v = image.pixel((6 + dr) as usize, (6 + dc) as usize).to_vec();
            image.set_pixel((20 + dr) as usize, (21 + dc) as usize, &v);
        }
    }
    let mask = InpaintMask::from_fn(30, 30, |r, c| {
        (19..=21).contains(&r) && (20..=22).contains(&c)
    });
    let state = FillState::new(image, mask).unwrap();
    let target = PatchRef::new(Pixel::new(19, 20), 9).unwrap();
    for measure in [MeasureConfig::ssd(), MeasureConfig::default()] {
        let found = search_best(&state, target, &config(9, measure, true)).unwrap();
        assert_eq!(found.distance, 0.0);
        assert_eq!(found.patch.center, Pixel::new(5, 5));
    }
}

#[test]
fn first_target_is_independent_of_measure() {
    let fx = generate_fixture(FixtureName::TwoRegionStraddle, 48).unwrap();
    let state = FillState::new(fx.image, fx.mask).unwrap();
    let first = select_target(&state, &EngineConfig::default()).unwrap();
    for measure in common::families() {
        let cfg = EngineConfig::with_measure(measure);
        assert_eq!(select_target(&state, &cfg).unwrap(), first);
    }
}

#[test]
fn fill_loop_invariants_on_fixtures() {
    for name in FixtureName::ALL {
        let fx = generate_fixture(name, 48).unwrap();
        let cfg = EngineConfig::default();
        let mut state = FillState::new(fx.image.clone(), fx.mask.clone()).unwrap();
        let initial = fx.mask.target_count();
        let mut remaining = initial;
        let mut iterations = 0;
        while remaining > 0 {
            let choice = select_target(&state, &cfg).unwrap();
            let found = search_best(&state, choice.patch, &cfg).unwrap();
            transfer(&mut state, choice.patch, found.patch);
            let now = state.mask().target_count();
            assert!(now < remaining, "{name}: target region did not shrink");
            remaining = now;
            iterations += 1;
            for &c in state.confidence().values() {
                assert!((0.0..=1.0).contains(&c));
            }
        }
        assert!(iterations <= initial);
        let out = state.into_image();
        for r in 0..48 {
            for c in 0..48 {
                if !fx.mask.is_target(r, c) {
                    assert_eq!(out.pixel(r, c), fx.image.pixel(r, c));
                }
            }
        }

        let (looped, report) = inpaint(&fx.image, &fx.mask, &cfg).unwrap();
        assert_eq!(looped, out);
        assert_eq!(report.iterations, iterations);
        assert_eq!(
            report.records.iter().map(|r| r.filled).sum::<usize>(),
            initial
        );
    }
}

#[test]
fn parallel_and_serial_runs_are_identical() {
    let fx = generate_fixture(FixtureName::CurveGap, 48).unwrap();
    for measure in [
        MeasureConfig::ssd(),
        MeasureConfig::chebyshev(),
        MeasureConfig::default(),
    ] {
        let par = inpaint(&fx.image, &fx.mask, &config(9, measure, true)).unwrap();
        let ser = inpaint(&fx.image, &fx.mask, &config(9, measure, false)).unwrap();
        assert_eq!(par.0, ser.0);
        assert_eq!(par.1.records, ser.1.records);
    }
}

#[test]
fn filled_pixels_come_from_the_source_region() {
    let fx = generate_fixture(FixtureName::TriangleApex, 40).unwrap();
    let (out, report) = inpaint(&fx.image, &fx.mask, &EngineConfig::default()).unwrap();
    assert!(report.completed);
    let (h, w, _) = out.shape();
    for r in 0..h {
        for c in 0..w {
            if fx.mask.is_target(r, c) {
                // The pasted object color never survives the fill.
                assert_ne!(out.pixel(r, c), fx.image.pixel(r, c));
            }
        }
    }
}
