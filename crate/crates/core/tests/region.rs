use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaylab_core::zoo::{random_channel, random_distribution, Alphabets};
use relaylab_core::{
    cf_rate, evaluate_bounds, fme_oracle_check, make_channel, Alphabet, CfMode, ChannelRecipe,
    CodingDistribution, SearchConfig,
};

const BINARY: Alphabets = Alphabets {
    x1: 2,
    x2: 2,
    y2: 2,
    y3: 2,
};

#[test]
fn projected_rate_matches_scan_on_random_instances() {
    let grid = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let ch = random_channel(&mut rng, BINARY).unwrap();
        for _ in 0..3 {
            let d = random_distribution(&mut rng, &ch, 2).unwrap();
            let (scan, closed) = fme_oracle_check(&ch, &d, grid).unwrap();
            assert!(
                (scan - closed).abs() <= 2.0 / grid as f64,
                "{scan} vs {closed}"
            );
        }
    }
}

#[test]
fn rate_ordering_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for sizes in [
        BINARY,
        Alphabets {
            x1: 3,
            x2: 2,
            y2: 3,
            y3: 2,
        },
        Alphabets {
            x1: 2,
            x2: 3,
            y2: 2,
            y3: 4,
        },
    ] {
        let ch = random_channel(&mut rng, sizes).unwrap();
        for yhat in 1..=3 {
            for _ in 0..10 {
                let d = random_distribution(&mut rng, &ch, yhat).unwrap();
                let r = evaluate_bounds(&ch, &d).unwrap();
                assert!(r.backward_rate >= r.sliding_rate - 1e-9, "{r:?}");
                assert!(r.sliding_rate >= 0.0);
                assert!(r.sliding_rate <= r.projected_message_bound.max(r.direct_rate) + 1e-12);
                assert!(r.backward_relay_link >= r.relay_link - 1e-12);
                // Ŷ -- (X2, Y2) -- (X1, Y3) links the four-bound system to
                // the projected one
                assert!(
                    (r.sum_bound - r.quantization_bound - r.projected_sum_bound).abs() <= 1e-9
                        || r.projected_sum_bound == 0.0
                );
                assert!(
                    (r.index_bound - r.quantization_bound - (r.relay_link - r.excess_quantization))
                        .abs()
                        <= 1e-9
                );
            }
        }
    }
}

#[test]
fn primitive_channel_compress_forward_values() {
    // oracle: scripts/closed_form_oracles.py
    let direct_capacity = 0.5310044064107188;
    let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 0.0 }).unwrap();
    let cfg = SearchConfig::for_channel(&ch, 4);
    for mode in [CfMode::MinForm, CfMode::Constrained] {
        let r = cf_rate(&ch, &cfg, mode).unwrap();
        assert!(
            (r.rate - direct_capacity).abs() <= 0.01,
            "{mode:?} {}",
            r.rate
        );
    }
    let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.1, r0: 1.0 }).unwrap();
    let cfg = SearchConfig::for_channel(&ch, 4);
    for mode in [CfMode::MinForm, CfMode::Constrained] {
        let r = cf_rate(&ch, &cfg, mode).unwrap();
        assert!((r.rate - 1.0).abs() <= 0.01, "{mode:?} {}", r.rate);
        // the argmax reproduces its own value
        let report = evaluate_bounds(&ch, &r.distribution).unwrap();
        let value = match mode {
            CfMode::MinForm => report
                .projected_message_bound
                .min(report.projected_sum_bound),
            CfMode::Constrained => report.message_bound,
        };
        assert!((value - r.rate).abs() <= 1e-9);
    }
}

#[test]
fn compress_forward_forms_agree_on_small_grid() {
    let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.05, p3: 0.2 }).unwrap();
    let cfg = SearchConfig {
        grid_resolution: 4,
        yhat_max_size: 2,
        include_degenerate: true,
    };
    let a = cf_rate(&ch, &cfg, CfMode::MinForm).unwrap().rate;
    let b = cf_rate(&ch, &cfg, CfMode::Constrained).unwrap().rate;
    assert!(a >= b - 1e-12);
    assert!((a - b).abs() <= 0.01, "{a} vs {b}");
}

#[test]
fn useless_channel_has_zero_rates() {
    let ch = make_channel(&ChannelRecipe::Primitive { p3: 0.5, r0: 0.0 }).unwrap();
    let cfg = SearchConfig::for_channel(&ch, 4);
    assert_eq!(cf_rate(&ch, &cfg, CfMode::MinForm).unwrap().rate, 0.0);
    let d = CodingDistribution::identity_quantizer(
        vec![0.3, 0.7],
        vec![1.0],
        Alphabet::new(2).unwrap(),
    )
    .unwrap();
    let r = evaluate_bounds(&ch, &d).unwrap();
    assert!(r.sliding_rate.abs() < 1e-12 && r.backward_rate.abs() < 1e-12);
}

#[test]
fn search_is_monotone_under_refinement() {
    let ch = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.1, p3: 0.25 }).unwrap();
    let rate = |res, yhat| {
        let cfg = SearchConfig {
            grid_resolution: res,
            yhat_max_size: yhat,
            include_degenerate: true,
        };
        cf_rate(&ch, &cfg, CfMode::MinForm).unwrap().rate
    };
    for yhat in 1..=2 {
        assert!(rate(4, yhat) >= rate(2, yhat) - 1e-12);
    }
    for res in [2, 4] {
        assert!(rate(res, 2) >= rate(res, 1) - 1e-12);
    }
}

#[test]
fn custom_recipe_round_trips_through_json() {
    let spec = make_channel(&ChannelRecipe::OrthogonalBsc { p2: 0.1, p3: 0.2 }).unwrap();
    let recipe = ChannelRecipe::Custom(relaylab_core::zoo::ChannelFile::from_spec(&spec));
    let text = serde_json::to_string(&recipe).unwrap();
    assert!(text.starts_with(r#"{"kind":"custom""#), "{text}");
    let back: ChannelRecipe = serde_json::from_str(&text).unwrap();
    let got = make_channel(&back).unwrap();
    assert_eq!(got.alph_y3, spec.alph_y3);
    for (a, b) in got.kernel().iter().zip(spec.kernel()) {
        assert!((a - b).abs() <= 1e-15);
    }
}
