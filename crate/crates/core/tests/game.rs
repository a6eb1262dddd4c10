use std::sync::Arc;

use thickset_core::game::{conjugate_strategy, play_match, union_strategy, AliceStrategy, BobPolicy, GameParams, GameState, GapTable, ThicknessStrategy, Verdict};
use thickset_core::geometry::Ball;
use thickset_core::{EnumerateOptions, SetDescriptor};

fn table(desc: &SetDescriptor) -> Arc<GapTable> {
    Arc::new(GapTable::new(desc, &EnumerateOptions::depth(18)).unwrap())
}

fn fifths() -> SetDescriptor {
    SetDescriptor::central_cantor(0.0, 1.0, 0.4)
}

#[test]
fn union_components_stay_within_their_budgets() {
    let c = 0.5;
    let alpha_j = 4.0;
    let ambient = GameParams::new(2f64.powf(1.0 / c) * alpha_j, 0.25, c, 0.125, 1).unwrap();
    let a = table(&fifths());
    let b = table(&SetDescriptor::Translate {
        inner: Box::new(fifths()),
        offset: vec![0.3],
    });
    let alice = union_strategy(
        vec![
            (AliceStrategy::Thickness(ThicknessStrategy::new(0, alpha_j, a.clone())), alpha_j),
            (AliceStrategy::Thickness(ThicknessStrategy::new(1, alpha_j, b.clone())), alpha_j),
        ],
        &ambient,
    )
    .unwrap();
    let mut erasures = 0;
    for seed in 0..1000 {
        let mut bob = BobPolicy::random_legal(vec![0.5], seed);
        let (state, _) = play_match(ambient, &alice, &mut bob, &a, 1e-6).unwrap();
        for t in &state.turns {
            for id in 0..2 {
                let used: f64 = t
                    .alice
                    .iter()
                    .filter(|e| e.source.map(|s| s.strategy) == Some(id))
                    .map(|e| e.shape.diam().powf(c))
                    .fold(0.0, |acc, x| acc + x);
                assert!(used <= (alpha_j * t.bob.radius).powf(c) * (1.0 + 1e-12), "seed {seed}");
            }
            erasures += t.alice.len();
        }
    }
    assert!(erasures > 0);
}

#[test]
fn conjugate_strategy_plays_the_mapped_moves() {
    let (factor, offset) = (2.0, vec![1.0]);
    let base = table(&fifths());
    let inner = || AliceStrategy::Thickness(ThicknessStrategy::new(0, 4.0, base.clone()));
    let mapped = conjugate_strategy(inner(), factor, offset.clone()).unwrap();
    let inner = inner();

    let small = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
    let big = GameParams { rho: 0.25, ..small };
    for seed in 0..50 {
        let mut bob = BobPolicy::gap_chaser(base.clone(), seed);
        let (reference, _) = play_match(small, &inner, &mut bob, &base, 1e-6).unwrap();
        let mut state = GameState::new(big).unwrap();
        for t in &reference.turns {
            let ball = Ball::new(t.bob.center.iter().map(|x| factor * x + offset[0]).collect(), factor * t.bob.radius);
            state.referee_bob(ball).unwrap();
            let moves = mapped.respond(&state);
            assert_eq!(moves.len(), t.alice.len(), "seed {seed}");
            for (m, r) in moves.iter().zip(&t.alice) {
                let expect = r.shape.map_similarity(factor, &offset);
                assert!((m.shape.center()[0] - expect.center()[0]).abs() < 1e-12 && (m.shape.diam() - expect.diam()).abs() < 1e-12);
            }
            state.referee_alice(moves).unwrap();
        }
    }
}

#[test]
fn conjugate_strategy_wins_on_the_mapped_set() {
    let base = table(&fifths());
    let image = table(&SetDescriptor::Translate {
        inner: Box::new(SetDescriptor::Scale {
            inner: Box::new(fifths()),
            factor: 2.0,
        }),
        offset: vec![1.0],
    });
    let alice = conjugate_strategy(AliceStrategy::Thickness(ThicknessStrategy::new(0, 4.0, base)), 2.0, vec![1.0]).unwrap();
    let params = GameParams::new(4.0, 0.25, 0.0, 0.25, 1).unwrap();
    for seed in 0..200 {
        let mut bob = BobPolicy::gap_chaser(image.clone(), seed);
        let (_, result) = play_match(params, &alice, &mut bob, &image, 1e-7).unwrap();
        assert!(!matches!(result.verdict, Verdict::NotInS { .. }), "seed {seed}: {result:?}");
    }
}

#[test]
fn transcript_replays_to_the_same_state() {
    let t = table(&fifths());
    let params = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
    let alice = AliceStrategy::Thickness(ThicknessStrategy::new(0, 4.0, t.clone()));
    for seed in 0..20 {
        let mut bob = BobPolicy::gap_chaser(t.clone(), seed);
        let (state, _) = play_match(params, &alice, &mut bob, &t, 1e-8).unwrap();
        let mut buf = Vec::new();
        state.write_jsonl(&mut buf).unwrap();
        let mut back = GameState::read_jsonl(&buf[..]).unwrap();
        back.finish();
        assert_eq!(back, state);
    }
}

#[test]
fn passing_lets_bob_land_in_a_gap() {
    let t = table(&fifths());
    let params = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
    let mut bob = BobPolicy::ConcentricShrink { target: vec![0.5] };
    let (_, result) = play_match(params, &AliceStrategy::Pass, &mut bob, &t, 1e-8).unwrap();
    assert!(matches!(result.verdict, Verdict::NotInS { distance } if (distance - 0.1).abs() < 1e-12));
}
