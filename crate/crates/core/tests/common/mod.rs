#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thickset_core::bounds::constants;
use thickset_core::game::{play_match, AliceStrategy, BobPolicy, GameParams, GapTable, ThicknessStrategy, Verdict};
use thickset_core::scaffold::{scaffold_dimension, ScaffoldParams};
use thickset_core::{EnumerateOptions, SetDescriptor};

pub const FIFTHS_TAU: f64 = 2.0;
pub const GAME_BETA: f64 = 0.25;
pub const STOP_RADIUS: f64 = 1e-8;

pub fn fifths_table() -> Arc<GapTable> {
    let desc = SetDescriptor::central_cantor(0.0, 1.0, 0.4);
    Arc::new(
        GapTable::new(
            &desc,
            &EnumerateOptions {
                depth: Some(18),
                cap: 2_000_000,
            },
        )
        .unwrap(),
    )
}

#[derive(Debug, Default)]
pub struct ChaserRun {
    pub matches: usize,
    pub erased: usize,
    pub in_s: usize,
    /// Outcomes neither erased nor within the stop radius of the set.
    pub escaped: usize,
    pub erasures: usize,
    /// Erasures with `diam(G) > diam(B)/(τβ)`.
    pub inequality_violations: usize,
}

/// Gap-chaser Bob against the thickness strategy on the middle-fifths set,
/// with `α = alpha_factor/(τβ)`, `c = 0` and `ρ = β diam/2`.
pub fn chaser_run(table: &Arc<GapTable>, alpha_factor: f64, seeds: u64) -> ChaserRun {
    let alpha = alpha_factor / (FIFTHS_TAU * GAME_BETA);
    let params = GameParams::new(alpha, GAME_BETA, 0.0, GAME_BETA * 1.0 / 2.0, 1).unwrap();
    let alice = AliceStrategy::Thickness(ThicknessStrategy::new(0, alpha, table.clone()));
    let mut run = ChaserRun::default();
    for seed in 0..seeds {
        let mut bob = BobPolicy::gap_chaser(table.clone(), seed);
        let (state, result) = play_match(params, &alice, &mut bob, table, STOP_RADIUS).unwrap();
        run.matches += 1;
        match result.verdict {
            Verdict::Erased { .. } => run.erased += 1,
            Verdict::InS { distance } | Verdict::NotInS { distance } => {
                if distance <= STOP_RADIUS {
                    run.in_s += 1;
                } else {
                    run.escaped += 1;
                }
            }
        }
        for turn in &state.turns {
            for e in &turn.alice {
                run.erasures += 1;
                if e.shape.diam() > turn.bob.diam() / (FIFTHS_TAU * GAME_BETA) {
                    run.inequality_violations += 1;
                }
            }
        }
    }
    run
}

#[derive(Debug, Default)]
pub struct ChainSweep {
    pub points: usize,
    pub literal_holds: usize,
    pub corrected_holds: usize,
    /// Largest `scaffold deficit / literal deficit` seen.
    pub worst_literal_ratio: f64,
}

/// Feasible `(α, β, c)` at d = 1 with `γ = gamma_for_dimension(1)`.
pub fn appendix_chain_sweep(points: usize, seed: u64) -> ChainSweep {
    let k2 = constants(1).unwrap().k2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sweep = ChainSweep::default();
    while sweep.points < points {
        let beta = rng.gen_range(0.01..=0.25);
        let c = rng.gen_range(0.05..0.95);
        let threshold = ((1.0 - f64::powf(beta, 1.0 - c)) / k2).powf(1.0 / c);
        let alpha = threshold * rng.gen_range(0.01..0.999);
        if !(alpha > 0.0) {
            continue;
        }
        let p = ScaffoldParams::with_default_gamma(1, alpha, beta, c, 1.0).unwrap();
        if !p.feasibility().unwrap().2 {
            continue;
        }
        let dim = scaffold_dimension(&p).unwrap();
        sweep.points += 1;
        sweep.literal_holds += dim.literal_chain_holds as usize;
        sweep.corrected_holds += dim.corrected_chain_holds as usize;
        sweep.worst_literal_ratio = sweep.worst_literal_ratio.max(dim.scaffold_deficit / dim.literal_deficit);
    }
    sweep
}
