//! Every controller evaluated under one base seed faces the same layouts.

use pirl_core::advisor::ScriptedOracle;
use pirl_core::env::{Action, EnvConfig, Obstacle, UavState};
use pirl_core::eval::{evaluate, AdviceFollower, ControlInput, Controller, EvalOptions};
use pirl_core::trajectory::TrajectoryRecord;

/// Cycles through the action list; stands in for a trained policy.
struct Cycle(usize);

impl Controller for Cycle {
    fn act(&mut self, _: &ControlInput<'_>) -> Option<Action> {
        self.0 += 1;
        Action::from_index(self.0 % Action::COUNT)
    }
}

fn layouts(records: &[TrajectoryRecord]) -> Vec<(u32, u64, Vec<Obstacle>, UavState)> {
    records
        .iter()
        .filter_map(|r| match r {
            TrajectoryRecord::EpisodeStart { episode, seed, obstacles, start, .. } => {
                Some((*episode, *seed, obstacles.clone(), *start))
            }
            _ => None,
        })
        .collect()
}

#[test]
fn same_base_seed_same_layouts() {
    let config = EnvConfig::default();
    let opts = EvalOptions::new(10, 77);
    let mut a = Vec::new();
    evaluate("LLM-only", &mut AdviceFollower, Some(&ScriptedOracle), &config, &opts, &mut a).unwrap();
    let mut b = Vec::new();
    evaluate("cycle", &mut Cycle(0), None, &config, &opts, &mut b).unwrap();
    let (la, lb) = (layouts(&a), layouts(&b));
    assert_eq!(la.len(), 10);
    assert_eq!(la, lb);

    let mut c = Vec::new();
    evaluate("cycle", &mut Cycle(0), None, &config, &EvalOptions::new(10, 78), &mut c).unwrap();
    assert_ne!(la, layouts(&c));
}
