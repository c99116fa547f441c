use crate::env::{Action, CoverageMap, GridDims, Obstacle, UavState};
use crate::pare::{cam_align_penalty, Advice};
use crate::policy::{encode_observation, PolicyParams};

/// What a controller sees before choosing a step.
#[derive(Debug, Clone, Copy)]
pub struct ControlInput<'a> {
    pub state: &'a UavState,
    pub coverage: &'a CoverageMap,
    pub obstacles: &'a [Obstacle],
    pub dims: GridDims,
    /// Present when the controller asks for advice and the advisor answered.
    pub advice: Option<&'a Advice>,
}

pub trait Controller {
    fn wants_advice(&self) -> bool {
        false
    }

    /// The action to execute, or `None` to hold.
    fn act(&mut self, input: &ControlInput<'_>) -> Option<Action>;
}

/// Argmax over the policy logits; the lowest index wins ties.
pub struct GreedyPolicy<'a>(pub &'a PolicyParams);

impl Controller for GreedyPolicy<'_> {
    fn act(&mut self, input: &ControlInput<'_>) -> Option<Action> {
        let obs = encode_observation(input.state, input.coverage, input.obstacles, input.dims);
        let (logits, _) = self.0.forward(&obs);
        let mut best = 0;
        for (k, &z) in logits.iter().enumerate() {
            if z > logits[best] {
                best = k;
            }
        }
        Action::from_index(best)
    }
}

/// Executes advice directly, one atomic action at a time.
pub struct AdviceFollower;

impl Controller for AdviceFollower {
    fn wants_advice(&self) -> bool {
        true
    }

    fn act(&mut self, input: &ControlInput<'_>) -> Option<Action> {
        input.advice.and_then(|a| advice_action(input.state, a, input.dims))
    }
}

/// The single action that most reduces the L1 gap between the current pose
/// and the advised target: position first, camera once position matches,
/// ties in action order. `None` when the pose already matches.
pub fn advice_action(state: &UavState, advice: &Advice, dims: GridDims) -> Option<Action> {
    let target = advice.target_position(state.position, dims);
    let p = state.position;
    let position_gap = (target.x - p.x).abs() + (target.y - p.y).abs() + (target.z - p.z).abs();
    let cam = state.camera;
    let goal = advice.camera_target;
    let cam_gap = |c| -cam_align_penalty(c, goal, false);
    if position_gap > 0 {
        let mut best: Option<(Action, i32)> = None;
        for a in Action::ALL.into_iter().filter(|a| a.is_movement()) {
            let (dx, dy, dz) = a.displacement();
            let (x, y, z) = p.offset(dx, dy, dz);
            let gap = (target.x - x).abs() + (target.y - y).abs() + (target.z - z).abs();
            if best.map_or(true, |(_, g)| gap < g) {
                best = Some((a, gap));
            }
        }
        return best.map(|(a, _)| a);
    }
    let current = cam_gap(cam);
    if current == 0.0 {
        return None;
    }
    let mut best: Option<(Action, f64)> = None;
    for a in Action::ALL.into_iter().filter(|a| a.is_camera()) {
        let gap = cam_gap(cam.apply(a));
        if best.map_or(true, |(_, g)| gap < g) {
            best = Some((a, gap));
        }
    }
    best.filter(|&(_, g)| g < current).map(|(a, _)| a)
}
