//! Fixed-length observation vector fed to the policy and value networks.
//!
//! Layout (37 values, each in `[-1, 1]`):
//!
//! | range  | content                                             |
//! |--------|-----------------------------------------------------|
//! | 0..3   | position, each axis divided by `dim − 1`            |
//! | 3..6   | tilt/90, pan/90, (zoom − 0.5)/1.5                   |
//! | 6      | battery                                             |
//! | 7      | covered fraction of the ground                      |
//! | 8..33  | 5×5 patch of 3×3-cell blocks around `(x, y)`: covered fraction of each block, off-grid cells count as covered |
//! | 33..37 | unit vector and normalized distance to the nearest obstacle center |

use crate::env::{CoverageMap, GridDims, GroundCell, Obstacle, UavState};

pub const OBS_DIM: usize = 37;
const PATCH_RADIUS: i32 = 2;
/// Side of the square block of ground cells behind one patch element.
pub const PATCH_BLOCK: i32 = 3;

pub type Observation = [f64; OBS_DIM];

pub fn encode_observation(
    state: &UavState,
    coverage: &CoverageMap,
    obstacles: &[Obstacle],
    dims: GridDims,
) -> Observation {
    let mut obs = [0.0; OBS_DIM];
    let norm = |v: i32, size: u32| if size > 1 { f64::from(v) / f64::from(size - 1) } else { 0.0 };
    let p = state.position;
    obs[0] = norm(p.x, dims.x_size);
    obs[1] = norm(p.y, dims.y_size);
    obs[2] = norm(p.z, dims.z_size);

    let c = state.camera;
    obs[3] = f64::from(c.tilt()) / 90.0;
    obs[4] = f64::from(c.pan()) / 90.0;
    obs[5] = (c.zoom() - 0.5) / 1.5;
    obs[6] = state.battery.clamp(0.0, 1.0);
    obs[7] = coverage.fraction();

    let mut k = 8;
    let half = PATCH_BLOCK / 2;
    for bi in -PATCH_RADIUS..=PATCH_RADIUS {
        for bj in -PATCH_RADIUS..=PATCH_RADIUS {
            let (ci, cj) = (p.x + bi * PATCH_BLOCK, p.y + bj * PATCH_BLOCK);
            let mut covered = 0;
            for di in -half..=half {
                for dj in -half..=half {
                    covered += i32::from(coverage.is_covered(GroundCell { i: ci + di, j: cj + dj }));
                }
            }
            obs[k] = f64::from(covered) / f64::from(PATCH_BLOCK * PATCH_BLOCK);
            k += 1;
        }
    }

    let nearest = obstacles
        .iter()
        .map(|o| (o, (o.center.distance_sq(&p) as f64).sqrt()))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match nearest {
        Some((o, d)) => {
            if d > 0.0 {
                obs[33] = f64::from(o.center.x - p.x) / d;
                obs[34] = f64::from(o.center.y - p.y) / d;
                obs[35] = f64::from(o.center.z - p.z) / d;
            }
            let d_max = dims.max_distance();
            obs[36] = if d_max > 0.0 { (d / d_max).min(1.0) } else { 0.0 };
        }
        None => obs[36] = 1.0,
    }
    obs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{view_cone, CameraConfig, GroundCell, Position};

    const DIMS: GridDims = GridDims::new(15, 15, 3);

    fn state(x: i32, y: i32, z: i32, battery: f64) -> UavState {
        UavState { position: Position::new(x, y, z), camera: CameraConfig::default(), battery }
    }

    #[test]
    fn battery_and_position_normalization() {
        let obs = encode_observation(&state(14, 14, 2, 1.0), &CoverageMap::new(DIMS), &[], DIMS);
        assert_eq!(obs[6], 1.0);
        assert_eq!(&obs[..3], &[1.0, 1.0, 1.0]);
        assert_eq!(obs[36], 1.0);
    }

    fn full_map() -> CoverageMap {
        let mut map = CoverageMap::new(DIMS);
        let all: Vec<GroundCell> = (0..15).flat_map(|i| (0..15).map(move |j| GroundCell { i, j })).collect();
        map.observe(&all);
        map
    }

    #[test]
    fn saturated_patch() {
        let obs = encode_observation(&state(7, 7, 1, 0.5), &full_map(), &[], DIMS);
        assert!(obs[8..33].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn off_grid_patch_reads_covered() {
        let obs = encode_observation(&state(0, 0, 0, 0.5), &CoverageMap::new(DIMS), &[], DIMS);
        // first block row lies entirely off-grid
        assert!(obs[8..13].iter().all(|&v| v == 1.0));
        // center block straddles the corner: 5 of its 9 cells are off-grid
        assert_eq!(obs[8 + 12], 5.0 / 9.0);
        // two blocks along +y: only the i = -1 row is off-grid
        assert_eq!(obs[8 + 12 + 2], 3.0 / 9.0);
        // two blocks along +x and +y: fully on-grid and uncovered
        assert_eq!(obs[8 + 12 + 12], 0.0);
    }

    #[test]
    fn patch_matches_brute_force_block_fractions() {
        let mut map = CoverageMap::new(DIMS);
        map.observe(&view_cone(Position::new(4, 9, 0), CameraConfig::new(0, 0, 1.5).unwrap(), DIMS));
        let p = Position::new(6, 6, 1);
        let obs = encode_observation(&UavState { position: p, camera: CameraConfig::default(), battery: 1.0 }, &map, &[], DIMS);
        let mut expected = Vec::new();
        for bi in -2..=2 {
            for bj in -2..=2 {
                let mut n = 0.0;
                for i in p.x + 3 * bi - 1..=p.x + 3 * bi + 1 {
                    for j in p.y + 3 * bj - 1..=p.y + 3 * bj + 1 {
                        let inside = (0..15).contains(&i) && (0..15).contains(&j);
                        if !inside || map.visits(GroundCell { i, j }) > 0 {
                            n += 1.0;
                        }
                    }
                }
                expected.push(n / 9.0);
            }
        }
        assert_eq!(&obs[8..33], expected.as_slice());
    }

    #[test]
    fn elements_bounded() {
        let obstacles = [Obstacle::new(Position::new(3, 9, 2), 1.5)];
        let cam = CameraConfig::new(90, -90, 0.5).unwrap();
        let s = UavState { position: Position::new(12, 1, 0), camera: cam, battery: 0.3 };
        let obs = encode_observation(&s, &CoverageMap::new(DIMS), &obstacles, DIMS);
        assert!(obs.iter().all(|v| (-1.0..=1.0).contains(v)));
        let unit: f64 = obs[33..36].iter().map(|v| v * v).sum();
        assert!((unit - 1.0).abs() < 1e-12);
    }
}
