//! 3D grid environment: UAV motion, pan-tilt-zoom camera, view-cone coverage,
//! spherical obstacles, wind and battery.
//!
//! The ground plane is `z = 0`. Only ground cells are ever "covered"; the UAV
//! itself may occupy any cell of the grid that is not inside an obstacle.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Episode length of the 15×15×3 training grid.
pub const T_BASE: u32 = 225;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("battery exhausted")]
    BatteryExhausted,
    #[error("episode over after {0} steps")]
    EpisodeOver(u32),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid camera {field}: {value}")]
    InvalidCamera { field: &'static str, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    pub x_size: u32,
    pub y_size: u32,
    pub z_size: u32,
}

impl GridDims {
    pub const fn new(x_size: u32, y_size: u32, z_size: u32) -> Self {
        Self { x_size, y_size, z_size }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.x_size == 0 || self.y_size == 0 || self.z_size == 0 {
            return Err(EnvError::ConfigInvalid(format!("grid dimensions must be >= 1, got {self}")));
        }
        Ok(())
    }

    pub fn ground_cells(&self) -> usize {
        self.x_size as usize * self.y_size as usize
    }

    pub fn volume(&self) -> u64 {
        self.x_size as u64 * self.y_size as u64 * self.z_size as u64
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= 0
            && p.y >= 0
            && p.z >= 0
            && (p.x as u32) < self.x_size
            && (p.y as u32) < self.y_size
            && (p.z as u32) < self.z_size
    }

    pub fn clamp(&self, x: i32, y: i32, z: i32) -> Position {
        Position {
            x: x.clamp(0, self.x_size as i32 - 1),
            y: y.clamp(0, self.y_size as i32 - 1),
            z: z.clamp(0, self.z_size as i32 - 1),
        }
    }

    /// Largest Euclidean distance between two cells of the grid.
    pub fn max_distance(&self) -> f64 {
        let dx = f64::from(self.x_size - 1);
        let dy = f64::from(self.y_size - 1);
        let dz = f64::from(self.z_size - 1);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.x_size, self.y_size, self.z_size)
    }
}

impl FromStr for GridDims {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(['x', 'X', '×']).collect();
        let bad = || EnvError::ConfigInvalid(format!("grid must look like 15x15x3, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut dims = [0u32; 3];
        for (slot, part) in dims.iter_mut().zip(&parts) {
            *slot = part.trim().parse().map_err(|_| bad())?;
        }
        let dims = GridDims::new(dims[0], dims[1], dims[2]);
        dims.validate()?;
        Ok(dims)
    }
}

/// Integer cell coordinates. Serialized as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 3]", into = "[i32; 3]")]
pub struct Position {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [f64::from(self.x), f64::from(self.y), f64::from(self.z)]
    }

    pub fn offset(&self, dx: i32, dy: i32, dz: i32) -> (i32, i32, i32) {
        (self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn distance_sq(&self, other: &Position) -> i64 {
        let dx = i64::from(self.x - other.x);
        let dy = i64::from(self.y - other.y);
        let dz = i64::from(self.z - other.z);
        dx * dx + dy * dy + dz * dz
    }
}

impl From<[i32; 3]> for Position {
    fn from(v: [i32; 3]) -> Self {
        Position::new(v[0], v[1], v[2])
    }
}

impl From<Position> for [i32; 3] {
    fn from(p: Position) -> Self {
        [p.x, p.y, p.z]
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.x, self.y, self.z)
    }
}

pub const TILT_MIN: i32 = 0;
pub const TILT_MAX: i32 = 90;
pub const TILT_STEP: i32 = 5;
pub const PAN_MIN: i32 = -90;
pub const PAN_MAX: i32 = 90;
pub const PAN_STEP: i32 = 15;
/// Zoom is stored in tenths so that the 0.1 lattice is exact.
pub const ZOOM_MIN_TENTHS: i32 = 5;
pub const ZOOM_MAX_TENTHS: i32 = 20;
/// Tilt at or above this value narrows the footprint to `1×zoom`.
pub const STEEP_TILT: i32 = 80;

/// Pan-tilt-zoom configuration on the discrete camera lattice.
///
/// Tilt and pan are whole degrees, zoom is a magnification in steps of 0.1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCamera", into = "RawCamera")]
pub struct CameraConfig {
    tilt: i32,
    pan: i32,
    zoom_tenths: i32,
}

#[derive(Serialize, Deserialize)]
struct RawCamera {
    tilt: i32,
    pan: i32,
    zoom: f64,
}

impl TryFrom<RawCamera> for CameraConfig {
    type Error = EnvError;

    fn try_from(raw: RawCamera) -> Result<Self, Self::Error> {
        CameraConfig::new(raw.tilt, raw.pan, raw.zoom)
    }
}

impl From<CameraConfig> for RawCamera {
    fn from(c: CameraConfig) -> Self {
        RawCamera { tilt: c.tilt, pan: c.pan, zoom: c.zoom() }
    }
}

impl Default for CameraConfig {
    fn default() -> Self {
        CameraConfig { tilt: 45, pan: 0, zoom_tenths: 10 }
    }
}

impl CameraConfig {
    /// Validating constructor; every component must lie on its lattice.
    pub fn new(tilt: i32, pan: i32, zoom: f64) -> Result<Self, EnvError> {
        if !(TILT_MIN..=TILT_MAX).contains(&tilt) || tilt % TILT_STEP != 0 {
            return Err(EnvError::InvalidCamera { field: "tilt", value: tilt.to_string() });
        }
        if !(PAN_MIN..=PAN_MAX).contains(&pan) || pan % PAN_STEP != 0 {
            return Err(EnvError::InvalidCamera { field: "pan", value: pan.to_string() });
        }
        let scaled = zoom * 10.0;
        let tenths = scaled.round();
        if !zoom.is_finite()
            || (scaled - tenths).abs() > 1e-6
            || !(f64::from(ZOOM_MIN_TENTHS)..=f64::from(ZOOM_MAX_TENTHS)).contains(&tenths)
        {
            return Err(EnvError::InvalidCamera { field: "zoom", value: zoom.to_string() });
        }
        Ok(CameraConfig { tilt, pan, zoom_tenths: tenths as i32 })
    }

    /// Builds a config from arbitrary values by clamping and snapping each
    /// component to the nearest lattice point.
    pub fn snapped(tilt: f64, pan: f64, zoom: f64) -> Self {
        let snap = |v: f64, lo: i32, hi: i32, step: i32| -> i32 {
            let v = v.clamp(f64::from(lo), f64::from(hi));
            let s = ((v / f64::from(step)).round() as i32) * step;
            s.clamp(lo, hi)
        };
        CameraConfig {
            tilt: snap(tilt, TILT_MIN, TILT_MAX, TILT_STEP),
            pan: snap(pan, PAN_MIN, PAN_MAX, PAN_STEP),
            zoom_tenths: snap(zoom * 10.0, ZOOM_MIN_TENTHS, ZOOM_MAX_TENTHS, 1),
        }
    }

    pub(crate) fn from_parts(tilt: i32, pan: i32, zoom_tenths: i32) -> Self {
        debug_assert!((TILT_MIN..=TILT_MAX).contains(&tilt) && tilt % TILT_STEP == 0);
        debug_assert!((PAN_MIN..=PAN_MAX).contains(&pan) && pan % PAN_STEP == 0);
        debug_assert!((ZOOM_MIN_TENTHS..=ZOOM_MAX_TENTHS).contains(&zoom_tenths));
        CameraConfig { tilt, pan, zoom_tenths }
    }

    pub fn tilt(&self) -> i32 {
        self.tilt
    }

    pub fn pan(&self) -> i32 {
        self.pan
    }

    pub fn zoom(&self) -> f64 {
        f64::from(self.zoom_tenths) / 10.0
    }

    pub fn zoom_tenths(&self) -> i32 {
        self.zoom_tenths
    }

    pub fn with_zoom_tenths(self, zoom_tenths: i32) -> Self {
        Self { zoom_tenths: zoom_tenths.clamp(ZOOM_MIN_TENTHS, ZOOM_MAX_TENTHS), ..self }
    }

    pub fn with_tilt(self, tilt: i32) -> Self {
        Self::snapped(f64::from(tilt), f64::from(self.pan), self.zoom())
    }

    pub fn with_pan(self, pan: i32) -> Self {
        Self::snapped(f64::from(self.tilt), f64::from(pan), self.zoom())
    }

    /// Continuous footprint half-width: `2×zoom` below the steep-tilt
    /// threshold, `1×zoom` otherwise.
    pub fn half_width(&self) -> f64 {
        if self.tilt < STEEP_TILT {
            2.0 * self.zoom()
        } else {
            self.zoom()
        }
    }

    /// `⌊half_width⌋`, computed exactly on the tenths lattice.
    pub fn footprint_radius(&self) -> i32 {
        if self.tilt < STEEP_TILT {
            2 * self.zoom_tenths / 10
        } else {
            self.zoom_tenths / 10
        }
    }

    /// Applies a camera action, clamping at the lattice bounds. Movement
    /// actions leave the camera untouched.
    pub fn apply(self, action: Action) -> Self {
        let mut c = self;
        match action {
            Action::TiltUp => c.tilt = (c.tilt + TILT_STEP).min(TILT_MAX),
            Action::TiltDown => c.tilt = (c.tilt - TILT_STEP).max(TILT_MIN),
            Action::PanUp => c.pan = (c.pan + PAN_STEP).min(PAN_MAX),
            Action::PanDown => c.pan = (c.pan - PAN_STEP).max(PAN_MIN),
            Action::ZoomIn => c.zoom_tenths = (c.zoom_tenths + 1).min(ZOOM_MAX_TENTHS),
            Action::ZoomOut => c.zoom_tenths = (c.zoom_tenths - 1).max(ZOOM_MIN_TENTHS),
            _ => {}
        }
        c
    }
}

/// The twelve atomic actions, movement first, then camera.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "x+")]
    XPlus,
    #[serde(rename = "x-")]
    XMinus,
    #[serde(rename = "y+")]
    YPlus,
    #[serde(rename = "y-")]
    YMinus,
    #[serde(rename = "z+")]
    ZPlus,
    #[serde(rename = "z-")]
    ZMinus,
    #[serde(rename = "tilt+")]
    TiltUp,
    #[serde(rename = "tilt-")]
    TiltDown,
    #[serde(rename = "pan+")]
    PanUp,
    #[serde(rename = "pan-")]
    PanDown,
    #[serde(rename = "zoom+")]
    ZoomIn,
    #[serde(rename = "zoom-")]
    ZoomOut,
}

impl Action {
    pub const COUNT: usize = 12;

    pub const ALL: [Action; Action::COUNT] = [
        Action::XPlus,
        Action::XMinus,
        Action::YPlus,
        Action::YMinus,
        Action::ZPlus,
        Action::ZMinus,
        Action::TiltUp,
        Action::TiltDown,
        Action::PanUp,
        Action::PanDown,
        Action::ZoomIn,
        Action::ZoomOut,
    ];

    pub fn index(self) -> usize {
        Action::ALL.iter().position(|a| *a == self).expect("every action is listed")
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    pub fn is_movement(self) -> bool {
        self.index() < 6
    }

    pub fn is_camera(self) -> bool {
        !self.is_movement()
    }

    /// Unit displacement of a movement action, zero for camera actions.
    pub fn displacement(self) -> (i32, i32, i32) {
        match self {
            Action::XPlus => (1, 0, 0),
            Action::XMinus => (-1, 0, 0),
            Action::YPlus => (0, 1, 0),
            Action::YMinus => (0, -1, 0),
            Action::ZPlus => (0, 0, 1),
            Action::ZMinus => (0, 0, -1),
            _ => (0, 0, 0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::XPlus => "x+",
            Action::XMinus => "x-",
            Action::YPlus => "y+",
            Action::YMinus => "y-",
            Action::ZPlus => "z+",
            Action::ZMinus => "z-",
            Action::TiltUp => "tilt+",
            Action::TiltDown => "tilt-",
            Action::PanUp => "pan+",
            Action::PanDown => "pan-",
            Action::ZoomIn => "zoom+",
            Action::ZoomOut => "zoom-",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Position,
    pub radius: f64,
}

impl Obstacle {
    pub fn new(center: Position, radius: f64) -> Self {
        Self { center, radius }
    }

    /// A cell is blocked when its distance to the center is at most the radius.
    pub fn contains(&self, p: Position) -> bool {
        (self.center.distance_sq(&p) as f64) <= self.radius * self.radius
    }
}

/// A ground cell `(i, j, 0)`, serialized as `[i, j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct GroundCell {
    pub i: i32,
    pub j: i32,
}

impl From<[i32; 2]> for GroundCell {
    fn from(v: [i32; 2]) -> Self {
        GroundCell { i: v[0], j: v[1] }
    }
}

impl From<GroundCell> for [i32; 2] {
    fn from(c: GroundCell) -> Self {
        [c.i, c.j]
    }
}

/// Ground cells inside the square footprint centered on the UAV's `(x, y)`,
/// clipped to the grid. Pan does not move the footprint.
pub fn view_cone(position: Position, camera: CameraConfig, dims: GridDims) -> Vec<GroundCell> {
    let r = camera.footprint_radius();
    let (x0, x1) = ((position.x - r).max(0), (position.x + r).min(dims.x_size as i32 - 1));
    let (y0, y1) = ((position.y - r).max(0), (position.y + r).min(dims.y_size as i32 - 1));
    let mut cells = Vec::with_capacity(((x1 - x0 + 1).max(0) * (y1 - y0 + 1).max(0)) as usize);
    for i in x0..=x1 {
        for j in y0..=y1 {
            cells.push(GroundCell { i, j });
        }
    }
    cells
}

/// Per-ground-cell coverage flags and observation counts for one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMap {
    x_size: u32,
    y_size: u32,
    covered: Vec<bool>,
    visit_count: Vec<u32>,
    covered_count: usize,
    redundant_view_count: u64,
}

impl CoverageMap {
    pub fn new(dims: GridDims) -> Self {
        let n = dims.ground_cells();
        CoverageMap {
            x_size: dims.x_size,
            y_size: dims.y_size,
            covered: vec![false; n],
            visit_count: vec![0; n],
            covered_count: 0,
            redundant_view_count: 0,
        }
    }

    fn index(&self, cell: GroundCell) -> Option<usize> {
        if cell.i < 0 || cell.j < 0 || cell.i as u32 >= self.x_size || cell.j as u32 >= self.y_size {
            return None;
        }
        Some(cell.i as usize * self.y_size as usize + cell.j as usize)
    }

    pub fn total_cells(&self) -> usize {
        self.covered.len()
    }

    pub fn covered_count(&self) -> usize {
        self.covered_count
    }

    pub fn redundant_view_count(&self) -> u64 {
        self.redundant_view_count
    }

    /// Cells outside the grid report as covered.
    pub fn is_covered(&self, cell: GroundCell) -> bool {
        self.index(cell).map_or(true, |k| self.covered[k])
    }

    pub fn visits(&self, cell: GroundCell) -> u32 {
        self.index(cell).map_or(0, |k| self.visit_count[k])
    }

    pub fn fraction(&self) -> f64 {
        self.covered_count as f64 / self.total_cells() as f64
    }

    /// Number of cells observed more than once.
    pub fn multi_visit_count(&self) -> usize {
        self.visit_count.iter().filter(|&&v| v > 1).count()
    }

    pub fn uncovered_count_in(&self, cells: &[GroundCell]) -> usize {
        cells.iter().filter(|c| !self.is_covered(**c)).count()
    }

    /// Marks `observed` as covered and bumps their visit counts. Returns the
    /// number of newly covered cells and the visit counts before the update.
    pub fn observe(&mut self, observed: &[GroundCell]) -> (usize, Vec<u32>) {
        let mut newly = 0;
        let mut prior = Vec::with_capacity(observed.len());
        for &cell in observed {
            let Some(k) = self.index(cell) else {
                prior.push(0);
                continue;
            };
            prior.push(self.visit_count[k]);
            self.visit_count[k] += 1;
            if self.covered[k] {
                self.redundant_view_count += 1;
            } else {
                self.covered[k] = true;
                newly += 1;
            }
        }
        self.covered_count += newly;
        (newly, prior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub position: Position,
    pub camera: CameraConfig,
    pub battery: f64,
}

/// What happened during one transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEvents {
    pub observed: Vec<GroundCell>,
    /// Visit counts of `observed` before this step, index-aligned.
    pub prior_visits: Vec<u32>,
    pub newly_covered: usize,
    pub redundant: bool,
    pub collision: bool,
    pub idle: bool,
    pub battery_drain: f64,
    pub wind: Option<[i32; 2]>,
}

fn default_obstacle_count() -> [u32; 2] {
    [2, 5]
}

fn default_obstacle_radius() -> [f64; 2] {
    [1.0, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub dims: GridDims,
    /// Explicit obstacle layout; when absent, obstacles are drawn at reset.
    pub obstacles: Option<Vec<Obstacle>>,
    #[serde(default = "default_obstacle_count")]
    pub obstacle_count: [u32; 2],
    #[serde(default = "default_obstacle_radius")]
    pub obstacle_radius: [f64; 2],
    pub wind_probability: f64,
    pub wind_magnitude: u32,
    pub max_steps: u32,
    pub drain_move: f64,
    pub drain_cam: f64,
    pub initial_camera: CameraConfig,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            dims: GridDims::new(15, 15, 3),
            obstacles: None,
            obstacle_count: default_obstacle_count(),
            obstacle_radius: default_obstacle_radius(),
            wind_probability: 0.1,
            wind_magnitude: 1,
            max_steps: T_BASE,
            drain_move: 1.0 / (2.0 * f64::from(T_BASE)),
            drain_cam: 1.0 / (4.0 * f64::from(T_BASE)),
            initial_camera: CameraConfig::default(),
            seed: 0,
        }
    }
}

impl EnvConfig {
    /// Config for `test` dims with step budget and battery drain scaled by
    /// the volume ratio to the `train` grid.
    pub fn scaled(&self, train: GridDims, test: GridDims) -> EnvConfig {
        let alpha = crate::eval::scale_factor(train, test);
        EnvConfig {
            dims: test,
            obstacles: None,
            max_steps: (alpha * f64::from(T_BASE)).round().max(1.0) as u32,
            drain_move: 1.0 / (2.0 * f64::from(T_BASE)) / alpha,
            drain_cam: 1.0 / (4.0 * f64::from(T_BASE)) / alpha,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        self.dims.validate()?;
        let invalid = |m: String| Err(EnvError::ConfigInvalid(m));
        if !(0.0..=1.0).contains(&self.wind_probability) {
            return invalid(format!("wind_probability {} not in [0,1]", self.wind_probability));
        }
        if self.wind_magnitude == 0 {
            return invalid("wind_magnitude must be positive".into());
        }
        if self.max_steps == 0 {
            return invalid("max_steps must be >= 1".into());
        }
        if !(self.drain_move >= 0.0 && self.drain_cam >= 0.0) {
            return invalid("battery drains must be >= 0".into());
        }
        let [lo, hi] = self.obstacle_count;
        if lo > hi {
            return invalid(format!("obstacle_count range [{lo}, {hi}] is empty"));
        }
        let [rlo, rhi] = self.obstacle_radius;
        if !(rlo > 0.0 && rlo <= rhi) {
            return invalid(format!("obstacle_radius range [{rlo}, {rhi}] is invalid"));
        }
        if let Some(obstacles) = &self.obstacles {
            for o in obstacles {
                if !(o.radius > 0.0) {
                    return invalid(format!("obstacle at {} has non-positive radius", o.center));
                }
                if !self.dims.contains(o.center) {
                    return invalid(format!("obstacle center {} outside {}", o.center, self.dims));
                }
            }
        }
        Ok(())
    }
}

const WIND_DIRECTIONS: [[i32; 2]; 8] =
    [[-1, -1], [-1, 0], [-1, 1], [0, -1], [0, 1], [1, -1], [1, 0], [1, 1]];

const RANDOM_LAYOUT_ATTEMPTS: usize = 64;

/// One environment instance. Not shared between threads; run several for
/// parallel collection.
#[derive(Debug, Clone)]
pub struct Env {
    config: EnvConfig,
    obstacles: Vec<Obstacle>,
    state: UavState,
    coverage: CoverageMap,
    steps: u32,
    rng: ChaCha8Rng,
}

impl Env {
    pub fn reset(config: &EnvConfig, seed: u64) -> Result<Env, EnvError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = config.dims;
        let (obstacles, start) = match &config.obstacles {
            Some(list) => {
                let free = free_cells(dims, list);
                let start = *free.choose(&mut rng).ok_or_else(|| {
                    EnvError::ConfigInvalid("obstacles leave no free start cell".into())
                })?;
                (list.clone(), start)
            }
            None => {
                let mut layout = None;
                for _ in 0..RANDOM_LAYOUT_ATTEMPTS {
                    let obstacles = random_obstacles(config, &mut rng);
                    let free = free_cells(dims, &obstacles);
                    if let Some(&start) = free.choose(&mut rng) {
                        layout = Some((obstacles, start));
                        break;
                    }
                }
                layout.ok_or_else(|| {
                    EnvError::ConfigInvalid("random obstacles never left a free start cell".into())
                })?
            }
        };
        Ok(Env {
            config: config.clone(),
            obstacles,
            state: UavState { position: start, camera: config.initial_camera, battery: 1.0 },
            coverage: CoverageMap::new(dims),
            steps: 0,
            rng,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn dims(&self) -> GridDims {
        self.config.dims
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn state(&self) -> &UavState {
        &self.state
    }

    pub fn coverage(&self) -> &CoverageMap {
        &self.coverage
    }

    pub fn steps_taken(&self) -> u32 {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.steps >= self.config.max_steps || self.state.battery <= 0.0
    }

    pub fn collides(&self, p: Position) -> bool {
        self.obstacles.iter().any(|o| o.contains(p))
    }

    pub fn step(&mut self, action: Action) -> Result<StepEvents, EnvError> {
        self.advance(Some(action))
    }

    /// A step that leaves the pose unchanged apart from wind; costs the
    /// camera drain.
    pub fn hold(&mut self) -> Result<StepEvents, EnvError> {
        self.advance(None)
    }

    fn advance(&mut self, action: Option<Action>) -> Result<StepEvents, EnvError> {
        if self.steps >= self.config.max_steps {
            return Err(EnvError::EpisodeOver(self.steps));
        }
        if self.state.battery <= 0.0 {
            return Err(EnvError::BatteryExhausted);
        }
        let prev = self.state;
        let (mut dx, mut dy, dz) = action.map_or((0, 0, 0), Action::displacement);
        let camera = action.map_or(prev.camera, |a| prev.camera.apply(a));

        let mut wind = None;
        if self.rng.gen_bool(self.config.wind_probability) {
            let [wx, wy] = WIND_DIRECTIONS[self.rng.gen_range(0..WIND_DIRECTIONS.len())];
            let m = self.config.wind_magnitude as i32;
            dx += wx * m;
            dy += wy * m;
            wind = Some([wx * m, wy * m]);
        }
        let (cx, cy, cz) = prev.position.offset(dx, dy, dz);
        let mut position = self.config.dims.clamp(cx, cy, cz);
        let collision = self.collides(position);
        if collision {
            position = prev.position;
        }

        let drain = match action {
            Some(a) if a.is_movement() => self.config.drain_move,
            _ => self.config.drain_cam,
        };
        let battery = (prev.battery - drain).max(0.0);
        self.state = UavState { position, camera, battery };

        let observed = view_cone(position, camera, self.config.dims);
        let (newly_covered, prior_visits) = self.coverage.observe(&observed);
        self.steps += 1;

        Ok(StepEvents {
            redundant: !observed.is_empty() && newly_covered == 0,
            observed,
            prior_visits,
            newly_covered,
            collision,
            idle: position == prev.position && camera == prev.camera,
            battery_drain: prev.battery - battery,
            wind,
        })
    }
}

fn free_cells(dims: GridDims, obstacles: &[Obstacle]) -> Vec<Position> {
    let mut free = Vec::new();
    for x in 0..dims.x_size as i32 {
        for y in 0..dims.y_size as i32 {
            for z in 0..dims.z_size as i32 {
                let p = Position::new(x, y, z);
                if !obstacles.iter().any(|o| o.contains(p)) {
                    free.push(p);
                }
            }
        }
    }
    free
}

fn random_obstacles(config: &EnvConfig, rng: &mut ChaCha8Rng) -> Vec<Obstacle> {
    let dims = config.dims;
    let [lo, hi] = config.obstacle_count;
    let [rlo, rhi] = config.obstacle_radius;
    let count = rng.gen_range(lo..=hi);
    (0..count)
        .map(|_| {
            let center = Position::new(
                rng.gen_range(0..dims.x_size as i32),
                rng.gen_range(0..dims.y_size as i32),
                rng.gen_range(0..dims.z_size as i32),
            );
            // radii on a half-cell lattice, like the prompt's 1.5 and 2
            let radius = ((rng.gen_range(rlo..=rhi) * 2.0).round() / 2.0).max(rlo);
            Obstacle::new(center, radius)
        })
        .collect()
}

/// Seed for episode `index` of stream `stream` under `base`. Distinct
/// streams keep training and evaluation layouts apart; one stream and base
/// give every method the same layouts.
pub fn episode_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
