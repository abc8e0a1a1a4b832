//! Run configuration, read from JSON. Unknown keys are rejected.

use dkhub_core::compile::{placement_for, CompileError, TrotterPlan};
use dkhub_core::dk_mapping::{build_layout_with, LayoutOptions};
use dkhub_core::embed::{place, DeviceGraph, DeviceKind, Placement};
use dkhub_core::model::{to_spinless, CellScheme, HubbardModel, Site, Spin, SpinlessLattice};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lx: usize,
    pub ly: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "four")]
    pub u: f64,
}

fn one() -> f64 {
    1.0
}

fn four() -> f64 {
    4.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Separated,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceName {
    AllToAll,
    Diamond,
    HeavyHoneycomb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterConfig {
    pub order: u8,
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "yes")]
    pub merge: bool,
}

/// Initial occupation before the quench.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Vacuum,
    /// Checkerboard spin density wave: spin up where `x + y` is even.
    Sdw,
    /// Occupied spinless modes.
    Occupied(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observables {
    #[serde(default)]
    pub densities: bool,
    /// Pairs `(a, b)` for `⟨n_a n_b⟩`.
    #[serde(default)]
    pub correlators: Vec<[usize; 2]>,
    /// Pairs `(j, k)` for `G_jk(t)`.
    #[serde(default)]
    pub greens: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub circuit: Option<String>,
    pub report: Option<String>,
    pub results: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default = "separated")]
    pub scheme: SchemeName,
    #[serde(default = "all_to_all")]
    pub device: DeviceName,
    pub trotter: TrotterConfig,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub observables: Observables,
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub output: Outputs,
    /// Test hook: reverses every horizontal bond orientation.
    #[serde(default)]
    pub flip_orientation: bool,
}

fn separated() -> SchemeName {
    SchemeName::Separated
}

fn all_to_all() -> DeviceName {
    DeviceName::AllToAll
}

/// Configuration errors.
#[derive(Debug)]
pub enum ConfigError {
    Parse(serde_json::Error),
    Model(String),
    Pattern(String),
    Compile(CompileError),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(e) => write!(f, "invalid config: {e}"),
            ConfigError::Model(m) => write!(f, "invalid model: {m}"),
            ConfigError::Pattern(m) => write!(f, "invalid initial state: {m}"),
            ConfigError::Compile(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<CompileError> for ConfigError {
    fn from(e: CompileError) -> Self {
        ConfigError::Compile(e)
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(s).map_err(ConfigError::Parse)
    }

    /// A small default instance: 2×2, separated, all-to-all.
    pub fn small() -> Self {
        RunConfig {
            model: ModelConfig { lx: 2, ly: 2, j: 1.0, u: 4.0 },
            scheme: SchemeName::Separated,
            device: DeviceName::AllToAll,
            trotter: TrotterConfig { order: 2, dt: 0.05, steps: 20, merge: true },
            initial: InitialState::Sdw,
            observables: Observables::default(),
            shots: None,
            seed: 0,
            cap: None,
            output: Outputs::default(),
            flip_orientation: false,
        }
    }

    pub fn model(&self) -> Result<HubbardModel, ConfigError> {
        HubbardModel::new(self.model.lx, self.model.ly, self.model.j, self.model.u)
            .map_err(|e| ConfigError::Model(e.to_string()))
    }

    pub fn scheme(&self) -> CellScheme {
        match self.scheme {
            SchemeName::Separated => CellScheme::Separated,
            SchemeName::Interleaved => CellScheme::Interleaved,
        }
    }

    pub fn device(&self) -> DeviceKind {
        match self.device {
            DeviceName::AllToAll => DeviceKind::AllToAll,
            DeviceName::Diamond => DeviceKind::Diamond,
            DeviceName::HeavyHoneycomb => DeviceKind::HeavyHoneycomb,
        }
    }

    pub fn lattice(&self) -> Result<SpinlessLattice, ConfigError> {
        Ok(to_spinless(&self.model()?, self.scheme()))
    }

    pub fn plan(&self) -> Result<TrotterPlan, ConfigError> {
        let mut plan = TrotterPlan::new(self.trotter.order, self.trotter.dt, self.trotter.steps)?;
        plan.merge_adjacent = self.trotter.merge;
        Ok(plan)
    }

    /// Placement on the smallest fitting device, with an optional Majorana
    /// corner.
    pub fn placement(&self, majorana_corner: Option<usize>) -> Result<Placement, ConfigError> {
        if majorana_corner.is_none() && !self.flip_orientation {
            return Ok(placement_for(&self.model()?, self.scheme(), self.device())?);
        }
        let opts = LayoutOptions { majorana_corner, flip_orientation: self.flip_orientation };
        let layout = build_layout_with(&self.lattice()?, opts).map_err(CompileError::from)?;
        let graph = DeviceGraph::fitting(self.device(), &layout);
        Ok(place(&layout, &graph).map_err(CompileError::from)?)
    }

    /// Occupation per spinless mode.
    pub fn pattern(&self) -> Result<Vec<bool>, ConfigError> {
        let lat = self.lattice()?;
        let mut occ = vec![false; lat.n_sites()];
        match &self.initial {
            InitialState::Vacuum => {}
            InitialState::Sdw => {
                for y in 0..self.model.ly {
                    for x in 0..self.model.lx {
                        let spin = if (x + y) % 2 == 0 { Spin::Up } else { Spin::Down };
                        occ[lat.site_of(Site { x, y }, spin)] = true;
                    }
                }
            }
            InitialState::Occupied(modes) => {
                for &m in modes {
                    *occ.get_mut(m).ok_or_else(|| ConfigError::Pattern(format!("mode {m} out of range")))? = true;
                }
            }
        }
        Ok(occ)
    }
}
