//! Scenario configuration (flat TOML), the built-in presets and sampling of
//! the initial data.
//!
//! A config file names a preset with `scenario = "..."`; every other key
//! overrides one field of that preset. Unknown keys are rejected.
//!
//! | key | meaning |
//! |-----|---------|
//! | `scenario` | `example1-flat`, `example1-humps`, `example2`, `example3`, `lake-at-rest` or `custom` |
//! | `domain` | `[x0, x1, y0, y1]` |
//! | `nx`, `ny` | base grid, `2 nx ny` triangles |
//! | `gravity`, `rho0`, `sigma`, `eps` | physics constants |
//! | `end_time`, `still_dt` | final time; step used when nothing moves |
//! | `boundary` | `transmissive` or `wall` |
//! | `bathymetry` | `flat`, `two-humps` or `center-hump` |
//! | `interface` | `none`, `circle` or `corner-region` |
//! | `interface_center`, `interface_radius` | circle geometry |
//! | `inside`, `outside` | `[w, u, v]` in fluid 1 and fluid 2 |
//! | `rho_inside`, `rho_outside` | densities in units of `rho0` |
//! | `track_interface`, `correct_density` | interface treatment switches |
//! | `adaptive`, `max_level`, `sigma_tol`, `coarsen_factor`, `indicator_floor` | mesh adaptation |
//! | `snapshots`, `format`, `output_dir` | output cadence and location |

use crate::amr::AmrSettings;
use crate::cu::BoundaryKind;
use crate::interface::{classify, levelset_fraction, vertex_levelset, FluidClass};
use crate::error::{Result, SwedError};
use crate::geometry::{self, Point};
use crate::mesh::{build_uniform, sample_bathymetry, Bathymetry, BottomProfile, Domain, TriMesh};
use crate::solver::{Simulation, SolverSettings};
use crate::state::{PhysicsParams, State};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    Example1Flat,
    Example1Humps,
    Example2,
    Example3,
    LakeAtRest,
    Custom,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] =
        [ScenarioId::Example1Flat, ScenarioId::Example1Humps, ScenarioId::Example2, ScenarioId::Example3, ScenarioId::LakeAtRest, ScenarioId::Custom];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::Example1Flat => "example1-flat",
            ScenarioId::Example1Humps => "example1-humps",
            ScenarioId::Example2 => "example2",
            ScenarioId::Example3 => "example3",
            ScenarioId::LakeAtRest => "lake-at-rest",
            ScenarioId::Custom => "custom",
        }
    }
}

/// Initial position of the density jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterfaceShape {
    /// One fluid everywhere.
    None,
    /// Fluid 1 inside the circle.
    Circle,
    /// Fluid 1 in `{x < -0.5, y < 0}`, `{x < 0, y < -0.5}` and the disk of
    /// radius 0.5 about `(-0.5, -0.5)`.
    CornerRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Vtk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub domain: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    pub gravity: f64,
    pub rho0: f64,
    pub sigma: f64,
    pub eps: f64,
    pub end_time: f64,
    pub still_dt: f64,
    pub bathymetry: BottomProfile,
    #[serde(default)]
    pub boundary: BoundaryKind,
    pub interface: InterfaceShape,
    pub interface_center: [f64; 2],
    pub interface_radius: f64,
    pub inside: [f64; 3],
    pub outside: [f64; 3],
    pub rho_inside: f64,
    pub rho_outside: f64,
    pub track_interface: bool,
    pub correct_density: bool,
    pub adaptive: bool,
    pub max_level: u8,
    pub sigma_tol: f64,
    pub coarsen_factor: f64,
    pub indicator_floor: f64,
    pub snapshots: usize,
    pub format: OutputFormat,
    pub output_dir: String,
}

impl ScenarioConfig {
    pub fn preset(id: ScenarioId) -> Self {
        let p = PhysicsParams::default();
        let amr = AmrSettings::default();
        let base = ScenarioConfig {
            scenario: id,
            domain: [-1.0, 1.0, -1.0, 1.0],
            nx: 100,
            ny: 100,
            gravity: p.g,
            rho0: p.rho0,
            sigma: p.sigma,
            eps: p.eps,
            end_time: 0.15,
            still_dt: 1e-3,
            bathymetry: BottomProfile::Flat,
            boundary: BoundaryKind::Transmissive,
            interface: InterfaceShape::Circle,
            interface_center: [0.0, 0.0],
            interface_radius: 0.5f64.sqrt(),
            inside: [2.0, 0.0, 0.0],
            outside: [1.0, 0.0, 0.0],
            rho_inside: 1.5,
            rho_outside: 1.0,
            track_interface: true,
            correct_density: true,
            adaptive: false,
            max_level: amr.max_level,
            sigma_tol: amr.sigma_tol,
            coarsen_factor: amr.coarsen_factor,
            indicator_floor: amr.indicator_floor,
            snapshots: 0,
            format: OutputFormat::Csv,
            output_dir: "out".into(),
        };
        match id {
            ScenarioId::Example1Flat => base,
            ScenarioId::Example1Humps => ScenarioConfig { bathymetry: BottomProfile::TwoHumps, end_time: 0.2, ..base },
            ScenarioId::Example2 => ScenarioConfig {
                interface_radius: 0.5,
                inside: [3.0, 0.0, 0.0],
                outside: [2.0, 0.0, 0.0],
                rho_inside: 4.0 / 3.0,
                rho_outside: 3.0,
                sigma_tol: 0.1,
                ..base
            },
            ScenarioId::Example3 => ScenarioConfig {
                bathymetry: BottomProfile::CenterHump,
                interface: InterfaceShape::CornerRegion,
                inside: [2.0, 0.0, 0.0],
                outside: [1.0, 0.0, 0.0],
                rho_inside: 1.0,
                rho_outside: 1.5,
                ..base
            },
            ScenarioId::LakeAtRest => ScenarioConfig {
                bathymetry: BottomProfile::TwoHumps,
                interface: InterfaceShape::None,
                inside: [2.0, 0.0, 0.0],
                outside: [2.0, 0.0, 0.0],
                rho_inside: 1.0,
                track_interface: false,
                correct_density: false,
                ..base
            },
            ScenarioId::Custom => ScenarioConfig {
                interface: InterfaceShape::None,
                inside: [1.0, 0.0, 0.0],
                rho_inside: 1.0,
                track_interface: false,
                correct_density: false,
                ..base
            },
        }
    }

    /// Parse a config: the named preset with the given keys overridden.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e: toml::de::Error| SwedError::Config(e.message().to_string()))?;
        let id = match user.get("scenario") {
            Some(v) => ScenarioId::deserialize(v.clone()).map_err(|_| {
                let names: Vec<_> = ScenarioId::ALL.iter().map(|s| s.name()).collect();
                SwedError::Config(format!("unknown scenario {v}, expected one of {}", names.join(", ")))
            })?,
            None => return Err(SwedError::Config("missing key `scenario`".into())),
        };
        let preset = toml::Table::try_from(Self::preset(id)).map_err(|e| SwedError::Internal(e.to_string()))?;
        let parse = |table: toml::Table| -> std::result::Result<ScenarioConfig, String> {
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| e.message().to_string())
        };
        let mut merged = preset.clone();
        merged.extend(user.clone());
        let cfg = parse(merged).map_err(|msg| {
            // The merged table loses the key path; find the key that breaks the preset.
            let key = user.iter().find(|(k, v)| {
                let mut t = preset.clone();
                t.insert((*k).clone(), (*v).clone());
                parse(t).is_err()
            });
            match key {
                Some((k, _)) => SwedError::Config(format!("key `{k}`: {msg}")),
                None => SwedError::Config(msg),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SwedError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            SwedError::Config(m) => SwedError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Every key, in the format accepted by [`ScenarioConfig::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config fields are all representable in TOML")
    }

    pub fn physics(&self) -> PhysicsParams {
        PhysicsParams { g: self.gravity, rho0: self.rho0, sigma: self.sigma, eps: self.eps }
    }

    pub fn domain(&self) -> Domain {
        let [x0, x1, y0, y1] = self.domain;
        Domain { x0, x1, y0, y1 }
    }

    pub fn amr(&self) -> Option<AmrSettings> {
        self.adaptive.then_some(AmrSettings { max_level: self.max_level, sigma_tol: self.sigma_tol, coarsen_factor: self.coarsen_factor, indicator_floor: self.indicator_floor })
    }

    pub fn densities(&self) -> [f64; 2] {
        [self.rho_inside * self.rho0, self.rho_outside * self.rho0]
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            physics: self.physics(),
            rho: self.densities(),
            bottom: self.bathymetry,
            boundary: self.boundary,
            track_interface: self.track_interface,
            correct_density: self.correct_density,
            amr: self.amr(),
            still_dt: self.still_dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SwedError::Config(m));
        self.physics().validate().map_err(|e| SwedError::Config(e.to_string()))?;
        self.domain().validate().map_err(|e| SwedError::Config(e.to_string()))?;
        if self.nx == 0 || self.ny == 0 {
            return bad(format!("nx and ny must be positive, got {} x {}", self.nx, self.ny));
        }
        if !(self.end_time >= 0.0 && self.end_time.is_finite()) {
            return bad(format!("end_time must be a non-negative number, got {}", self.end_time));
        }
        if !(self.still_dt > 0.0 && self.still_dt.is_finite()) {
            return bad(format!("still_dt must be positive, got {}", self.still_dt));
        }
        if !(self.rho_inside > 0.0 && self.rho_outside > 0.0 && self.rho_inside.is_finite() && self.rho_outside.is_finite()) {
            return bad(format!("densities must be positive, got {} and {}", self.rho_inside, self.rho_outside));
        }
        if self.interface == InterfaceShape::Circle && !(self.interface_radius > 0.0 && self.interface_radius.is_finite()) {
            return bad(format!("interface_radius must be positive, got {}", self.interface_radius));
        }
        if self.inside.iter().chain(&self.outside).chain(&self.interface_center).any(|v| !v.is_finite()) {
            return bad("initial values must be finite".into());
        }
        if self.adaptive {
            self.amr().unwrap_or_default().validate()?;
        }
        Ok(())
    }

    /// Signed distance to the initial interface, positive in fluid 1.
    pub fn levelset(&self, p: Point) -> f64 {
        match self.interface {
            InterfaceShape::None => 1.0,
            InterfaceShape::Circle => self.interface_radius - geometry::dist(p, self.interface_center),
            InterfaceShape::CornerRegion => {
                let quadrant = |a: f64, b: f64| {
                    let (dx, dy) = (p[0] - a, p[1] - b);
                    if dx < 0.0 && dy < 0.0 {
                        (-dx).min(-dy)
                    } else {
                        -dx.max(0.0).hypot(dy.max(0.0))
                    }
                };
                let disk = 0.5 - geometry::dist(p, [-0.5, -0.5]);
                quadrant(-0.5, 0.0).max(quadrant(0.0, -0.5)).max(disk)
            }
        }
    }

    /// Fraction of triangle `t` in fluid 1, from the polygon cut off by the
    /// chords joining the interface crossings of its edges.
    pub fn fluid1_fraction(&self, t: &[Point; 3]) -> f64 {
        let s = t.map(|p| self.levelset(p));
        if s.iter().all(|&v| v >= 0.0) {
            return 1.0;
        }
        if s.iter().all(|&v| v < 0.0) {
            return 0.0;
        }
        let mut poly = Vec::with_capacity(4);
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            if s[i] >= 0.0 {
                poly.push(a);
            }
            if (s[i] >= 0.0) != (s[(i + 1) % 3] >= 0.0) {
                poly.push(self.crossing(a, b));
            }
        }
        (geometry::polygon_area(&poly) / geometry::triangle_area(t)).clamp(0.0, 1.0)
    }

    /// Zero of the level set on segment `ab` (signs differ at the ends).
    fn crossing(&self, a: Point, b: Point) -> Point {
        let (mut lo, mut hi) = (0.0, 1.0);
        let positive_at_a = self.levelset(a) >= 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (self.levelset(geometry::lerp(a, b, mid)) >= 0.0) == positive_at_a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        geometry::lerp(a, b, 0.5 * (lo + hi))
    }

    pub fn base_mesh(&self) -> Result<TriMesh> {
        build_uniform(self.nx, self.ny, self.domain())
    }

    pub fn sample_bathymetry(&self, mesh: &TriMesh) -> Result<Bathymetry> {
        let b = self.bathymetry;
        sample_bathymetry(mesh, |x, y| b.eval(x, y))
    }

    /// Initial cell averages: barycenter samples of the piecewise data, the
    /// signed distance for the level set and clipped area fractions. Cells
    /// the vertex level set marks as mixed get the average of the two fluid
    /// states weighted by the split of that level set, so that a resting
    /// density jump starts in hydrostatic balance.
    pub fn initial_state(&self, mesh: &TriMesh, bathy: &Bathymetry) -> State {
        let [r1, r2] = self.densities();
        let fluid = |v: [f64; 3], rho: f64, b: f64| {
            let h = (v[0] - b).max(0.0);
            [b + h, h * v[1], h * v[2], h * rho]
        };
        let mut s = State::zeros(mesh.n_cells());
        for j in 0..mesh.n_cells() {
            let c = mesh.geom[j].centroid;
            let phi = self.levelset(c);
            let b = bathy.center[j];
            let q = if phi > 0.0 { fluid(self.inside, r1, b) } else { fluid(self.outside, r2, b) };
            let f = if self.interface == InterfaceShape::None { 1.0 } else { self.fluid1_fraction(&mesh.triangle(j)) };
            s.u[j] = [q[0], q[1], q[2], q[3], phi, f];
        }
        if self.interface != InterfaceShape::None {
            let vphi = vertex_levelset(mesh, &s);
            for (j, cls) in classify(mesh, &vphi).into_iter().enumerate() {
                if cls != FluidClass::Mixed {
                    continue;
                }
                let a = levelset_fraction(mesh.cells[j].map(|v| vphi[v]));
                let b = bathy.center[j];
                let (q1, q2) = (fluid(self.inside, r1, b), fluid(self.outside, r2, b));
                for m in 0..4 {
                    s.u[j][m] = a * q1[m] + (1.0 - a) * q2[m];
                }
            }
        }
        s
    }

    /// Base mesh, bottom and initial averages.
    pub fn initial_data(&self) -> Result<(TriMesh, Bathymetry, State)> {
        let mesh = self.base_mesh()?;
        let bathy = self.sample_bathymetry(&mesh)?;
        let state = self.initial_state(&mesh, &bathy);
        Ok((mesh, bathy, state))
    }

    pub fn simulation(&self) -> Result<Simulation> {
        self.validate()?;
        let (mesh, bathy, state) = self.initial_data()?;
        Simulation::new(self.solver_settings(), mesh, bathy, state)
    }
}
