//! Scenario configuration: a TOML document with one table per concern.
//!
//! ```toml
//! name = "plate_tension"
//!
//! [geometry]
//! bounds = [[0.0, 1.0], [0.0, 0.5]]   # metres, one [lo, hi] per axis
//! h = 0.01
//! thickness = 0.0025                  # required in 2D
//!
//! [material]
//! E = 2e11
//! nu = 0.3333333333333333
//! rho = 7850.0
//! # G0 = 100.0 or s0 = 0.01 sets the critical stretch
//!
//! [horizon]
//! delta = 0.03                         # must be an integer multiple of h
//!
//! [solver]
//! method = "fast"                      # or "dense"
//! steps = 3000
//! integrator = { kind = "adr", dt = 1.0 }   # or { kind = "vv", dt = 1.3367e-8 }
//! fracture = false
//!
//! [[loads]]
//! region = { min = [0.0, 0.0], max = [0.01, 0.5] }
//! density = [-2e10, 0.0]
//!
//! [[constraints]]
//! region = { min = [0.0, -0.03], max = [0.05, 0.0] }
//! axes = ["y"]
//! type = "velocity"                    # or "displacement"
//! value = -20.0
//!
//! [[cracks]]
//! kind = "segment"
//! a = [0.02, 0.025]
//! b = [0.03, 0.025]
//!
//! [output]
//! dir = "out"
//! monitors = [{ name = "probe", point = [0.255, 0.125] }]
//! snapshot_every = 100
//! formats = ["tsv", "vtk"]
//! ```
//!
//! Boxes list bounds for the leading axes only; the remaining axes are
//! unbounded.

use crate::constraints::{Constraint, Prescribed};
use crate::corrections::CoefficientTable;
use crate::error::{Error, Result};
use crate::fracture::{Crack, CrackGeometry};
use crate::geometry::Aabb;
use crate::grid::{Grid, HorizonSpec};
use crate::kernel::{MaterialParams, StressMode};
use crate::stepping::{BodyLoad, InitialVelocity, Integrator, Method, Setup};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub bounds: Vec<[f64; 2]>,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonConfig {
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub method: Method,
    pub integrator: Integrator,
    pub steps: usize,
    /// Break bonds against the critical stretch.
    #[serde(default)]
    pub fracture: bool,
    #[serde(default)]
    pub stress_mode: StressMode,
    /// Restrict bond-breaking checks to bonds with both ends in this box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub watch: Option<Aabb>,
    /// Build the dense neighbour table by comparing every pair of nodes.
    #[serde(default)]
    pub all_pairs_search: bool,
    /// Uniform surface-correction coefficient for near-surface bonds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monitor {
    pub name: String,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotFormat {
    Tsv,
    Vtk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub monitors: Vec<Monitor>,
    #[serde(default = "one")]
    pub monitor_every: usize,
    /// Zero disables snapshots; otherwise every `n` steps plus the last.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_formats")]
    pub formats: Vec<SnapshotFormat>,
}

fn one() -> usize {
    1
}

fn default_formats() -> Vec<SnapshotFormat> {
    vec![SnapshotFormat::Tsv, SnapshotFormat::Vtk]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, monitors: Vec::new(), monitor_every: 1, snapshot_every: 0, formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub geometry: GeometryConfig,
    pub material: MaterialParams,
    pub horizon: HorizonConfig,
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loads: Vec<BodyLoad>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial_velocity: Vec<InitialVelocity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cracks: Vec<Crack>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// One rejected field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parse and validate a TOML document.
pub fn parse_str(src: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
        Error::Parse { line, column, message: e.message().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    parse_str(&std::fs::read_to_string(path)?)
}

impl ScenarioConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialise")
    }

    pub fn dim(&self) -> usize {
        self.geometry.bounds.len()
    }

    pub fn grid(&self) -> Result<Grid> {
        let bounds: Vec<(f64, f64)> = self.geometry.bounds.iter().map(|b| (b[0], b[1])).collect();
        Grid::build(&bounds, self.geometry.h, self.geometry.thickness)
    }

    pub fn horizon(&self) -> Result<HorizonSpec> {
        HorizonSpec::new(self.horizon.delta, self.geometry.h)
    }

    pub fn critical_stretch(&self) -> Option<f64> {
        self.material.critical_stretch(self.horizon.delta, self.solver.stress_mode)
    }

    /// Collect every violation rather than stopping at the first.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |field: &str, message: String| out.push(Violation { field: field.to_string(), message });
        let dim = self.dim();
        if !(2..=3).contains(&dim) {
            bad("geometry.bounds", format!("expected 2 or 3 axes, got {dim}"));
        }
        for (a, b) in self.geometry.bounds.iter().enumerate() {
            if !(b[0] < b[1]) || !b[0].is_finite() || !b[1].is_finite() {
                bad(&format!("geometry.bounds[{a}]"), format!("need finite lo < hi, got {b:?}"));
            }
        }
        let h = self.geometry.h;
        if !(h > 0.0) || !h.is_finite() {
            bad("geometry.h", format!("must be positive, got {h}"));
        }
        match self.geometry.thickness {
            Some(t) if !(t > 0.0) => bad("geometry.thickness", format!("must be positive, got {t}")),
            None if dim == 2 => bad("geometry.thickness", "required for 2D plates".into()),
            _ => {}
        }
        let grid = if out.is_empty() {
            match self.grid() {
                Ok(g) => Some(g),
                Err(e) => {
                    out.push(Violation { field: "geometry.h".into(), message: e.to_string() });
                    None
                }
            }
        } else {
            None
        };
        let m = &self.material;
        if !(m.e > 0.0) {
            out.push(Violation { field: "material.E".into(), message: format!("must be positive, got {}", m.e) });
        }
        if !(m.rho > 0.0) {
            out.push(Violation { field: "material.rho".into(), message: format!("must be positive, got {}", m.rho) });
        }
        if !(m.nu > -1.0 && m.nu < 0.5) {
            out.push(Violation { field: "material.nu".into(), message: format!("must lie in (-1, 0.5), got {}", m.nu) });
        }
        if let Some(g0) = m.g0 {
            if !(g0 > 0.0) {
                out.push(Violation { field: "material.G0".into(), message: format!("must be positive, got {g0}") });
            }
        }
        if let Some(s0) = m.s0_override {
            if !(s0 > 0.0) {
                out.push(Violation { field: "material.s0".into(), message: format!("must be positive, got {s0}") });
            }
        }
        if h > 0.0 {
            if let Err(e) = self.horizon() {
                out.push(Violation { field: "horizon.delta".into(), message: e.to_string() });
            } else if let Some(g) = &grid {
                let mh = self.horizon().map(|hz| hz.m()).unwrap_or(0);
                for a in 0..dim {
                    if 2 * g.dims()[a] < 2 * mh + 2 {
                        out.push(Violation {
                            field: "horizon.delta".into(),
                            message: format!("band M = {mh} too wide for {} nodes along axis {a}", g.dims()[a]),
                        });
                    }
                }
            }
        }
        let s = &self.solver;
        let dt = match s.integrator {
            Integrator::Adr { dt, .. } | Integrator::Vv { dt } => dt,
        };
        if !(dt > 0.0) || !dt.is_finite() {
            out.push(Violation { field: "solver.integrator.dt".into(), message: format!("must be positive, got {dt}") });
        }
        if let Integrator::Adr { damping: crate::stepping::Damping::Fixed(c), .. } = s.integrator {
            if !(c >= 0.0) {
                out.push(Violation { field: "solver.integrator.damping".into(), message: format!("must be >= 0, got {c}") });
            }
        }
        if s.fracture && self.critical_stretch().is_none() {
            out.push(Violation { field: "solver.fracture".into(), message: "needs material.s0 or material.G0".into() });
        }
        if s.surface_coefficient.is_some() && s.method == Method::Dense {
            out.push(Violation {
                field: "solver.surface_coefficient".into(),
                message: "only the fast method supports surface correction".into(),
            });
        }
        if let Some(g) = &grid {
            let check_box = |field: String, region: &Aabb, out: &mut Vec<Violation>| {
                if !within(g, region) {
                    out.push(Violation { field, message: "box must lie within the domain".into() });
                } else if g.nodes_in(region).is_empty() {
                    out.push(Violation { field, message: "box contains no nodes".into() });
                }
            };
            for (i, c) in self.constraints.iter().enumerate() {
                check_box(format!("constraints[{i}].region"), &c.region, &mut out);
                if c.axes.iter().any(|a| a.index() >= dim) || c.axes.is_empty() {
                    out.push(Violation { field: format!("constraints[{i}].axes"), message: format!("need axes within {dim}D") });
                }
                let value = match c.prescribed {
                    Prescribed::Displacement(v) | Prescribed::Velocity(v) => v,
                };
                if !value.is_finite() {
                    out.push(Violation { field: format!("constraints[{i}].value"), message: "must be finite".into() });
                }
            }
            for (i, l) in self.loads.iter().enumerate() {
                check_box(format!("loads[{i}].region"), &l.region, &mut out);
                if l.density.len() != dim {
                    out.push(Violation {
                        field: format!("loads[{i}].density"),
                        message: format!("need {dim} components, got {}", l.density.len()),
                    });
                }
            }
            for (i, v) in self.initial_velocity.iter().enumerate() {
                check_box(format!("initial_velocity[{i}].region"), &v.region, &mut out);
                if v.axis.index() >= dim {
                    out.push(Violation { field: format!("initial_velocity[{i}].axis"), message: format!("not an axis in {dim}D") });
                }
            }
            if let Some(w) = &s.watch {
                check_box("solver.watch".into(), w, &mut out);
            }
            for (i, c) in self.cracks.iter().enumerate() {
                let ok = matches!(
                    (&c.geometry, dim),
                    (CrackGeometry::Segment { .. }, 2) | (CrackGeometry::Rectangle { .. }, 3)
                );
                if !ok {
                    out.push(Violation {
                        field: format!("cracks[{i}].kind"),
                        message: format!("segments are 2D, rectangles 3D; the domain is {dim}D"),
                    });
                }
                if !(c.width >= 0.0) {
                    out.push(Violation { field: format!("cracks[{i}].width"), message: "must be >= 0".into() });
                }
            }
            let b = g.bounds();
            for (i, mon) in self.output.monitors.iter().enumerate() {
                let mut x = [0.0; 3];
                x[..mon.point.len().min(3)].copy_from_slice(&mon.point[..mon.point.len().min(3)]);
                if mon.point.len() != dim || !b.contains_with(&x, 1e-9 * h) {
                    out.push(Violation {
                        field: format!("output.monitors[{i}].point"),
                        message: format!("need a {dim}D point inside the domain"),
                    });
                }
            }
        }
        if self.output.monitor_every == 0 {
            out.push(Violation { field: "output.monitor_every".into(), message: "must be >= 1".into() });
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Resolve into solver inputs.
    pub fn setup(&self) -> Result<Setup> {
        self.validate()?;
        let grid = self.grid()?;
        let horizon = self.horizon()?;
        Ok(Setup {
            grid,
            horizon,
            material: self.material,
            method: self.solver.method,
            integrator: self.solver.integrator,
            constraints: self.constraints.clone(),
            loads: self.loads.clone(),
            initial_velocity: self.initial_velocity.clone(),
            cracks: self.cracks.clone(),
            s0: if self.solver.fracture { self.critical_stretch() } else { None },
            watch: self.solver.watch,
            surface_coefficients: self.solver.surface_coefficient.map(CoefficientTable::uniform),
            all_pairs_search: self.solver.all_pairs_search,
        })
    }
}

/// Finite box bounds lie within one lattice step of the domain.
fn within(grid: &Grid, region: &Aabb) -> bool {
    let b = grid.bounds();
    let slack = grid.h() * (1.0 + 1e-9);
    (0..grid.dim()).all(|a| {
        let lo_ok = !region.min[a].is_finite() || region.min[a] >= b.min[a] - slack;
        let hi_ok = !region.max[a].is_finite() || region.max[a] <= b.max[a] + slack;
        region.min[a] <= region.max[a] && lo_ok && hi_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "tiny"

[geometry]
bounds = [[0.0, 1.0], [0.0, 0.5]]
h = 0.05
thickness = 0.01

[material]
E = 2e11
nu = 0.3333333333333333
rho = 7850.0

[horizon]
delta = 0.15

[solver]
steps = 10
integrator = { kind = "adr", dt = 1.0 }
"#;

    #[test]
    fn minimal_document_parses() {
        let cfg = parse_str(MINIMAL).unwrap();
        assert_eq!(cfg.solver.method, Method::Fast);
        assert_eq!(cfg.grid().unwrap().dims(), [20, 10, 1]);
        let again = parse_str(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn syntax_errors_carry_location() {
        let src = MINIMAL.replace("h = 0.05", "h = = 0.05");
        match parse_str(&src) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 6);
                assert!(column >= 4);
            }
            other => panic!("{other:?}"),
        }
        let src = MINIMAL.replace(r#"steps = 10"#, "steps = 10\nmethod = \"sparse\"");
        assert!(matches!(parse_str(&src), Err(Error::Parse { .. })));
    }

    #[test]
    fn all_violations_are_reported() {
        let src = MINIMAL.replace("delta = 0.15", "delta = 0.17").replace("rho = 7850.0", "rho = -1.0");
        let src = src.replace("thickness = 0.01\n", "");
        match parse_str(&src) {
            Err(Error::Validation(v)) => {
                let fields: Vec<_> = v.iter().map(|v| v.field.as_str()).collect();
                assert!(fields.contains(&"geometry.thickness"), "{fields:?}");
                assert!(fields.contains(&"material.rho"));
                assert!(fields.contains(&"horizon.delta"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn boxes_outside_domain_are_rejected() {
        let src = format!(
            "{MINIMAL}\n[[loads]]\nregion = {{ min = [2.0, 0.0], max = [3.0, 0.5] }}\ndensity = [1.0, 0.0]\n"
        );
        match parse_str(&src) {
            Err(Error::Validation(v)) => assert_eq!(v[0].field, "loads[0].region"),
            other => panic!("{other:?}"),
        }
    }
}
