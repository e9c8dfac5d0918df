//! Prescribed displacement and velocity on boxes of nodes.

use crate::field::VectorField;
use crate::geometry::Aabb;
use crate::grid::{Axis, ConstrainedBox, Grid};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Prescribed {
    /// `u = value`, `v = 0`.
    Displacement(f64),
    /// `u(t) = u(0) + value·t`, `v = value`.
    Velocity(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub region: Aabb,
    pub axes: Vec<Axis>,
    #[serde(flatten)]
    pub prescribed: Prescribed,
}

impl Constraint {
    pub fn clamp(region: Aabb, axes: Vec<Axis>) -> Self {
        Self { region, axes, prescribed: Prescribed::Displacement(0.0) }
    }

    pub fn velocity(region: Aabb, axis: Axis, v: f64) -> Self {
        Self { region, axes: vec![axis], prescribed: Prescribed::Velocity(v) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Slot {
    node: usize,
    axis: usize,
    prescribed: Prescribed,
    base: f64,
}

/// Constraints resolved to `(node, axis)` slots. Later constraints win where
/// boxes overlap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    slots: Vec<Slot>,
}

impl ConstraintSet {
    pub fn resolve(grid: &Grid, constraints: &[Constraint], u0: &VectorField) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for c in constraints {
            for p in grid.nodes_in(&c.region) {
                for ax in &c.axes {
                    let axis = ax.index();
                    if axis < grid.dim() {
                        map.insert((p, axis), Slot { node: p, axis, prescribed: c.prescribed, base: u0.get(axis, p) });
                    }
                }
            }
        }
        Self { slots: map.into_values().collect() }
    }

    pub fn boxes(constraints: &[Constraint]) -> Vec<ConstrainedBox> {
        constraints.iter().map(|c| ConstrainedBox { region: c.region, axes: c.axes.clone() }).collect()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Overwrite the constrained components of `u` and `v` at time `t`.
    pub fn enforce(&self, u: &mut VectorField, v: &mut VectorField, t: f64) {
        for s in &self.slots {
            match s.prescribed {
                Prescribed::Displacement(value) => {
                    u.set(s.axis, s.node, value);
                    v.set(s.axis, s.node, 0.0);
                }
                Prescribed::Velocity(rate) => {
                    u.set(s.axis, s.node, s.base + rate * t);
                    v.set(s.axis, s.node, rate);
                }
            }
        }
    }

    pub fn contains(&self, node: usize, axis: usize) -> bool {
        self.slots.binary_search_by_key(&(node, axis), |s| (s.node, s.axis)).is_ok()
    }

    /// Overwrite only the velocities.
    pub fn enforce_velocity(&self, v: &mut VectorField) {
        for s in &self.slots {
            let value = match s.prescribed {
                Prescribed::Displacement(_) => 0.0,
                Prescribed::Velocity(rate) => rate,
            };
            v.set(s.axis, s.node, value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_axis_enforcement() {
        let g = Grid::build(&[(0.0, 4.0), (0.0, 2.0)], 1.0, Some(1.0)).unwrap();
        let left = Aabb::new(&[0.0, 0.0], &[1.0, 2.0]);
        let right = Aabb::new(&[3.0, 0.0], &[4.0, 2.0]);
        let cs = ConstraintSet::resolve(
            &g,
            &[Constraint::clamp(left, vec![Axis::X]), Constraint::velocity(right, Axis::Y, -20.0)],
            &VectorField::zeros(2, g.len()),
        );
        assert_eq!(cs.len(), 4);
        let mut u = VectorField::constant(2, g.len(), &[1.0, 1.0]);
        let mut v = VectorField::constant(2, g.len(), &[5.0, 5.0]);
        cs.enforce(&mut u, &mut v, 0.5);
        let p = g.flat([0, 1, 0]);
        assert_eq!((u.get(0, p), u.get(1, p), v.get(0, p)), (0.0, 1.0, 0.0));
        let q = g.flat([3, 0, 0]);
        assert_eq!((u.get(0, q), u.get(1, q), v.get(1, q)), (1.0, -10.0, -20.0));
    }
}
