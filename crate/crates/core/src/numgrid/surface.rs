use super::GridSpec;
use crate::error::{PricingError, Result};

/// Solution values on every node of a [`GridSpec`], stored row-major by time layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Surface {
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let (rows, cols) = (grid.layers(), grid.nodes());
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(f(i, j));
            }
        }
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.layers() * grid.nodes()],
        }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.layers() * grid.nodes() {
            return Err(PricingError::DimensionMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.layers(),
                grid.nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nodes() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.grid.nodes();
        &self.values[i * m..(i + 1) * m]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.grid.nodes();
        &mut self.values[i * m..(i + 1) * m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Piecewise-linear interpolation in space and time; node queries are exact.
    pub fn query(&self, t: f64, x: f64) -> Result<f64> {
        if !self.grid.contains(t, x) {
            return Err(PricingError::ProbeOutsideGrid { t, x });
        }
        let (i0, wt) = bracket(t / self.grid.k(), self.grid.time_steps());
        let (j0, wx) = bracket((x - self.grid.x_min) / self.grid.h(), self.grid.space_steps());
        let along_x = |i: usize| {
            if wx == 0.0 {
                self.value(i, j0)
            } else {
                (1.0 - wx) * self.value(i, j0) + wx * self.value(i, j0 + 1)
            }
        };
        if wt == 0.0 {
            Ok(along_x(i0))
        } else {
            Ok((1.0 - wt) * along_x(i0) + wt * along_x(i0 + 1))
        }
    }

    /// Value at the lattice node `(t, x)`; errors if the point is not a node.
    pub fn at_node(&self, t: f64, x: f64) -> Result<f64> {
        match (self.grid.time_index(t), self.grid.node_index(x)) {
            (Some(i), Some(j)) => Ok(self.value(i, j)),
            _ => Err(PricingError::ProbeOutsideGrid { t, x }),
        }
    }

    /// Sup-norm of the difference over every node of every layer.
    pub fn max_abs_diff(&self, other: &Surface) -> Result<f64> {
        if self.grid != other.grid {
            return Err(PricingError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn zip_with(&self, other: &Surface, f: impl Fn(f64, f64) -> f64) -> Result<Surface> {
        if self.grid != other.grid {
            return Err(PricingError::GridMismatch);
        }
        Ok(Surface {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }
}

// (lower index, weight of the upper neighbour); snaps to nodes within 1e-9.
fn bracket(pos: f64, max: usize) -> (usize, f64) {
    let r = pos.round();
    if (pos - r).abs() <= 1e-9 * pos.abs().max(1.0) {
        return ((r.max(0.0) as usize).min(max), 0.0);
    }
    let lo = (pos.floor().max(0.0) as usize).min(max - 1);
    (lo, (pos - lo as f64).clamp(0.0, 1.0))
}
