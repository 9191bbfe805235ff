use crate::error::{PricingError, Result};

const STEP_TOLERANCE: f64 = 1e-9;

/// Uniform space-time lattice `[x_min, x_max] x [0, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub t_max: f64,
    pub dt: f64,
}

fn whole_steps(span: f64, step: f64, what: &str) -> Result<usize> {
    let ratio = span / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > STEP_TOLERANCE * ratio.abs().max(1.0) {
        return Err(PricingError::InvalidGrid(format!(
            "{what} span {span} is not a whole number of steps of {step}"
        )));
    }
    Ok(rounded as usize)
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, dx: f64, t_max: f64, dt: f64) -> Result<Self> {
        let grid = Self {
            x_min,
            x_max,
            dx,
            t_max,
            dt,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.dx, self.t_max, self.dt]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(PricingError::InvalidGrid("non-finite grid parameter".into()));
        }
        if self.x_max <= self.x_min {
            return Err(PricingError::InvalidGrid(format!(
                "x_max = {} must exceed x_min = {}",
                self.x_max, self.x_min
            )));
        }
        if self.dx <= 0.0 || self.dt <= 0.0 || self.t_max <= 0.0 {
            return Err(PricingError::InvalidGrid(
                "dx, dt and t_max must be positive".into(),
            ));
        }
        let m = whole_steps(self.x_max - self.x_min, self.dx, "space")?;
        let n = whole_steps(self.t_max, self.dt, "time")?;
        if m < 2 {
            return Err(PricingError::InvalidGrid(format!(
                "need at least 3 spatial nodes, got {}",
                m + 1
            )));
        }
        if n < 1 {
            return Err(PricingError::InvalidGrid("need at least one time step".into()));
        }
        Ok(())
    }

    /// Number of spatial intervals `M`.
    pub fn space_steps(&self) -> usize {
        ((self.x_max - self.x_min) / self.dx).round() as usize
    }

    /// Number of time steps `N`.
    pub fn time_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn nodes(&self) -> usize {
        self.space_steps() + 1
    }

    pub fn layers(&self) -> usize {
        self.time_steps() + 1
    }

    /// Spatial step actually used, `(x_max - x_min) / M`.
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.space_steps() as f64
    }

    /// Time step actually used, `t_max / N`.
    pub fn k(&self) -> f64 {
        self.t_max / self.time_steps() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.space_steps() {
            self.x_max
        } else {
            self.x_min + j as f64 * self.h()
        }
    }

    pub fn t(&self, i: usize) -> f64 {
        if i == self.time_steps() {
            self.t_max
        } else {
            i as f64 * self.k()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.x(j)).collect()
    }

    /// Index of the spatial node at `x`, if `x` sits on the lattice.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        snap((x - self.x_min) / self.h(), self.space_steps())
    }

    /// Index of the time layer at `t`, if `t` sits on the lattice.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        snap(t / self.k(), self.time_steps())
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        let eps = 1e-12;
        t >= -eps && t <= self.t_max + eps && x >= self.x_min - eps && x <= self.x_max + eps
    }
}

fn snap(pos: f64, max: usize) -> Option<usize> {
    let r = pos.round();
    if (pos - r).abs() <= STEP_TOLERANCE * pos.abs().max(1.0) && r >= 0.0 && r <= max as f64 {
        Some(r as usize)
    } else {
        None
    }
}
