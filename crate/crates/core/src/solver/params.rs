use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::check_speeds;

/// Pressure and shear speeds `c1 > sqrt(4/3) c2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub c1: f64,
    pub c2: f64,
}

impl MaterialParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        check_speeds(c1, c2)?;
        Ok(MaterialParams { c1, c2 })
    }

    pub fn validate(&self) -> Result<()> {
        check_speeds(self.c1, self.c2)
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams { c1: 2.0, c2: 1.0 }
    }
}
