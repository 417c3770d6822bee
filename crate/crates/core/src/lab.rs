//! Shared evaluation context: parameters, bubble evaluator, bubble constants
//! and quadrature settings for one `(N, p)`.

use crate::bubble::{bubble_constants, Bubble, BubbleConstants};
use crate::error::Result;
use crate::params::Params;
use crate::quadrature::QuadConfig;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Lab<T> {
    pub params: Params<T>,
    pub bubble: Bubble<T>,
    pub constants: BubbleConstants<T>,
    pub cfg: QuadConfig<T>,
}

impl<T: Real> Lab<T> {
    pub fn new(params: Params<T>, cfg: QuadConfig<T>) -> Result<Self> {
        let constants = bubble_constants(&params, &cfg)?;
        Ok(Self {
            params,
            bubble: Bubble::new(params),
            constants,
            cfg,
        })
    }

    /// Same setting with a different quadrature configuration; bubble
    /// constants are recomputed.
    pub fn with_cfg(&self, cfg: QuadConfig<T>) -> Result<Self> {
        Self::new(self.params, cfg)
    }

    /// Sharp Sobolev constant `S`.
    pub fn sharp_s(&self) -> T {
        self.constants.sharp_s
    }

    /// `‖∇U‖_p`.
    pub fn grad_norm_u(&self) -> T {
        self.constants.grad_norm_u
    }
}
