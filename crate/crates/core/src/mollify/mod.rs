//! IMS partition of unity and coherent-state mollifiers.

mod kernel;
mod partition;
mod slopes;

pub use kernel::{convolve, ConvolutionRule, Field, MollifierKernel, RadialField};
pub use partition::{
    bump, bump_complement, bump_derivative, gradient_bound_check, GradientReport, PartitionScheme,
    ZoneId, BUMP_GRADIENT_SUP,
};
pub use slopes::{
    cone_scaling, convolution_error_slope, gaussian_field, ray_region, tau_ladder,
    tent_negative_part_field, ConeScalingReport, ConvolutionSlopeReport, MIN_LADDER_SPAN,
};
