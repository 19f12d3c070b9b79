//! Haar cylinder measures, quadratic actions, the path integral over a
//! tower's cylinders, and character sums over its top level.

pub mod action;
pub mod characters;
pub mod measure;
pub mod path_integral;

pub use action::{action_eval, ActionFunctional};
pub use characters::{characters, conductor_level, frobenius_correlation, partition_function, Character};
pub use measure::{cylinder_mass, haar_measure, CylinderMeasure};
pub use path_integral::{path_integral, Mode, PathIntegralResult, ResultMode};
