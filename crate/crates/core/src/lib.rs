//! Towers of finite groups as finite stand-ins for profinite groups: coherent
//! elements, binary clopen codes, Cantor and Hamming metrics, Haar cylinder
//! measures, path integrals over cylinders and character sums.

pub mod arith;
pub mod cli;
pub mod error;
pub mod format;
pub mod group;
pub mod integral;
pub mod matrioshka;
pub mod metric;
pub mod tower;

pub use error::{Error, Result};
pub use group::{enumerate_automorphisms, frobenius_element, make_group, FiniteGroup, GroupElement, GroupSpec};
pub use matrioshka::{block_encode, block_truncate, build_partition_tree, BitSequence, BlockCode, EncodingConvention};
pub use metric::{cantor_distance, hamming, subcube, SubcubeDescriptor, Word};
pub use tower::{coherent_element, make_tower, validate_tower, CoherentElement, Cylinder, Tower, TowerSpec};
