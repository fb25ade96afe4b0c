//! Exact representation theory of the symmetric and alternating groups, applied to
//! permutation-symmetric qudit states that reveal the parity of a hidden permutation.

pub mod characters;
pub mod cyclo;
pub mod error;
pub mod exact;
pub mod gme;
pub mod group_algebra;
pub mod linalg;
pub mod parity;
pub mod partition;
pub mod perm;
pub mod state;

pub use characters::{Branch, CharacterTable, ClassLabel, IrrepLabel};
pub use cyclo::{CycloAccumulator, Cyclotomic};
pub use error::{Error, Result};
pub use group_algebra::GroupAlgebraElement;
pub use partition::{Partition, SemiStandardTableau, StandardTableau};
pub use perm::{compose, GroupKind, Permutation};
