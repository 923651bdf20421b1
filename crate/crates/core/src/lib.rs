//! Pair-excitation ladders for the Lee-Huang-Yang quadratic Hamiltonian.
//!
//! The crate works on truncated coefficient sequences over the ladders
//! `{|p+s, s⟩}` of a single `(k, -k)` mode pair, and on the three-mode
//! fixed-`N` sector that includes the condensate. Every closed form has a
//! dense numerical referee in [`oracle`].

pub mod eigenstates;
pub mod error;
pub mod genfunc;
pub mod hamiltonians;
pub mod hypergeom;
pub mod ladder;
pub mod lattice;
pub mod oracle;
pub mod pair_transform;
pub mod special;
pub mod verify;
pub mod wu_sector;

pub use error::{Error, Result};
pub use genfunc::GenFn;
pub use hamiltonians::HabMatrix;
pub use ladder::{LadderState, C64};
pub use lattice::{ModeParams, ModelParams, Momentum};
pub use wu_sector::WuSector;
