//! Randomness extractors built from a weak source viewed as the truth table of
//! a function `{0,1}^ñ → {0,1}^ñ`.
//!
//! Two constructions are provided:
//!
//! - [`extract::extract_bmy`]: the source is first turned into a circular
//!   permutation `R`, and output bit `i` is the inner product of the mask `r`
//!   with the `i`-th iterate of the `ℓ`-fold direct product of `R` applied to
//!   the seed blocks.
//! - [`extract::extract_local`]: output bit `i` is the inner product of `r`
//!   with `X(x₁+i) ⊙ … ⊙ X(x_ℓ+i)`. Each bit is computable on its own with
//!   exactly `ℓ` table lookups ([`extract::extract_local_bit`]).
//!
//! The [`verify`] module checks the extractor property empirically (exact
//! seed enumeration, worst case over flat sources, Monte-Carlo distance
//! estimates) and [`bench`] measures the per-bit and total cost.

pub mod bench;
pub mod bits;
pub mod cli;
mod error;
pub mod extract;
pub mod params;
pub mod perm;
pub mod verify;

pub use bits::{inner_product, shift_tuple, table_lookup, BitString, Seed, TruthTable};
pub use error::{Error, Result};
pub use extract::{
    extract, extract_bmy, extract_local, extract_local_bit, prepare_bmy, ExtractorKind,
    PreparedBmy,
};
pub use params::{derive_params, override_params, ParamSet};
pub use perm::{
    circular_from_permutation, direct_product_apply, iterate, permutation_from_function,
    preimage_census, star_sequence, CircularPerm, Permutation, StarSequence,
};
