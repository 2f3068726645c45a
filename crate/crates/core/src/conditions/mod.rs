//! Open set condition and semi-hyperbolicity checks, the Koebe quarter
//! sanity check, and the built-in example catalog.

mod catalog;
mod family;
mod koebe;
mod osc;
mod region;
mod semihyp;

pub use catalog::{builtin_examples, example, family_member, CatalogEntry, FamilyMember};
pub use family::family_c0;
pub use koebe::{koebe_quarter_check, KoebeParams, KoebeReport};
pub use osc::{check_osc, OscParams, OscReport, PairWitness};
pub use region::{escape_radius, in_filled_julia, Region, ESCAPE_ITERATIONS};
pub use semihyp::{check_semihyperbolicity, CriticalPairReport, SemiHypReport, Verdict};
