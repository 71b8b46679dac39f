//! Tree automorphisms: finitary portraits and words over automaton
//! families, with sections, truncations, activity, supports and `N_g`.

mod automaton;
mod element;
mod finitary;
mod parse;

pub use automaton::{Automaton, GroupWord, Letter, Recursion, DEFAULT_SECTION_BUDGET};
pub use element::{
    activity, apply_vertex, n_g, ng_profile, section, subexp_profile, support_cylinders,
    support_profile, truncate, AutomatonElement, NgProfile, SectionTree, SubexpProfile,
    SubexpRow, SupportProfile, TreeAutomorphism,
};
pub use finitary::FinitaryAutomorphism;
pub use parse::{format_automaton, parse_automaton};
