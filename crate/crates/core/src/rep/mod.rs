//! Finite-level representation matrices, exact inner products and the
//! linear algebra used to read off fixed spaces and intertwiners.

mod ball;
mod ha;
mod linalg;
mod monomial;
mod sqrt_sum;
mod subset_lemma;

pub use ball::{quasi_regular_matrices, SchreierBallRep};
pub use ha::{compressed_koopman, h_a_profile, HaProfile, HaRow};
pub use linalg::{
    fixed_space, fixed_space_exact, intertwiner_dim, kernel, ExactFixedSpace, FixedSpace, Kernel,
    KERNEL_THRESHOLD,
};
pub use monomial::{
    decay_domain, gamma_decay_check, koopman_inner, koopman_level_matrix, Basis, GammaDecay,
    MonomialMatrix,
};
pub use sqrt_sum::{Comparison, SqrtSum, FLOAT_TOLERANCE};
pub use subset_lemma::{
    subset_lemma_bruteforce, transitive_groups, Counterexample, SubsetLemmaReport, SubsetLemmaRow,
    SUBSET_LEMMA_MAX_N,
};
