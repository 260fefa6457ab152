//! Cokernels of random matrices over `Z/p^k` and random group quotients:
//! exact p-group counting, Smith normal form, Monte Carlo experiments on
//! joint cokernel laws, moment inversion, and surjection moments for small
//! non-abelian groups.

pub mod error;
pub mod moments;
pub mod montecarlo;
pub mod nonabelian;
pub mod padic;
pub mod pgroup;

pub use error::{Error, Result};
pub use padic::{
    make_b_sequence, sample_matrix, smith_normal_form, AlphaSchedule, BSpec, CokernelType, EntrySampler, MatModPk,
    SnfResult,
};
pub use pgroup::density::{
    density_cokernel, density_joint_independent, density_joint_pshift, density_joint_shifts, CInfMultiple,
};
pub use pgroup::subspace::subspace_full_projection_count;
pub use pgroup::{aut_order, c_infinity, c_partial, hom_count, m_weight, sur_count, PGroupType, Partition};
