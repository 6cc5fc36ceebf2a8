pub mod channel;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod optimizer;
pub mod purity;
pub mod report;
pub mod specfile;
pub mod tensor;

pub use channel::{build_named_channel, KrausChannel, NamedChannel};
pub use error::{Error, Result};
pub use hamiltonian::{
    fidelity_hamiltonian, fidelity_hamiltonian_hermitian, purity_hamiltonian,
    purity_hamiltonian_dual, ChannelHamiltonian, HamiltonianKind,
};
pub use tensor::{ComplexMatrix, ComplexVector, PureState, SubspaceBasis, DEFAULT_TOL};
